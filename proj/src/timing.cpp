#include "ccattest/timing.hpp"

#include <cmath>
#include <random>

#include "ccattest/error.hpp"

namespace ccattest {

void DeviceProfile::validate() const {
  auto positive = [this](double v, const char* what) {
    if (!(v > 0) || !std::isfinite(v)) {
      throw Error(Errc::kBadConfig, "profile " + name + ": " + what + " must be > 0");
    }
  };
  positive(pm_read_bw, "pm_read_bw");
  positive(em_read_bw, "em_read_bw");
  positive(hash_bw, "hash_bw");
  for (auto c : kAllCodecs) positive(decomp(c), "decomp_bw");
}

DeviceProfile slow_node() {
  DeviceProfile p;
  p.name = "slow-node";
  p.pm_read_bw = 1e6;
  p.em_read_bw = 0.25e6;
  p.hash_bw = 1e6;
  p.decomp_bw = {1e6, 1e6, 1e6};
  return p;
}

DeviceProfile fast_node() {
  DeviceProfile p;
  p.name = "fast-node";
  p.pm_read_bw = 50e6;
  p.em_read_bw = 12.5e6;
  p.hash_bw = 50e6;
  p.decomp_bw = {50e6, 50e6, 50e6};
  return p;
}

DeviceProfile profile_by_name(const std::string& name) {
  if (name == "slow-node") return slow_node();
  if (name == "fast-node") return fast_node();
  throw Error(Errc::kBadConfig, "unknown profile '" + name + "'");
}

DeviceProfile profile_from_config(const KeyValues& kv, const DeviceProfile& base) {
  std::set<std::string> allowed{"name", "pm_read_bw", "em_read_bw", "hash_bw"};
  for (auto c : kAllCodecs) allowed.insert("decomp_bw." + std::string(to_string(c)));
  kv.require_known(allowed);
  DeviceProfile p = base;
  p.name = kv.get_or("name", base.name);
  if (kv.has("pm_read_bw")) {
    p.pm_read_bw = kv.get_double("pm_read_bw");
    if (!kv.has("hash_bw")) p.hash_bw = p.pm_read_bw;
  }
  if (kv.has("em_read_bw")) p.em_read_bw = kv.get_double("em_read_bw");
  if (kv.has("hash_bw")) p.hash_bw = kv.get_double("hash_bw");
  for (auto c : kAllCodecs) {
    const std::string key = "decomp_bw." + std::string(to_string(c));
    if (kv.has(key)) p.decomp_bw[static_cast<std::size_t>(c)] = kv.get_double(key);
  }
  p.validate();
  return p;
}

KeyValues profile_to_config(const DeviceProfile& profile) {
  KeyValues kv;
  auto num = [](double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  kv.set("name", profile.name);
  kv.set("pm_read_bw", num(profile.pm_read_bw));
  kv.set("em_read_bw", num(profile.em_read_bw));
  kv.set("hash_bw", num(profile.hash_bw));
  for (auto c : kAllCodecs) kv.set("decomp_bw." + std::string(to_string(c)), num(profile.decomp(c)));
  return kv;
}

CostCounters& CostCounters::operator+=(const CostCounters& o) {
  pm_bytes += o.pm_bytes;
  em_bytes += o.em_bytes;
  hash_bytes += o.hash_bytes;
  for (std::size_t i = 0; i < decomp_bytes.size(); ++i) decomp_bytes[i] += o.decomp_bytes[i];
  return *this;
}

double elapsed(const CostCounters& cost, const DeviceProfile& profile) {
  double t = static_cast<double>(cost.pm_bytes) / profile.pm_read_bw +
             static_cast<double>(cost.em_bytes) / profile.em_read_bw +
             static_cast<double>(cost.hash_bytes) / profile.hash_bw;
  for (auto c : kAllCodecs) {
    t += static_cast<double>(cost.decomp_bytes[static_cast<std::size_t>(c)]) / profile.decomp(c);
  }
  return t;
}

Thresholds calibrate_thresholds(double honest, double ext_attack, double pm_attack, double margin) {
  auto fail = [](const std::string& why) { throw Error(Errc::kCalibrationFailure, why); };
  if (!(honest >= 0) || !(margin >= 1.0)) fail("need honest >= 0 and margin >= 1");
  if (!(honest < ext_attack)) fail("honest time does not separate from the external-memory attack");
  if (!(honest < pm_attack)) fail("honest time does not separate from the compression attack");
  Thresholds t;
  t.t_em = honest * margin;
  if (!(t.t_em < ext_attack) || !(t.t_em < pm_attack)) fail("margin pushes T_em past an attack time");
  t.t_pm = std::sqrt(t.t_em * pm_attack);
  // honest == 0 would collapse both thresholds to zero.
  if (!(t.t_pm > t.t_em)) fail("T_pm does not exceed T_em");
  return t;
}

SimClock::SimClock(double jitter, std::uint64_t seed) : jitter_(jitter), state_(seed) {
  if (jitter < 0) throw Error(Errc::kInvalidArgument, "jitter must be >= 0");
}

double SimClock::advance(double seconds) {
  double step = seconds;
  if (jitter_ > 0) {
    std::mt19937_64 rng(state_++);
    step *= 1.0 + std::uniform_real_distribution<double>(0.0, jitter_)(rng);
  }
  now_ += step;
  return step;
}

}  // namespace ccattest
