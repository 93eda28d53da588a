#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include "ccattest/codec.hpp"
#include "ccattest/keyvalue.hpp"

namespace ccattest {

// Bandwidths in bytes per second. 1 MB = 10^6 bytes throughout.
struct DeviceProfile {
  std::string name;
  double pm_read_bw = 1e6;
  double em_read_bw = 0.25e6;
  double hash_bw = 1e6;
  std::array<double, 3> decomp_bw{1e6, 1e6, 1e6};  // indexed by CodecId

  double decomp(CodecId c) const { return decomp_bw[static_cast<std::size_t>(c)]; }
  void validate() const;
};

// pm 1 MB/s, em 0.25 MB/s.
DeviceProfile slow_node();
// pm 50 MB/s, em 12.5 MB/s.
DeviceProfile fast_node();
// Throws Error(kBadConfig) for unknown names.
DeviceProfile profile_by_name(const std::string& name);

// Keys: name, pm_read_bw, em_read_bw, hash_bw, decomp_bw.<codec>. Missing
// keys fall back to `base`; hash_bw defaults to pm_read_bw.
DeviceProfile profile_from_config(const KeyValues& kv, const DeviceProfile& base);
KeyValues profile_to_config(const DeviceProfile& profile);

struct CostCounters {
  std::uint64_t pm_bytes = 0;
  std::uint64_t em_bytes = 0;
  std::uint64_t hash_bytes = 0;
  std::array<std::uint64_t, 3> decomp_bytes{};  // indexed by CodecId

  void add_decomp(CodecId c, std::uint64_t n) { decomp_bytes[static_cast<std::size_t>(c)] += n; }
  std::uint64_t total_decomp() const { return decomp_bytes[0] + decomp_bytes[1] + decomp_bytes[2]; }
  CostCounters& operator+=(const CostCounters& o);
  bool operator==(const CostCounters&) const = default;
};

// Sum of counter / bandwidth terms, in seconds.
double elapsed(const CostCounters& cost, const DeviceProfile& profile);

struct Thresholds {
  double t_em = 0;
  double t_pm = 0;

  double acceptance() const { return t_em < t_pm ? t_em : t_pm; }
};

// T_em = honest * margin, T_pm = sqrt(T_em * pm_attack). Requires
// honest < ext_attack, honest < pm_attack, margin >= 1, and T_em below both
// attack times; throws Error(kCalibrationFailure) otherwise.
Thresholds calibrate_thresholds(double honest, double ext_attack, double pm_attack, double margin);

// Simulated verifier clock. With jitter > 0 every advance is stretched by a
// uniform factor in [1, 1 + jitter] drawn from a seeded stream.
class SimClock {
 public:
  explicit SimClock(double jitter = 0.0, std::uint64_t seed = 0);

  double now() const { return now_; }
  // Advances by `seconds` (plus jitter); returns the actual step taken.
  double advance(double seconds);

 private:
  double now_ = 0.0;
  double jitter_;
  std::uint64_t state_;
};

}  // namespace ccattest
