// ccattest: batch front-end for the attestation simulator.
//
//   ccattest pack    --sample oscilloscope-synth --codec lz-general --out packed
//   ccattest attest  --attacker external-memory --runs 10 --out transcript.csv
//   ccattest plan    --c-a canonical-huffman --s-a 1024
//   ccattest sweep   --out sweep.csv --ratio-out ratios.csv
//   ccattest table1
//   ccattest trace   --trace-kind random --cache-capacities 1,2,4
//
// Every command also takes --config FILE (key=value); flags override it.

#include <cstdio>
#include <deque>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "ccattest/adversary.hpp"
#include "ccattest/attestation.hpp"
#include "ccattest/error.hpp"
#include "ccattest/exec_sim.hpp"
#include "ccattest/experiment.hpp"
#include "ccattest/samples.hpp"

using namespace ccattest;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInfeasible = 2;

// Flag values land here and are layered over the config file.
struct Overlay {
  struct Binding {
    std::string key;
    std::string value;
    CLI::Option* opt = nullptr;
    bool flag = false;
  };
  std::deque<Binding> bindings;

  CLI::Option* add(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
    bindings.push_back({key, {}, nullptr});
    return bindings.back().opt = app->add_option(flag, bindings.back().value, help);
  }
  void add_flag(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
    bindings.push_back({key, "1", nullptr, true});
    bindings.back().opt = app->add_flag(flag, help);
  }

  KeyValues apply(const std::string& config_path) const {
    KeyValues kv = config_path.empty() ? KeyValues{} : KeyValues::load(config_path);
    for (const auto& b : bindings) {
      if (b.opt->count() > 0) kv.set(b.key, b.flag ? std::string("1") : b.value);
    }
    return kv;
  }
};

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw Error(Errc::kIo, "cannot write " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

void add_input_flags(Overlay& o, CLI::App* app) {
  o.add(app, "--image", "image", "code image file");
  o.add(app, "--image-format", "image_format", "raw | ihex");
  o.add(app, "--sample", "sample", "bundled synthetic image name");
  o.add(app, "--codec", "codec", "honest codec C_h");
  o.add(app, "--block-size", "block_size", "honest block size s_h");
  o.add(app, "--capacity", "capacity", "program memory bytes");
  o.add(app, "--option", "option", "memory layout option: 1 | 2a | 2b");
  o.add(app, "--prw-seed", "prw_seed", "PRW seed (hex)");
}

void add_profile_flags(Overlay& o, CLI::App* app) {
  o.add(app, "--profile", "profile", "slow-node | fast-node");
}

void add_attacker_flags(Overlay& o, CLI::App* app) {
  o.add(app, "--c-a", "c_a", "attacker codec C_a");
  o.add(app, "--s-a", "s_a", "attacker block size s_a");
  o.add(app, "--payload", "payload", "bogus code bytes the attacker must fit");
  o.add(app, "--detect-seconds", "detect_seconds", "detectability threshold for plans");
}

// ---- pack ----

int cmd_pack(const ExperimentConfig& cfg) {
  const auto img = pack(load_input(cfg), cfg.codec, cfg.block_size, cfg.capacity, cfg.prw_seed, cfg.option);
  const std::string prefix = cfg.out.empty() ? "packed" : cfg.out;
  save_packed(img, prefix + ".bin", prefix + ".manifest");
  const auto& l = img.layout;
  std::cout << "wrote " << prefix << ".bin (" << img.memory.size() << " bytes) and " << prefix << ".manifest\n";
  std::cout << "compressed " << l.compressed.offset << "+" << l.compressed.length;
  if (l.lat) std::cout << "  lat " << l.lat->offset << "+" << l.lat->length;
  if (l.dict) std::cout << "  dict " << l.dict->offset << "+" << l.dict->length;
  std::cout << "  prw " << l.prw.offset << "+" << l.prw.length << "\n";
  return kExitOk;
}

// ---- attest ----

int cmd_attest(const ExperimentConfig& cfg) {
  const PackedImage img = load_or_pack(cfg);
  VerifierPolicy policy;
  policy.thresholds = thresholds_for(cfg, img);
  policy.option = img.manifest.option;
  policy.key = cfg.key;
  const bool replay = cfg.attacker == "replay";
  Verifier verifier(img, policy, NonceSource(cfg.seed, cfg.nonce_width, replay ? 2 * cfg.runs : cfg.runs));
  SimClock clock(cfg.jitter, cfg.seed);

  auto prover = make_prover(cfg, img);
  // The replay attacker eavesdrops an honest exchange before each attempt.
  std::unique_ptr<Prover> honest;
  if (replay) {
    ExperimentConfig h = cfg;
    h.attacker = "honest";
    honest = make_prover(h, img);
  }

  Output out(cfg.out);
  out.stream() << transcript_csv_header() << "\n";
  std::map<Verdict, std::size_t> counts;
  std::set<Nonce> nonces;
  for (std::size_t i = 0; i < cfg.runs; ++i) {
    if (replay) {
      auto t = run_attestation(verifier, *honest, clock);
      if (t.x) static_cast<ReplayProver&>(*prover).observe(t.nonce, *t.x);
      out.stream() << to_csv_row(t) << "\n";
    }
    auto t = run_attestation(verifier, *prover, clock);
    ++counts[t.verdict];
    nonces.insert(t.nonce);
    out.stream() << to_csv_row(t) << "\n";
  }
  std::fprintf(stderr,
               "attacker=%s runs=%zu accept=%zu reject-hash=%zu reject-timing=%zu aborted=%zu distinct_nonces=%zu "
               "T_em=%.6f T_pm=%.6f\n",
               cfg.attacker.c_str(), cfg.runs, counts[Verdict::kAccept], counts[Verdict::kRejectHash],
               counts[Verdict::kRejectTiming], counts[Verdict::kAborted], nonces.size(), policy.thresholds.t_em,
               policy.thresholds.t_pm);
  return kExitOk;
}

// ---- plan ----

int cmd_plan(const ExperimentConfig& cfg) {
  const Bytes ci = load_input(cfg).bytes;
  const auto p =
      make_plan(ci, cfg.codec, cfg.block_size, cfg.c_a, cfg.s_a, cfg.profile, cfg.payload, cfg.detect_seconds);
  Output out(cfg.out);
  auto& os = out.stream();
  os << "c_h=" << to_string(p.c_h) << "\ns_h=" << p.s_h << "\nc_a=" << to_string(p.c_a) << "\ns_a=" << p.s_a
     << "\nci_length=" << p.ci_length << "\nhonest_size=" << p.honest_size << "\nattacker_size=" << p.attacker_size
     << "\npayload=" << p.bogus_payload_bytes << "\ntotal_gain=" << p.total_gain
     << "\nblocks_total=" << fmt("%.4f", p.blocks_total) << "\ngain_per_block=" << fmt("%.4f", p.gain_per_block)
     << "\nfeasible=" << (p.feasible() ? 1 : 0) << "\n";
  if (!p.feasible()) {
    std::fprintf(stderr, "plan infeasible: no attacker gain covers a %zu-byte payload\n", p.bogus_payload_bytes);
    return kExitInfeasible;
  }
  os << "blocks_needed=" << *p.blocks_needed << "\noverhead_bytes=" << fmt("%.0f", p.memory_overhead_bytes)
     << "\nest_seconds=" << fmt("%.6f", p.est_attest_seconds) << "\ndetectable=" << (p.detectable ? 1 : 0) << "\n";
  return kExitOk;
}

// ---- sweep ----

int cmd_sweep(const ExperimentConfig& cfg) {
  const Bytes ci = load_input(cfg).bytes;
  const auto plans = feasibility_sweep(ci, cfg.codec, cfg.block_sizes, cfg.attacker_codecs,
                                       cfg.attacker_block_sizes, cfg.profile, cfg.payload, cfg.detect_seconds);
  {
    Output out(cfg.out);
    out.stream() << sweep_csv_header() << "\n";
    for (const auto& p : plans) out.stream() << to_csv_row(p) << "\n";
  }
  if (!cfg.ratio_out.empty()) {
    std::vector<CodecId> codecs{kAllCodecs.begin(), kAllCodecs.end()};
    Output out(cfg.ratio_out);
    out.stream() << ratio_csv_header() << "\n";
    for (const auto& r : ratio_table(ci, codecs, cfg.block_sizes)) out.stream() << to_csv_row(r) << "\n";
  }
  return kExitOk;
}

// ---- table1 ----

struct PublishedColumn {
  std::size_t ci, lat, pzip, ppmz, deflate, zpaq, ours, baseline;
};
// Reference values as published for the three benchmark applications.
const PublishedColumn kPublishedTable[3] = {
    {25906, 153, 148, 163, 181, 242, 5, 16948},
    {15240, 90, 92, 109, 123, 188, 0, 7029},
    {2860, 18, 30, 48, 48, 131, 0, 1124},
};

int cmd_table1(const ExperimentConfig& cfg, bool explicit_input) {
  std::vector<CodeImage> images;
  if (explicit_input) {
    images.push_back(load_input(cfg));
  } else {
    for (const auto& s : kSamples) images.push_back(sample_image(s));
  }
  Output out(cfg.out);
  auto& os = out.stream();
  os << "image,ci_bytes,lat_bytes";
  for (auto c : kAllCodecs) os << ",c_lat." << to_string(c);
  os << ",max_bogus_ours,max_bogus_uncompressed,ref_ci,ref_lat,ref_pzip_lat,ref_ppmz_lat,ref_deflate_lat,"
        "ref_zpaq_lat,ref_max_bogus_ours,ref_max_bogus_uncompressed\n";
  for (const auto& img : images) {
    const auto honest = compress_blocks(img.bytes, cfg.codec, cfg.block_size);
    const Lat lat = build_lat(honest);
    os << (img.name.empty() ? "image" : img.name) << ',' << img.size() << ',' << lat.serialized_size();
    std::size_t ours = 0;
    for (auto c : kAllCodecs) {
      const auto r = lat_compression_attack(lat, c);
      os << ',' << r.compressed_size;
      ours = std::max(ours, r.gain);
    }
    // Without the countermeasure CI sits uncompressed; the attacker keeps
    // its best recompression.
    std::size_t baseline = 0;
    for (auto c : kAllCodecs) {
      for (auto s : kBlockSizes) {
        const auto a = compress_blocks(img.bytes, c, s).compressed_size();
        if (a < img.size()) baseline = std::max(baseline, img.size() - a);
      }
    }
    os << ',' << ours << ',' << baseline;
    const PublishedColumn* ref = nullptr;
    for (const auto& p : kPublishedTable) {
      if (p.ci == img.size()) ref = &p;
    }
    if (ref) {
      os << ',' << ref->ci << ',' << ref->lat << ',' << ref->pzip << ',' << ref->ppmz << ',' << ref->deflate << ','
         << ref->zpaq << ',' << ref->ours << ',' << ref->baseline;
    } else {
      os << ",,,,,,,,";
    }
    os << "\n";
  }
  return kExitOk;
}

// ---- trace ----

int cmd_trace(const ExperimentConfig& cfg) {
  const CodeImage ci = load_input(cfg);
  const auto img = compress_blocks(ci.bytes, cfg.codec, cfg.block_size);
  const Lat lat = build_lat(img);
  std::vector<std::size_t> trace;
  if (!cfg.trace.empty()) {
    const Bytes text = read_file(cfg.trace);
    trace = parse_trace(std::string(text.begin(), text.end()));
  } else if (cfg.trace_kind == "sequential") {
    trace = sequential_trace(ci.size(), std::max<std::size_t>(1, cfg.trace_length / ci.size()));
  } else if (cfg.trace_kind == "looped") {
    // Each loop replays span/2 word fetches 4.5 times on average.
    const std::size_t span = 4 * cfg.block_size;
    const auto iterations = std::max<std::size_t>(1, cfg.trace_length * 2 / (span * 9 / 2));
    trace = looped_trace(ci.size(), span, iterations, cfg.seed);
  } else if (cfg.trace_kind == "random") {
    trace = random_trace(ci.size(), cfg.trace_length, cfg.seed);
  } else {
    throw Error(Errc::kBadConfig, "trace_kind: expected sequential, looped or random");
  }
  Output out(cfg.out);
  out.stream() << cache_report_csv_header() << "\n";
  for (auto cap : cfg.cache_capacities) {
    out.stream() << to_csv_row(run_trace(trace, cap, img, lat, cfg.profile)) << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Code attestation simulator over compressed program memory"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "key=value experiment config");

  Overlay o;
  auto* pack_cmd = app.add_subcommand("pack", "compress a code image and lay out program memory");
  add_input_flags(o, pack_cmd);
  o.add(pack_cmd, "--out", "out", "output prefix (<prefix>.bin, <prefix>.manifest)");

  auto* attest_cmd = app.add_subcommand("attest", "run challenge-response attestations, emit a transcript CSV");
  add_input_flags(o, attest_cmd);
  add_profile_flags(o, attest_cmd);
  add_attacker_flags(o, attest_cmd);
  o.add(attest_cmd, "--packed", "packed", "prefix of a packed image");
  o.add(attest_cmd, "--attacker", "attacker", "honest | compression | external-memory | replay | lat-compressor");
  o.add(attest_cmd, "--runs", "runs", "number of runs");
  o.add(attest_cmd, "--seed", "seed", "nonce/jitter seed (hex)");
  o.add(attest_cmd, "--margin", "margin", "calibration margin for T_em");
  o.add(attest_cmd, "--t-em", "t_em", "fixed T_em (disables auto-calibration)");
  o.add(attest_cmd, "--t-pm", "t_pm", "fixed T_pm (disables auto-calibration)");
  o.add(attest_cmd, "--jitter", "jitter", "clock jitter fraction");
  o.add(attest_cmd, "--key", "key", "16-byte MAC key (hex)");
  o.add(attest_cmd, "--nonce-width", "nonce_width", "nonce bytes, 4..8");
  o.add(attest_cmd, "--ext-bandwidth", "ext_bandwidth", "external memory bytes/s");
  o.add_flag(attest_cmd, "--cached", "cached_attacker", "let the compression attacker cache one block");
  o.add(attest_cmd, "--out", "out", "transcript CSV (stdout if omitted)");

  auto* plan_cmd = app.add_subcommand("plan", "attack plan for one (C_a, s_a)");
  add_input_flags(o, plan_cmd);
  add_profile_flags(o, plan_cmd);
  add_attacker_flags(o, plan_cmd);
  o.add(plan_cmd, "--out", "out", "report file (stdout if omitted)");

  auto* sweep_cmd = app.add_subcommand("sweep", "feasibility matrix and compression ratio CSVs");
  add_input_flags(o, sweep_cmd);
  add_profile_flags(o, sweep_cmd);
  o.add(sweep_cmd, "--block-sizes", "block_sizes", "honest block sizes s_h (comma list)");
  o.add(sweep_cmd, "--attacker-codecs", "attacker_codecs", "attacker codec menu (comma list, may be empty)")
      ->expected(0, 1);
  o.add(sweep_cmd, "--attacker-block-sizes", "attacker_block_sizes", "attacker block sizes (comma list)");
  o.add(sweep_cmd, "--payload", "payload", "bogus code bytes");
  o.add(sweep_cmd, "--detect-seconds", "detect_seconds", "detectability threshold");
  o.add(sweep_cmd, "--out", "out", "feasibility CSV (stdout if omitted)");
  o.add(sweep_cmd, "--ratio-out", "ratio_out", "compression ratio CSV");

  auto* table_cmd = app.add_subcommand("table1", "LAT sizes, compressed LAT sizes and max bogus code sizes");
  add_input_flags(o, table_cmd);
  o.add(table_cmd, "--out", "out", "CSV (stdout if omitted)");

  auto* trace_cmd = app.add_subcommand("trace", "decompression cache simulation over an address trace");
  add_input_flags(o, trace_cmd);
  add_profile_flags(o, trace_cmd);
  o.add(trace_cmd, "--trace", "trace", "trace file, one address per line");
  o.add(trace_cmd, "--trace-kind", "trace_kind", "sequential | looped | random");
  o.add(trace_cmd, "--trace-length", "trace_length", "synthetic trace length");
  o.add(trace_cmd, "--cache-capacities", "cache_capacities", "cache sizes in blocks (comma list)");
  o.add(trace_cmd, "--seed", "seed", "trace seed (hex)");
  o.add(trace_cmd, "--out", "out", "CSV (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    const KeyValues kv = o.apply(config_path);
    const ExperimentConfig cfg = ExperimentConfig::from(kv);
    if (pack_cmd->parsed()) return cmd_pack(cfg);
    if (attest_cmd->parsed()) return cmd_attest(cfg);
    if (plan_cmd->parsed()) return cmd_plan(cfg);
    if (sweep_cmd->parsed()) return cmd_sweep(cfg);
    if (table_cmd->parsed()) return cmd_table1(cfg, kv.has("image") || kv.has("sample"));
    if (trace_cmd->parsed()) return cmd_trace(cfg);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    const bool infeasible = e.code() == Errc::kInfeasiblePlan || e.code() == Errc::kCalibrationFailure;
    return infeasible ? kExitInfeasible : kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }
  return kExitUsage;
}
