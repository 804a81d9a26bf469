#include "deadneuron/arrangement.hpp"
#include "deadneuron/experiments.hpp"
#include "deadneuron/io.hpp"
#include "deadneuron/network.hpp"
#include "deadneuron/rng.hpp"
#include "deadneuron/stability.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace deadneuron;

namespace {

// Exit codes: 0 ok, 2 usage or malformed input, 3 marginal verdict,
// 4 non-generic or numerically uncertifiable input, 5 file I/O failure.
constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitMarginal = 3;
constexpr int kExitNotGeneric = 4;
constexpr int kExitIo = 5;

struct FileError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::uint64_t default_seed() {
  const char* env = std::getenv("DEADNEURON_SEED");
  if (!env || !*env) return 1729;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (end == env || *end != '\0')
    throw UsageError("DEADNEURON_SEED must be an unsigned integer");
  return v;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw FileError("cannot read " + path);
  return buf.str();
}

// Report text goes to --out when given, to stdout otherwise. A summary line
// accompanies file output so the terminal still shows what happened.
void deliver(const std::string& out_path, const std::string& text, const std::string& summary) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw FileError("cannot open " + out_path + " for writing");
  out << text;
  out.flush();
  if (!out) throw FileError("cannot write " + out_path);
  if (!summary.empty()) std::cout << summary << '\n';
}

std::string fmt_g(double x, int digits = 10) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

struct CommonFlags {
  std::uint64_t seed = 0;
  bool seed_given = false;
  int threads = 1;
  double tolerance = kTolerance;
  std::string out;
  std::string format = "csv";
};

void add_common(CLI::App* cmd, CommonFlags& f, bool with_format = true) {
  auto* seed = cmd->add_option("--seed", f.seed, "RNG seed (default: DEADNEURON_SEED or 1729)");
  cmd->callback([seed, &f] { f.seed_given = seed->count() > 0; });
  cmd->add_option("--threads", f.threads, "worker threads; never changes results")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--tolerance", f.tolerance, "numeric tolerance override")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--out", f.out, "output file (default: stdout)");
  if (with_format)
    cmd->add_option("--format", f.format, "csv|json (svg for sweep only)")
        ->check(CLI::IsMember({"csv", "json", "svg"}));
}

std::uint64_t resolve_seed(const CommonFlags& f) {
  return f.seed_given ? f.seed : default_seed();
}

Distribution make_dist(const std::string& name, double scale) {
  if (scale <= 0) throw UsageError("--scale must be positive");
  if (name == "uniform") return Distribution::uniform_symmetric(scale);
  if (name == "normal") return Distribution::normal(scale);
  throw UsageError("unknown distribution: " + name);
}

void add_dist(CLI::App* cmd, std::string& dist, double& scale) {
  cmd->add_option("--dist", dist, "parameter law: uniform|normal")
      ->check(CLI::IsMember({"uniform", "normal"}));
  cmd->add_option("--scale", scale, "half-width (uniform) or standard deviation (normal)");
}

// counts: closed-form region/bounded/facet counts, with an enumeration
// cross-check on a random generic arrangement when m is small enough.
int cmd_counts(long long m, long long n, const CommonFlags& flags) {
  const RegionCounts rc = region_counts(m, n);
  std::string line = "regions=" + std::to_string(rc.total) + " bounded=" + std::to_string(rc.bounded);
  if (m > n) {
    const FacetStats fs = facet_statistics(m, n);
    line += " facets=" + std::to_string(fs.total_facets) +
            " avg_facets=" + fmt_g(fs.avg_facets.value());
  }
  std::cout << line << '\n';

  if (m <= kArrangementCap) {
    Rng stream(resolve_seed(flags));
    CoorientedArrangement<double> arr;
    arr.dim = static_cast<Index>(n);
    for (int attempt = 0;; ++attempt) {
      if (attempt >= 100) throw NotGenericError("counts: no generic arrangement after 100 draws");
      arr.hyperplanes.clear();
      Rng draw = stream.fork(static_cast<std::uint64_t>(attempt));
      for (long long i = 0; i < m; ++i) {
        Hyperplane<double> h;
        h.normal.resize(arr.dim);
        for (Index j = 0; j < arr.dim; ++j) h.normal(j) = draw.normal(1.0);
        h.offset = draw.normal(1.0);
        arr.hyperplanes.push_back(std::move(h));
      }
      if (is_generic(arr)) break;
    }
    const auto regions = enumerate_regions(arr);
    long long bounded = 0;
    for (const auto& r : regions)
      if (r.bounded) ++bounded;
    std::cout << "enumerated regions=" << regions.size() << " bounded=" << bounded << '\n';
    if (static_cast<long long>(regions.size()) != rc.total || bounded != rc.bounded)
      throw NumericalInstability("counts: enumeration disagrees with the closed form");
  }
  return kExitOk;
}

int cmd_decide(const std::string& path, Index neuron_index, const CommonFlags& flags) {
  const NetworkParams params = params_from_json(read_file(path));
  const StabilityVerdict v =
      is_stably_unactivated_exact(params, NeuronRef{2, neuron_index}, flags.tolerance);
  deliver(flags.out, to_json(v) + "\n", "");
  if (!flags.out.empty()) std::cout << (v.stable ? "stable" : v.marginal ? "marginal" : "not stable") << '\n';
  return v.marginal ? kExitMarginal : kExitOk;
}

std::string estimate_summary(const EstimateReport& r) {
  std::string s = "n0=" + std::to_string(r.n0) + " n1=" + std::to_string(r.n1) + " mode=" + r.mode +
                  " p_hat=" + fmt_g(r.p_hat) + " ci=[" + fmt_g(r.ci_low) + "," + fmt_g(r.ci_high) +
                  "]";
  if (r.theory) s += " theory=" + fmt_g(*r.theory);
  return s;
}

int cmd_estimate(int n0, int n1, long long samples, const std::string& dist_name, double scale,
                 const std::string& mode, const CommonFlags& flags) {
  if (flags.format == "svg") throw UsageError("--format svg is only available for sweep");
  auto rep = estimate_prob_stable(n0, n1, make_dist(dist_name, scale), samples,
                                  resolve_seed(flags), flags.threads);
  if (!mode.empty() && rep.mode != mode)
    throw UsageError("requested mode " + mode + " but this cell runs " + rep.mode);
  const std::vector<EstimateReport> rows = {rep};
  deliver(flags.out, flags.format == "json" ? to_json(rows) + "\n" : to_csv(rows),
          estimate_summary(rep));
  return kExitOk;
}

int cmd_deltas(int n0, long long samples, const std::string& dist_name, double scale,
               const CommonFlags& flags) {
  if (flags.format == "svg") throw UsageError("--format svg is only available for sweep");
  const DeltaReport rep = estimate_deltas(n0, make_dist(dist_name, scale), samples,
                                          resolve_seed(flags), flags.threads);
  std::string text;
  if (flags.format == "json") {
    text = "{\"n0\":" + std::to_string(rep.n0) + ",\"n1\":" + std::to_string(rep.n1) +
           ",\"samples\":" + std::to_string(rep.samples) + ",\"entries\":[";
    for (size_t i = 0; i < rep.entries.size(); ++i) {
      const auto& e = rep.entries[i];
      if (i) text += ',';
      text += "{\"index\":" + std::to_string(e.index) +
              ",\"samples\":" + std::to_string(e.conditional_samples) +
              ",\"hits\":" + std::to_string(e.conditional_hits) +
              ",\"delta_hat\":" + fmt_g(e.delta_hat, 17) + "}";
    }
    text += "],\"delta_sum\":" + fmt_g(rep.delta_sum, 17) +
            ",\"seed\":" + std::to_string(rep.seed) + "}\n";
  } else {
    text = "index,samples,hits,delta_hat\n";
    long long tot_samples = 0, tot_hits = 0;
    for (const auto& e : rep.entries) {
      text += std::to_string(e.index) + ',' + std::to_string(e.conditional_samples) + ',' +
              std::to_string(e.conditional_hits) + ',' + fmt_g(e.delta_hat) + '\n';
      tot_samples += e.conditional_samples;
      tot_hits += e.conditional_hits;
    }
    text += "total," + std::to_string(tot_samples) + ',' + std::to_string(tot_hits) + ',' +
            fmt_g(rep.delta_sum) + '\n';
  }
  deliver(flags.out, text,
          "n0=" + std::to_string(rep.n0) + " delta_sum=" + fmt_g(rep.delta_sum) +
              " (expected 1/2^" + std::to_string(rep.n1) + ")");
  return kExitOk;
}

int cmd_sweep(int n0, int n1_min, int n1_max, long long samples, const std::string& dist_name,
              double scale, const CommonFlags& flags) {
  auto cells = conjecture_sweep(n0, n1_min, n1_max, make_dist(dist_name, scale), samples,
                                resolve_seed(flags), flags.threads);
  std::string text;
  if (flags.format == "svg")
    text = sweep_svg(cells);
  else if (flags.format == "json")
    text = to_json(cells) + "\n";
  else
    text = to_csv(cells);
  std::string summary;
  if (!flags.out.empty()) {
    for (const auto& c : cells) {
      if (!summary.empty()) summary += '\n';
      summary += estimate_summary(c);
    }
  }
  deliver(flags.out, text, summary);
  return kExitOk;
}

int cmd_facets(long long n0, std::vector<long long> ms, const CommonFlags& flags) {
  if (flags.format == "svg") throw UsageError("--format svg is only available for sweep");
  const FacetReport rep = facet_report(n0, ms, resolve_seed(flags));
  std::string text;
  if (flags.format == "json") {
    text = "[";
    for (size_t i = 0; i < rep.rows.size(); ++i) {
      const auto& r = rep.rows[i];
      if (i) text += ',';
      text += "{\"m\":" + std::to_string(r.m) + ",\"regions\":" + std::to_string(r.regions) +
              ",\"bounded\":" + std::to_string(r.bounded) +
              ",\"total_facets\":" + std::to_string(r.total_facets) +
              ",\"avg_facets\":" + fmt_g(r.avg_facets, 17) +
              ",\"bounded_ratio\":" + fmt_g(r.bounded_ratio, 17);
      text += ",\"empirical_total_facets\":";
      text += r.empirical_total_facets ? std::to_string(*r.empirical_total_facets) : "null";
      text += ",\"axis_intersection_bound\":";
      text += r.axis_intersection_bound ? fmt_g(*r.axis_intersection_bound, 17) : "null";
      text += "}";
    }
    text += "]\n";
  } else {
    text =
        "m,regions,bounded,total_facets,avg_facets,bounded_ratio,"
        "empirical_total_facets,axis_intersection_bound\n";
    for (const auto& r : rep.rows) {
      text += std::to_string(r.m) + ',' + std::to_string(r.regions) + ',' +
              std::to_string(r.bounded) + ',' + std::to_string(r.total_facets) + ',' +
              fmt_g(r.avg_facets) + ',' + fmt_g(r.bounded_ratio) + ',';
      if (r.empirical_total_facets) text += std::to_string(*r.empirical_total_facets);
      text += ',';
      if (r.axis_intersection_bound) text += fmt_g(*r.axis_intersection_bound);
      text += '\n';
    }
  }
  deliver(flags.out, text, "facet rows=" + std::to_string(rep.rows.size()));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stable-unactivation toolkit for two-layer ReLU networks"};
  app.require_subcommand(1);

  long long counts_m = 0, counts_n = 0;
  CommonFlags counts_flags;
  auto* counts = app.add_subcommand("counts", "closed-form region and facet counts");
  counts->add_option("--m", counts_m, "number of hyperplanes")->required();
  counts->add_option("--n", counts_n, "ambient dimension")->required();
  add_common(counts, counts_flags, /*with_format=*/false);

  std::string decide_path;
  Index decide_neuron = 1;
  CommonFlags decide_flags;
  auto* decide = app.add_subcommand("decide", "exact stability verdict for a parameter file");
  decide->add_option("params", decide_path, "network parameter JSON file")->required();
  decide->add_option("--neuron", decide_neuron, "second-layer neuron index (1-based)");
  add_common(decide, decide_flags, /*with_format=*/false);

  int est_n0 = 0, est_n1 = 0;
  long long est_samples = 200000;
  std::string est_dist = "uniform", est_mode;
  double est_scale = 1.0;
  CommonFlags est_flags;
  auto* estimate = app.add_subcommand("estimate", "Monte Carlo stable-unactivation probability");
  estimate->add_option("--n0", est_n0, "input dimension")->required();
  estimate->add_option("--n1", est_n1, "first-layer width")->required();
  estimate->add_option("--samples", est_samples, "parameter draws");
  estimate->add_option("--mode", est_mode, "require exact|detector for this cell")
      ->check(CLI::IsMember({"exact", "detector"}));
  add_dist(estimate, est_dist, est_scale);
  add_common(estimate, est_flags);

  int deltas_n0 = 0;
  long long deltas_samples = 400000;
  std::string deltas_dist = "uniform";
  double deltas_scale = 1.0;
  CommonFlags deltas_flags;
  auto* deltas = app.add_subcommand("deltas", "per-configuration probability decomposition");
  deltas->add_option("--n0", deltas_n0, "input dimension")->required();
  deltas->add_option("--samples", deltas_samples, "parameter draws");
  add_dist(deltas, deltas_dist, deltas_scale);
  add_common(deltas, deltas_flags);

  int sweep_n0 = 0, sweep_lo = 0, sweep_hi = 0;
  long long sweep_samples = 50000;
  std::string sweep_dist = "uniform";
  double sweep_scale = 1.0;
  CommonFlags sweep_flags;
  auto* sweep = app.add_subcommand("sweep", "probability estimates across first-layer widths");
  sweep->add_option("--n0", sweep_n0, "input dimension")->required();
  sweep->add_option("--n1-min", sweep_lo, "smallest first-layer width")->required();
  sweep->add_option("--n1-max", sweep_hi, "largest first-layer width")->required();
  sweep->add_option("--samples", sweep_samples, "parameter draws per cell");
  add_dist(sweep, sweep_dist, sweep_scale);
  add_common(sweep, sweep_flags);

  long long facets_n0 = 0;
  std::vector<long long> facets_ms = {4, 6, 10, 50, 200};
  CommonFlags facets_flags;
  auto* facets = app.add_subcommand("facets", "facet statistics table");
  facets->add_option("--n0", facets_n0, "ambient dimension")->required();
  facets->add_option("--m", facets_ms, "hyperplane counts (space separated)");
  add_common(facets, facets_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*counts) return cmd_counts(counts_m, counts_n, counts_flags);
    if (*decide) return cmd_decide(decide_path, decide_neuron, decide_flags);
    if (*estimate)
      return cmd_estimate(est_n0, est_n1, est_samples, est_dist, est_scale, est_mode, est_flags);
    if (*deltas) return cmd_deltas(deltas_n0, deltas_samples, deltas_dist, deltas_scale, deltas_flags);
    if (*sweep)
      return cmd_sweep(sweep_n0, sweep_lo, sweep_hi, sweep_samples, sweep_dist, sweep_scale,
                       sweep_flags);
    if (*facets) return cmd_facets(facets_n0, facets_ms, facets_flags);
  } catch (const FileError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NotGenericError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNotGeneric;
  } catch (const DegenerateRowError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNotGeneric;
  } catch (const NumericalInstability& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNotGeneric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
