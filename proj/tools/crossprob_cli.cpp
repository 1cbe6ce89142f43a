// crossprob command-line front end. Links only against the C interface.
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "crossprob/crossprob.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

struct RunConfig {
  std::string boundary_path;
  std::string samples_path;
  std::int64_t n = 0;
  std::vector<std::int64_t> ns;
  std::string method = "fft";
  std::int64_t given_count = -1;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  bool json = false;
  std::string stat;
  std::optional<double> stat_value;
  double alpha = 0.05;
  bool force_full = false;
  bool banded = false;
  int repeats = 3;
};

// Thrown for malformed input detected in the CLI itself.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct StatusError : std::runtime_error {
  crossprob_status status;
  StatusError(crossprob_status s, const std::string& what) : std::runtime_error(what), status(s) {}
};

void check(crossprob_status s) {
  if (s != CROSSPROB_OK) throw StatusError(s, crossprob_last_error());
}

struct BoundaryDeleter {
  void operator()(crossprob_boundary* b) const { crossprob_boundary_destroy(b); }
};
struct StatisticDeleter {
  void operator()(crossprob_statistic* s) const { crossprob_statistic_destroy(s); }
};
struct ReportDeleter {
  void operator()(crossprob_bench_report* r) const { crossprob_bench_report_destroy(r); }
};
using BoundaryPtr = std::unique_ptr<crossprob_boundary, BoundaryDeleter>;
using StatisticPtr = std::unique_ptr<crossprob_statistic, StatisticDeleter>;
using ReportPtr = std::unique_ptr<crossprob_bench_report, ReportDeleter>;

std::string fmt17(double v) {
  if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// JSON has no infinities; an exact zero probability reports a null log.
nlohmann::json json_number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

crossprob_options make_options(const RunConfig& cfg) {
  crossprob_options o;
  crossprob_options_init(&o);
  check(crossprob_method_from_name(cfg.method.c_str(), &o.method));
  o.force_full = cfg.force_full ? 1 : 0;
  if (o.method == CROSSPROB_METHOD_MONTE_CARLO) {
    if (cfg.trials == 0) throw InputError("--method monte-carlo needs --trials");
    o.trials = cfg.trials;
    o.seed = cfg.seed;
    o.has_seed = 1;
  }
  if (o.force_full && (o.method == CROSSPROB_METHOD_BINOMIAL || o.method == CROSSPROB_METHOD_MONTE_CARLO)) {
    throw InputError("--force-full-fft applies to fft and direct only");
  }
  return o;
}

BoundaryPtr load_boundary(const std::string& path) {
  crossprob_boundary* b = nullptr;
  check(crossprob_boundary_load(path.c_str(), &b));
  return BoundaryPtr(b);
}

StatisticPtr make_statistic(const std::string& name, std::int64_t n) {
  crossprob_statistic* s = nullptr;
  check(crossprob_statistic_create(name.c_str(), n, &s));
  return StatisticPtr(s);
}

std::vector<double> read_samples(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open samples file '" + path + "'");
  std::vector<double> out;
  std::string token;
  while (in >> token) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(token, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != token.size()) throw InputError("bad sample '" + token + "' in " + path);
    out.push_back(v);
  }
  return out;
}

void print_result(const RunConfig& cfg, const crossprob_result& r) {
  if (cfg.json) {
    nlohmann::json j;
    j["probability"] = r.probability;
    j["log_probability"] = json_number(r.log_probability);
    j["n"] = r.n;
    j["checkpoints"] = r.checkpoints;
    j["method"] = cfg.method;
    j["wall_time_ms"] = r.wall_time_ms;
    if (cfg.given_count >= 0) j["given_count"] = cfg.given_count;
    if (r.trials > 0) {
      j["std_error"] = r.std_error;
      j["hits"] = r.hits;
      j["trials"] = r.trials;
      j["seed"] = cfg.seed;
    }
    std::cout << j.dump() << '\n';
    return;
  }
  std::cout << "probability: " << fmt17(r.probability) << '\n'
            << "log_probability: " << fmt17(r.log_probability) << '\n'
            << "n: " << r.n << '\n'
            << "checkpoints: " << r.checkpoints << '\n'
            << "method: " << cfg.method << '\n';
  if (r.trials > 0) {
    std::cout << "std_error: " << fmt17(r.std_error) << '\n'
              << "trials: " << r.trials << '\n'
              << "seed: " << cfg.seed << '\n';
  }
  std::cout << "wall_time_ms: " << r.wall_time_ms << '\n';
}

int cmd_poisson(const RunConfig& cfg) {
  const BoundaryPtr b = load_boundary(cfg.boundary_path);
  const crossprob_options o = make_options(cfg);
  crossprob_result r;
  check(crossprob_poisson(b.get(), cfg.given_count, &o, &r));
  print_result(cfg, r);
  return kExitOk;
}

int cmd_ecdf(const RunConfig& cfg) {
  const BoundaryPtr b = load_boundary(cfg.boundary_path);
  const crossprob_options o = make_options(cfg);
  crossprob_result r;
  check(crossprob_ecdf(b.get(), &o, &r));
  print_result(cfg, r);
  return kExitOk;
}

int cmd_pvalue(const RunConfig& cfg) {
  const bool have_samples = !cfg.samples_path.empty();
  if (have_samples == cfg.stat_value.has_value()) {
    throw InputError("pvalue needs exactly one of a samples file or --stat-value");
  }
  std::vector<double> samples;
  std::int64_t n = cfg.n;
  if (have_samples) {
    samples = read_samples(cfg.samples_path);
    if (n == 0) n = static_cast<std::int64_t>(samples.size());
    if (n != static_cast<std::int64_t>(samples.size())) throw InputError("--n does not match the sample count");
  }
  if (n < 1) throw InputError("pvalue needs --n or a non-empty samples file");

  const StatisticPtr s = make_statistic(cfg.stat, n);
  double t = cfg.stat_value.value_or(0.0);
  if (have_samples) check(crossprob_statistic_compute(s.get(), samples.data(), samples.size(), &t));
  const crossprob_options o = make_options(cfg);
  crossprob_pvalue_result r;
  check(crossprob_pvalue(s.get(), t, &o, &r));

  if (cfg.json) {
    nlohmann::json j;
    j["statistic"] = cfg.stat;
    j["statistic_value"] = json_number(r.statistic);
    j["p_value"] = r.p_value;
    j["log_noncrossing"] = json_number(r.log_noncrossing);
    j["n"] = r.n;
    j["checkpoints"] = r.checkpoints;
    j["method"] = cfg.method;
    j["wall_time_ms"] = r.wall_time_ms;
    if (o.method == CROSSPROB_METHOD_MONTE_CARLO) j["std_error"] = r.std_error;
    std::cout << j.dump() << '\n';
  } else {
    std::cout << "statistic: " << cfg.stat << '\n'
              << "statistic_value: " << fmt17(r.statistic) << '\n'
              << "p_value: " << fmt17(r.p_value) << '\n'
              << "log_p_value: " << fmt17(r.p_value > 0.0 ? std::log(r.p_value) : -INFINITY) << '\n'
              << "log_noncrossing: " << fmt17(r.log_noncrossing) << '\n'
              << "n: " << r.n << '\n'
              << "checkpoints: " << r.checkpoints << '\n'
              << "method: " << cfg.method << '\n'
              << "wall_time_ms: " << r.wall_time_ms << '\n';
  }
  return kExitOk;
}

int cmd_critical_value(const RunConfig& cfg) {
  if (cfg.n < 1) throw InputError("critical-value needs --n");
  const StatisticPtr s = make_statistic(cfg.stat, cfg.n);
  const crossprob_options o = make_options(cfg);
  double t = 0.0;
  check(crossprob_critical_value(s.get(), cfg.alpha, &o, &t));
  if (cfg.json) {
    nlohmann::json j;
    j["statistic"] = cfg.stat;
    j["n"] = cfg.n;
    j["alpha"] = cfg.alpha;
    j["critical_value"] = t;
    j["method"] = cfg.method;
    std::cout << j.dump() << '\n';
  } else {
    std::cout << "statistic: " << cfg.stat << '\n'
              << "n: " << cfg.n << '\n'
              << "alpha: " << fmt17(cfg.alpha) << '\n'
              << "critical_value: " << fmt17(t) << '\n';
  }
  return kExitOk;
}

int cmd_bench(const RunConfig& cfg) {
  if (cfg.ns.empty()) throw InputError("bench needs --n with one or more sizes");
  crossprob_bench_config c{};
  c.ns = cfg.ns.data();
  c.n_count = cfg.ns.size();
  c.statistic = cfg.stat.c_str();
  c.alpha = cfg.alpha;
  if (cfg.method == "both") {
    c.run_fft = c.run_direct = 1;
  } else if (cfg.method == "fft") {
    c.run_fft = 1;
  } else if (cfg.method == "direct") {
    c.run_direct = 1;
  } else {
    throw InputError("bench --method must be fft, direct or both");
  }
  c.force_full = cfg.banded ? 0 : 1;
  c.repeats = cfg.repeats;

  crossprob_bench_report* raw = nullptr;
  check(crossprob_bench_run(&c, &raw));
  const ReportPtr report(raw);
  std::cout << crossprob_bench_report_csv(report.get());
  for (size_t i = 0; i < crossprob_bench_report_fit_count(report.get()); ++i) {
    const char* method = nullptr;
    crossprob_scaling_fit fit;
    check(crossprob_bench_report_fit(report.get(), i, &method, &fit));
    std::cout << "# fit method=" << method << " slope=" << fmt17(fit.slope) << " intercept="
              << fmt17(fit.intercept) << " r_squared=" << fmt17(fit.r_squared) << '\n';
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Boundary non-crossing probabilities for Poisson processes and empirical CDFs"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_method = [&](CLI::App* sub) {
    sub->add_option("--method", cfg.method, "fft, direct, binomial-oracle or monte-carlo")->capture_default_str();
    sub->add_option("--trials", cfg.trials, "Monte Carlo trials");
    sub->add_option("--seed", cfg.seed, "Monte Carlo seed (required for monte-carlo)");
    sub->add_flag("--json", cfg.json, "JSON output");
    sub->add_flag("--force-full-fft", cfg.force_full, "propagate the full state range");
  };

  auto* poisson = app.add_subcommand("poisson", "Poisson process non-crossing probability");
  poisson->add_option("boundary", cfg.boundary_path, "boundary file")->required();
  poisson->add_option("--given-count", cfg.given_count, "condition on this many jumps at time 1");
  add_method(poisson);

  auto* ecdf = app.add_subcommand("ecdf", "empirical CDF non-crossing probability");
  ecdf->add_option("boundary", cfg.boundary_path, "boundary file")->required();
  add_method(ecdf);

  auto* pval = app.add_subcommand("pvalue", "exact p-value of a goodness-of-fit statistic");
  pval->add_option("samples", cfg.samples_path, "file of whitespace-separated values in [0, 1]");
  pval->add_option("--stat", cfg.stat, "statistic name")->required();
  pval->add_option("--n", cfg.n, "sample size");
  pval->add_option("--stat-value", cfg.stat_value, "statistic value instead of samples");
  add_method(pval);

  auto* crit = app.add_subcommand("critical-value", "threshold with the given p-value");
  crit->add_option("--stat", cfg.stat, "statistic name")->required();
  crit->add_option("--n", cfg.n, "sample size")->required();
  crit->add_option("--alpha", cfg.alpha, "target p-value")->capture_default_str();
  crit->add_option("--method", cfg.method, "fft or direct")->capture_default_str();
  crit->add_flag("--json", cfg.json, "JSON output");
  crit->add_flag("--force-full-fft", cfg.force_full, "propagate the full state range");

  auto* bench = app.add_subcommand("bench", "time fft and direct propagation on calibrated boundaries");
  bench->add_option("--n", cfg.ns, "sample sizes, comma separated")->required()->delimiter(',');
  bench->add_option("--stat", cfg.stat, "statistic name");
  bench->add_option("--alpha", cfg.alpha, "calibration level")->capture_default_str();
  bench->add_option("--method", cfg.method, "fft, direct or both");
  bench->add_option("--repeats", cfg.repeats, "timed repeats per point")->capture_default_str();
  bench->add_flag("--force-full-fft", cfg.force_full, "full-range propagation (the default for bench)");
  bench->add_flag("--banded", cfg.banded, "time the band-limited propagation instead");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (bench->parsed()) {
      if (cfg.stat.empty()) cfg.stat = "ks_two_sided";
      if (bench->count("--method") == 0) cfg.method = "both";
      return cmd_bench(cfg);
    }
    const bool monte_carlo = cfg.method == "monte-carlo";
    for (auto* sub : {poisson, ecdf, pval}) {
      if (!sub->parsed()) continue;
      if (!monte_carlo && (sub->count("--trials") || sub->count("--seed"))) {
        throw InputError("--trials and --seed are only valid with --method monte-carlo");
      }
      if (monte_carlo && sub->count("--seed") == 0) throw InputError("--method monte-carlo needs --seed");
    }
    if (poisson->parsed()) return cmd_poisson(cfg);
    if (ecdf->parsed()) return cmd_ecdf(cfg);
    if (pval->parsed()) return cmd_pvalue(cfg);
    if (crit->parsed()) return cmd_critical_value(cfg);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const StatusError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.status == CROSSPROB_INVALID_ARGUMENT ? kExitInput : kExitNumerical;
  }
  return kExitInput;
}
