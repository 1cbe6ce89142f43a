#include "crossprob/crossprob.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <new>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "crossprob/bench.hpp"
#include "crossprob/boundaries.hpp"
#include "crossprob/engine.hpp"
#include "crossprob/error.hpp"
#include "crossprob/gof.hpp"
#include "crossprob/oracles.hpp"

struct crossprob_boundary {
  crossprob::BoundaryPair pair;
};

struct crossprob_statistic {
  crossprob::StatisticSpec spec;
};

struct crossprob_bench_report {
  crossprob::BenchReport report;
  std::string csv;
};

namespace {

thread_local std::string g_last_error;

crossprob_status fail(crossprob_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

template <typename Fn>
crossprob_status guarded(Fn&& fn) {
  g_last_error.clear();
  try {
    fn();
    return CROSSPROB_OK;
  } catch (const crossprob::InvalidArgument& e) {
    return fail(CROSSPROB_INVALID_ARGUMENT, e.what());
  } catch (const crossprob::NumericalFailure& e) {
    return fail(CROSSPROB_NUMERICAL_FAILURE, e.what());
  } catch (const std::bad_alloc&) {
    return fail(CROSSPROB_NUMERICAL_FAILURE, "out of memory");
  } catch (const std::exception& e) {
    return fail(CROSSPROB_INTERNAL_ERROR, e.what());
  } catch (...) {
    return fail(CROSSPROB_INTERNAL_ERROR, "unknown error");
  }
}

void require(bool ok, const char* message) {
  if (!ok) throw crossprob::InvalidArgument(message);
}

crossprob_options resolve(const crossprob_options* options) {
  crossprob_options o;
  if (options) {
    o = *options;
  } else {
    crossprob_options_init(&o);
  }
  require(o.method >= CROSSPROB_METHOD_FFT && o.method <= CROSSPROB_METHOD_MONTE_CARLO, "unknown method");
  return o;
}

crossprob::EngineOptions engine_options(const crossprob_options& o) {
  crossprob::EngineOptions e;
  e.method = o.method == CROSSPROB_METHOD_DIRECT ? crossprob::Method::direct : crossprob::Method::fft;
  e.force_full = o.force_full != 0;
  e.fft_crossover = o.fft_crossover;
  return e;
}

unsigned worker_count(const crossprob_options& o) {
  if (o.threads > 0) return o.threads;
  return std::max(1u, std::thread::hardware_concurrency());
}

void require_monte_carlo_setup(const crossprob_options& o) {
  require(o.has_seed != 0, "monte-carlo needs an explicit seed");
  require(o.trials > 0, "monte-carlo needs a positive trial count");
}

void fill_exact(crossprob_result* out, const crossprob::NonCrossingResult& r, std::int64_t n) {
  out->probability = r.probability;
  out->log_probability = r.log_probability;
  out->n = n;
  out->checkpoints = r.checkpoints;
}

void fill_monte_carlo(crossprob_result* out, const crossprob::MonteCarloResult& r, const crossprob::BoundaryPair& bp) {
  out->probability = r.estimate;
  out->log_probability = r.estimate > 0.0 ? std::log(r.estimate) : -std::numeric_limits<double>::infinity();
  out->n = bp.n;
  out->checkpoints = crossprob::compile_schedule(bp).size();
  out->std_error = r.std_error;
  out->hits = r.hits;
  out->trials = r.trials;
}

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// ECDF probability by any method; the shared path behind ecdf and pvalue.
void ecdf_any(const crossprob::BoundaryPair& bp, const crossprob_options& o, crossprob_result* out) {
  *out = crossprob_result{};
  const auto start = Clock::now();
  switch (o.method) {
    case CROSSPROB_METHOD_BINOMIAL:
      fill_exact(out, crossprob::ecdf_noncrossing_binomial_recursion(bp), bp.n);
      break;
    case CROSSPROB_METHOD_MONTE_CARLO:
      require_monte_carlo_setup(o);
      fill_monte_carlo(out, crossprob::monte_carlo_ecdf(bp, o.trials, o.seed, worker_count(o)), bp);
      break;
    default:
      fill_exact(out, crossprob::ecdf_noncrossing(bp, engine_options(o)), bp.n);
      break;
  }
  out->wall_time_ms = elapsed_ms(start);
}

}  // namespace

extern "C" {

const char* crossprob_last_error(void) { return g_last_error.c_str(); }

const char* crossprob_version(void) { return "1.0.0"; }

void crossprob_options_init(crossprob_options* options) {
  if (!options) return;
  *options = crossprob_options{};
  options->method = CROSSPROB_METHOD_FFT;
  options->fft_crossover = crossprob::default_fft_crossover();
}

crossprob_status crossprob_method_from_name(const char* name, int* method) {
  return guarded([&] {
    require(name && method, "null argument");
    const std::string s = name;
    if (s == "fft") {
      *method = CROSSPROB_METHOD_FFT;
    } else if (s == "direct") {
      *method = CROSSPROB_METHOD_DIRECT;
    } else if (s == "binomial" || s == "binomial-oracle") {
      *method = CROSSPROB_METHOD_BINOMIAL;
    } else if (s == "monte-carlo") {
      *method = CROSSPROB_METHOD_MONTE_CARLO;
    } else {
      throw crossprob::InvalidArgument("unknown method '" + s + "'");
    }
  });
}

crossprob_status crossprob_boundary_create(int64_t n, const double* lower, size_t lower_count,
                                           int64_t upper_initial_cap, const double* upper, size_t upper_count,
                                           crossprob_boundary** out) {
  return guarded([&] {
    require(out != nullptr, "null output handle");
    require(lower_count == 0 || lower, "null lower crossing array");
    require(upper_count == 0 || upper, "null upper crossing array");
    crossprob::BoundaryPair bp;
    bp.n = n;
    if (lower_count) bp.lower_crossings.assign(lower, lower + lower_count);
    bp.upper_initial_cap = upper_initial_cap;
    if (upper_count) bp.upper_crossings.assign(upper, upper + upper_count);
    bp.validate();
    *out = new crossprob_boundary{std::move(bp)};
  });
}

crossprob_status crossprob_boundary_load(const char* path, crossprob_boundary** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = new crossprob_boundary{crossprob::load_boundary_file(path)};
  });
}

crossprob_status crossprob_boundary_parse(const char* text, crossprob_boundary** out) {
  return guarded([&] {
    require(text && out, "null argument");
    std::istringstream in(text);
    *out = new crossprob_boundary{crossprob::parse_boundary_text(in)};
  });
}

void crossprob_boundary_destroy(crossprob_boundary* boundary) { delete boundary; }

int64_t crossprob_boundary_n(const crossprob_boundary* boundary) { return boundary ? boundary->pair.n : 0; }

size_t crossprob_boundary_checkpoints(const crossprob_boundary* boundary) {
  return boundary ? crossprob::compile_schedule(boundary->pair).size() : 0;
}

crossprob_status crossprob_ecdf(const crossprob_boundary* boundary, const crossprob_options* options,
                                crossprob_result* out) {
  return guarded([&] {
    require(boundary && out, "null argument");
    ecdf_any(boundary->pair, resolve(options), out);
  });
}

crossprob_status crossprob_poisson(const crossprob_boundary* boundary, int64_t given_count,
                                   const crossprob_options* options, crossprob_result* out) {
  return guarded([&] {
    require(boundary && out, "null argument");
    const crossprob_options o = resolve(options);
    const crossprob::BoundaryPair& bp = boundary->pair;
    *out = crossprob_result{};
    const auto start = Clock::now();
    switch (o.method) {
      case CROSSPROB_METHOD_BINOMIAL: {
        require(given_count >= 0, "the binomial oracle needs a conditioning count");
        // Given k jumps, the jump times are k sorted uniforms.
        crossprob::BoundaryPair k_pair = bp;
        k_pair.n = given_count;
        require(given_count >= 1, "the binomial oracle needs a positive conditioning count");
        fill_exact(out, crossprob::ecdf_noncrossing_binomial_recursion(k_pair), bp.n);
        break;
      }
      case CROSSPROB_METHOD_MONTE_CARLO: {
        require_monte_carlo_setup(o);
        std::optional<std::int64_t> k;
        if (given_count >= 0) k = given_count;
        fill_monte_carlo(out, crossprob::monte_carlo_poisson(bp, k, o.trials, o.seed, worker_count(o)), bp);
        break;
      }
      default: {
        const crossprob::EngineOptions e = engine_options(o);
        fill_exact(out,
                   given_count >= 0 ? crossprob::poisson_noncrossing_conditional(bp, given_count, e)
                                    : crossprob::poisson_noncrossing_unconditional(bp, e),
                   bp.n);
        break;
      }
    }
    out->wall_time_ms = elapsed_ms(start);
  });
}

crossprob_status crossprob_statistic_create(const char* name, int64_t n, crossprob_statistic** out) {
  return guarded([&] {
    require(name && out, "null argument");
    *out = new crossprob_statistic{crossprob::StatisticSpec::from_name(name, n)};
  });
}

void crossprob_statistic_destroy(crossprob_statistic* statistic) { delete statistic; }

crossprob_status crossprob_statistic_compute(const crossprob_statistic* statistic, const double* samples, size_t count,
                                             double* value) {
  return guarded([&] {
    require(statistic && value && (count == 0 || samples), "null argument");
    std::vector<double> u(samples, samples + count);
    for (double x : u) require(!std::isnan(x), "samples contain NaN");
    std::sort(u.begin(), u.end());
    *value = crossprob::compute_statistic(statistic->spec, u);
  });
}

crossprob_status crossprob_statistic_boundary(const crossprob_statistic* statistic, double threshold,
                                              crossprob_boundary** out) {
  return guarded([&] {
    require(statistic && out, "null argument");
    *out = new crossprob_boundary{crossprob::boundaries_from_threshold(statistic->spec, threshold)};
  });
}

crossprob_status crossprob_pvalue(const crossprob_statistic* statistic, double threshold,
                                  const crossprob_options* options, crossprob_pvalue_result* out) {
  return guarded([&] {
    require(statistic && out, "null argument");
    const crossprob_options o = resolve(options);
    const crossprob::BoundaryPair bp = crossprob::boundaries_from_threshold(statistic->spec, threshold);
    crossprob_result r;
    ecdf_any(bp, o, &r);
    *out = crossprob_pvalue_result{};
    out->statistic = threshold;
    out->log_noncrossing = r.log_probability;
    out->p_value = std::clamp(-std::expm1(r.log_probability), 0.0, 1.0);
    out->n = bp.n;
    out->checkpoints = r.checkpoints;
    out->wall_time_ms = r.wall_time_ms;
    out->std_error = r.std_error;
  });
}

crossprob_status crossprob_critical_value(const crossprob_statistic* statistic, double alpha,
                                          const crossprob_options* options, double* threshold) {
  return guarded([&] {
    require(statistic && threshold, "null argument");
    const crossprob_options o = resolve(options);
    require(o.method == CROSSPROB_METHOD_FFT || o.method == CROSSPROB_METHOD_DIRECT,
            "critical values need an exact method (fft or direct)");
    *threshold = crossprob::critical_value(statistic->spec, alpha, engine_options(o));
  });
}

crossprob_status crossprob_bench_time(const crossprob_boundary* boundary, const crossprob_options* options,
                                      int repeats, double* median_ms, double* probability) {
  return guarded([&] {
    require(boundary && median_ms && probability, "null argument");
    const crossprob_options o = resolve(options);
    require(o.method == CROSSPROB_METHOD_FFT || o.method == CROSSPROB_METHOD_DIRECT, "bench times fft or direct");
    const crossprob::TimingResult t = crossprob::time_method(boundary->pair, engine_options(o), repeats);
    *median_ms = t.median_ms;
    *probability = t.probability;
  });
}

crossprob_status crossprob_fit_scaling(const double* ns, const double* times, size_t count,
                                       crossprob_scaling_fit* out) {
  return guarded([&] {
    require(out && (count == 0 || (ns && times)), "null argument");
    std::vector<std::pair<double, double>> points;
    for (size_t i = 0; i < count; ++i) points.emplace_back(ns[i], times[i]);
    const crossprob::ScalingFit fit = crossprob::fit_scaling(std::move(points));
    *out = crossprob_scaling_fit{fit.slope, fit.intercept, fit.r_squared, count};
  });
}

crossprob_status crossprob_bench_run(const crossprob_bench_config* config, crossprob_bench_report** out) {
  return guarded([&] {
    require(config && out, "null argument");
    require(config->n_count == 0 || config->ns, "null n list");
    crossprob::BenchConfig c;
    c.ns.assign(config->ns, config->ns + config->n_count);
    if (config->statistic) c.statistic = config->statistic;
    c.alpha = config->alpha;
    c.methods.clear();
    if (config->run_fft) c.methods.push_back(crossprob::Method::fft);
    if (config->run_direct) c.methods.push_back(crossprob::Method::direct);
    c.force_full = config->force_full != 0;
    c.repeats = config->repeats;
    auto* report = new crossprob_bench_report{crossprob::run_scaling_suite(c), {}};
    report->csv = crossprob::format_bench_csv(report->report);
    *out = report;
  });
}

const char* crossprob_bench_report_csv(const crossprob_bench_report* report) {
  return report ? report->csv.c_str() : "";
}

size_t crossprob_bench_report_fit_count(const crossprob_bench_report* report) {
  return report ? report->report.fits.size() : 0;
}

crossprob_status crossprob_bench_report_fit(const crossprob_bench_report* report, size_t index, const char** method,
                                            crossprob_scaling_fit* out) {
  return guarded([&] {
    require(report && method && out, "null argument");
    require(index < report->report.fits.size(), "fit index out of range");
    const auto& [name, fit] = report->report.fits[index];
    *method = name.c_str();
    *out = crossprob_scaling_fit{fit.slope, fit.intercept, fit.r_squared, fit.points.size()};
  });
}

void crossprob_bench_report_destroy(crossprob_bench_report* report) { delete report; }

}  // extern "C"
