/* C interface to the crossprob library. All functions are thread-safe;
 * handles are not shared-mutable (concurrent reads of one handle are fine). */
#ifndef CROSSPROB_H
#define CROSSPROB_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(CROSSPROB_BUILDING)
#    define CROSSPROB_API __declspec(dllexport)
#  else
#    define CROSSPROB_API __declspec(dllimport)
#  endif
#else
#  define CROSSPROB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

#define CROSSPROB_UNBOUNDED_CAP INT64_MAX

typedef enum crossprob_status {
  CROSSPROB_OK = 0,
  CROSSPROB_INVALID_ARGUMENT = 1,
  CROSSPROB_NUMERICAL_FAILURE = 2,
  CROSSPROB_INTERNAL_ERROR = 3
} crossprob_status;

typedef enum crossprob_method {
  CROSSPROB_METHOD_FFT = 0,
  CROSSPROB_METHOD_DIRECT = 1,
  CROSSPROB_METHOD_BINOMIAL = 2,   /* binomial-recursion oracle */
  CROSSPROB_METHOD_MONTE_CARLO = 3
} crossprob_method;

typedef struct crossprob_boundary crossprob_boundary;
typedef struct crossprob_statistic crossprob_statistic;
typedef struct crossprob_bench_report crossprob_bench_report;

typedef struct crossprob_options {
  int method;              /* crossprob_method */
  int force_full;          /* full-range propagation (fft/direct only) */
  size_t fft_crossover;    /* direct below this band width */
  uint64_t trials;         /* monte-carlo */
  uint64_t seed;           /* monte-carlo */
  int has_seed;            /* monte-carlo refuses to run without a seed */
  unsigned threads;        /* monte-carlo workers, 0 = hardware concurrency */
} crossprob_options;

typedef struct crossprob_result {
  double probability;
  double log_probability;  /* -inf when probability is exactly zero */
  int64_t n;
  size_t checkpoints;
  double wall_time_ms;
  double std_error;        /* monte-carlo only, else 0 */
  uint64_t hits;           /* monte-carlo only */
  uint64_t trials;         /* monte-carlo only */
} crossprob_result;

typedef struct crossprob_pvalue_result {
  double statistic;
  double p_value;
  double log_noncrossing;  /* log(1 - p_value), accurate when p_value is tiny */
  int64_t n;
  size_t checkpoints;
  double wall_time_ms;
  double std_error;        /* monte-carlo only */
} crossprob_pvalue_result;

typedef struct crossprob_scaling_fit {
  double slope;
  double intercept;
  double r_squared;
  size_t points;
} crossprob_scaling_fit;

typedef struct crossprob_bench_config {
  const int64_t* ns;
  size_t n_count;
  const char* statistic;   /* NULL means ks_two_sided */
  double alpha;
  int run_fft;
  int run_direct;
  int force_full;
  int repeats;             /* >= 3 */
} crossprob_bench_config;

/* Message for the last failing call on this thread; empty if none. */
CROSSPROB_API const char* crossprob_last_error(void);
CROSSPROB_API const char* crossprob_version(void);

/* fft, band-limited, crossover from CROSSPROB_FFT_CROSSOVER (default 64). */
CROSSPROB_API void crossprob_options_init(crossprob_options* options);
/* Accepts fft, direct, binomial, binomial-oracle, monte-carlo. */
CROSSPROB_API crossprob_status crossprob_method_from_name(const char* name, int* method);

/* Boundary handles. Crossing times must be sorted and lie in [0, 1]. */
CROSSPROB_API crossprob_status crossprob_boundary_create(int64_t n, const double* lower, size_t lower_count,
                                                         int64_t upper_initial_cap, const double* upper,
                                                         size_t upper_count, crossprob_boundary** out);
CROSSPROB_API crossprob_status crossprob_boundary_load(const char* path, crossprob_boundary** out);
CROSSPROB_API crossprob_status crossprob_boundary_parse(const char* text, crossprob_boundary** out);
CROSSPROB_API void crossprob_boundary_destroy(crossprob_boundary* boundary);
CROSSPROB_API int64_t crossprob_boundary_n(const crossprob_boundary* boundary);
CROSSPROB_API size_t crossprob_boundary_checkpoints(const crossprob_boundary* boundary);

/* ECDF of n uniforms (n taken from the boundary). */
CROSSPROB_API crossprob_status crossprob_ecdf(const crossprob_boundary* boundary, const crossprob_options* options,
                                              crossprob_result* out);
/* Poisson process of intensity n; given_count < 0 means unconditional. */
CROSSPROB_API crossprob_status crossprob_poisson(const crossprob_boundary* boundary, int64_t given_count,
                                                 const crossprob_options* options, crossprob_result* out);

/* Statistics: ks_two_sided, ks_plus, ks_minus, berk_jones_two_sided,
 * berk_jones_one_sided, higher_criticism. */
CROSSPROB_API crossprob_status crossprob_statistic_create(const char* name, int64_t n, crossprob_statistic** out);
CROSSPROB_API void crossprob_statistic_destroy(crossprob_statistic* statistic);
/* Samples need not be sorted; they must lie in [0, 1] and number n. */
CROSSPROB_API crossprob_status crossprob_statistic_compute(const crossprob_statistic* statistic, const double* samples,
                                                           size_t count, double* value);
CROSSPROB_API crossprob_status crossprob_statistic_boundary(const crossprob_statistic* statistic, double threshold,
                                                            crossprob_boundary** out);
CROSSPROB_API crossprob_status crossprob_pvalue(const crossprob_statistic* statistic, double threshold,
                                                const crossprob_options* options, crossprob_pvalue_result* out);
/* fft or direct only. */
CROSSPROB_API crossprob_status crossprob_critical_value(const crossprob_statistic* statistic, double alpha,
                                                        const crossprob_options* options, double* threshold);

/* Median wall time over `repeats` (>= 3) ECDF evaluations after a warm-up. */
CROSSPROB_API crossprob_status crossprob_bench_time(const crossprob_boundary* boundary,
                                                    const crossprob_options* options, int repeats,
                                                    double* median_ms, double* probability);
CROSSPROB_API crossprob_status crossprob_fit_scaling(const double* ns, const double* times, size_t count,
                                                     crossprob_scaling_fit* out);
CROSSPROB_API crossprob_status crossprob_bench_run(const crossprob_bench_config* config,
                                                   crossprob_bench_report** out);
/* CSV with header n,method,wall_time_ms,probability,checkpoints. */
CROSSPROB_API const char* crossprob_bench_report_csv(const crossprob_bench_report* report);
CROSSPROB_API size_t crossprob_bench_report_fit_count(const crossprob_bench_report* report);
CROSSPROB_API crossprob_status crossprob_bench_report_fit(const crossprob_bench_report* report, size_t index,
                                                          const char** method, crossprob_scaling_fit* out);
CROSSPROB_API void crossprob_bench_report_destroy(crossprob_bench_report* report);

#ifdef __cplusplus
}
#endif

#endif
