#include "fft_plan.hpp"

#include <map>
#include <memory>
#include <mutex>

namespace crossprob::detail {

namespace {

// Banded propagation touches many distinct small sizes, where planning
// would cost more than it saves; full-range propagation reuses a few large
// ones.
constexpr std::size_t kMeasureFrom = std::size_t{1} << 14;

class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [size, plan] : plans_) {
      fftw_destroy_plan(plan->forward);
      fftw_destroy_plan(plan->backward);
    }
  }

  const RealFftPlan& get(std::size_t size) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = plans_.find(size);
    if (it != plans_.end()) return *it->second;

    const unsigned flags = size >= kMeasureFrom ? FFTW_MEASURE : FFTW_ESTIMATE;
    double* in = fftw_alloc_real(size);
    fftw_complex* out = fftw_alloc_complex(size / 2 + 1);
    auto plan = std::make_unique<RealFftPlan>();
    plan->size = size;
    const int len = static_cast<int>(size);
    plan->forward = fftw_plan_dft_r2c_1d(len, in, out, flags);
    plan->backward = fftw_plan_dft_c2r_1d(len, out, in, flags);
    fftw_free(in);
    fftw_free(out);
    return *plans_.emplace(size, std::move(plan)).first->second;
  }

 private:
  std::mutex mutex_;
  std::map<std::size_t, std::unique_ptr<RealFftPlan>> plans_;
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

class Workspace {
 public:
  ~Workspace() { release(); }

  FftWorkspace& reserve(std::size_t size) {
    if (size > capacity_) {
      release();
      capacity_ = size;
      ws_.signal_a = fftw_alloc_real(size);
      ws_.signal_b = fftw_alloc_real(size);
      ws_.spectrum_a = fftw_alloc_complex(size / 2 + 1);
      ws_.spectrum_b = fftw_alloc_complex(size / 2 + 1);
    }
    return ws_;
  }

 private:
  void release() {
    fftw_free(ws_.signal_a);
    fftw_free(ws_.signal_b);
    fftw_free(ws_.spectrum_a);
    fftw_free(ws_.spectrum_b);
    ws_ = {};
    capacity_ = 0;
  }

  std::size_t capacity_ = 0;
  FftWorkspace ws_;
};

}  // namespace

const RealFftPlan& real_fft_plan(std::size_t size) { return plan_cache().get(size); }

FftWorkspace& thread_workspace(std::size_t size) {
  thread_local Workspace workspace;
  return workspace.reserve(size);
}

}  // namespace crossprob::detail
