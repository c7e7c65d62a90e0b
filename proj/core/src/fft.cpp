#include "lifespan/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <vector>

#include "lifespan/error.hpp"

namespace lifespan {
namespace {

// FFTW's planner is not re-entrant; execution through the new-array API is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

FftPlan::FftPlan(std::size_t n) : n_(n) {
  std::vector<cplx> a(n), b(n);
  const int len = static_cast<int>(n);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  forward_plan_ = fftw_plan_dft_1d(len, as_fftw(a.data()), as_fftw(b.data()), FFTW_FORWARD, flags);
  backward_plan_ = fftw_plan_dft_1d(len, as_fftw(a.data()), as_fftw(b.data()), FFTW_BACKWARD, flags);
  if (forward_plan_ == nullptr || backward_plan_ == nullptr) {
    throw Error("FFTW failed to create a plan of length " + std::to_string(n));
  }
}

FftPlan::~FftPlan() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(backward_plan_));
}

std::shared_ptr<const FftPlan> FftPlan::for_size(std::size_t n) {
  if (n == 0) throw InvalidArgument("FFT length must be positive");
  std::lock_guard lock(planner_mutex());
  static std::map<std::size_t, std::shared_ptr<const FftPlan>> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::shared_ptr<const FftPlan> plan(new FftPlan(n));
  cache.emplace(n, plan);
  return plan;
}

void FftPlan::forward(std::span<const cplx> in, std::span<cplx> out) const {
  if (in.size() != n_ || out.size() != n_) throw InvalidArgument("FFT length mismatch");
  // Out-of-place c2c transforms preserve their input.
  fftw_execute_dft(static_cast<fftw_plan>(forward_plan_), as_fftw(const_cast<cplx*>(in.data())),
                   as_fftw(out.data()));
}

void FftPlan::backward(std::span<const cplx> in, std::span<cplx> out) const {
  if (in.size() != n_ || out.size() != n_) throw InvalidArgument("FFT length mismatch");
  fftw_execute_dft(static_cast<fftw_plan>(backward_plan_), as_fftw(const_cast<cplx*>(in.data())),
                   as_fftw(out.data()));
}

}  // namespace lifespan
