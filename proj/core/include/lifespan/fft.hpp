#pragma once

#include <cstddef>
#include <memory>
#include <span>

#include "lifespan/grid.hpp"

namespace lifespan {

/// Unnormalised complex DFT of a fixed length. Instances are immutable and
/// may be executed concurrently from several threads.
class FftPlan {
 public:
  /// Shared plan for length n, created once per process.
  static std::shared_ptr<const FftPlan> for_size(std::size_t n);

  ~FftPlan();
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  std::size_t size() const noexcept { return n_; }

  /// out_k = sum_j in_j exp(-2 pi i jk/N). `in` and `out` must not alias.
  void forward(std::span<const cplx> in, std::span<cplx> out) const;
  /// out_j = sum_k in_k exp(+2 pi i jk/N), no 1/N factor.
  void backward(std::span<const cplx> in, std::span<cplx> out) const;

 private:
  explicit FftPlan(std::size_t n);

  std::size_t n_;
  void* forward_plan_ = nullptr;
  void* backward_plan_ = nullptr;
};

}  // namespace lifespan
