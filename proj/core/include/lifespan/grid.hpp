#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

namespace lifespan {

using cplx = std::complex<double>;

/// Uniform periodic grid on [-L, L) with N (even) points and its DFT-dual
/// angular frequencies.
class Grid1D {
 public:
  Grid1D(double half_width, std::size_t n_points);

  double half_width() const noexcept { return half_width_; }
  std::size_t size() const noexcept { return n_; }
  double dx() const noexcept { return 2.0 * half_width_ / static_cast<double>(n_); }
  double x(std::size_t j) const noexcept {
    return -half_width_ + static_cast<double>(j) * dx();
  }

  /// Spacing of the dual frequencies, pi / L.
  double dxi() const noexcept { return std::numbers::pi / half_width_; }
  double nyquist() const noexcept { return std::numbers::pi / dx(); }

  /// Frequency of FFT bin k (0, 1, ..., N/2-1, -N/2, ..., -1) times dxi.
  double fft_frequency(std::size_t k) const noexcept {
    const auto n = static_cast<std::ptrdiff_t>(n_);
    auto kk = static_cast<std::ptrdiff_t>(k);
    if (kk >= n / 2) kk -= n;
    return static_cast<double>(kk) * dxi();
  }

  /// Frequency at ascending index k, spanning [-pi/dx, pi/dx).
  double frequency(std::size_t k) const noexcept {
    return (static_cast<double>(k) - static_cast<double>(n_ / 2)) * dxi();
  }

  std::vector<double> positions() const;

  friend bool operator==(const Grid1D&, const Grid1D&) = default;

 private:
  double half_width_;
  std::size_t n_;
};

/// Samples of u(t, .) on a grid.
struct ComplexField {
  Grid1D grid;
  double time = 0.0;
  std::vector<cplx> values;

  ComplexField(Grid1D g, double t = 0.0);
  ComplexField(Grid1D g, double t, std::vector<cplx> v);

  std::size_t size() const noexcept { return values.size(); }
  bool all_finite() const noexcept;

  /// Throws NonFiniteError naming `where` if any sample is NaN/Inf.
  void require_finite(const char* where) const;
};

/// Samples of the Fourier transform on the dual grid, in ascending frequency
/// order (index k <-> Grid1D::frequency(k)).
struct Spectrum {
  Grid1D grid;
  std::vector<cplx> values;

  double xi(std::size_t k) const noexcept { return grid.frequency(k); }
};

ComplexField operator+(const ComplexField& a, const ComplexField& b);
ComplexField operator-(const ComplexField& a, const ComplexField& b);
ComplexField operator*(cplx s, const ComplexField& a);

}  // namespace lifespan
