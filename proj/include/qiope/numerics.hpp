#pragma once

#include <complex>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qiope::numerics {

using cplx = std::complex<double>;

// ---------------------------------------------------------------------------
// Quadrature
// ---------------------------------------------------------------------------

// Thrown when the adaptive integrator cannot reach the requested tolerance.
// Carries the best estimate obtained so far.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, cplx best, double err)
      : std::runtime_error(what), best_estimate(best), error_estimate(err) {}
  cplx best_estimate;
  double error_estimate;
};

struct Interval {
  double a;
  double b;
};

struct QuadResult {
  cplx value;
  double error_estimate;
  std::size_t evaluations;
};

// Adaptive bisection with an embedded Gauss(7)/Kronrod(15) pair.
// Throws QuadratureError (with best estimate) if the absolute error
// estimate cannot be brought below tol.
QuadResult integrate_impl(const std::function<cplx(double)>& f, Interval iv,
                          double tol);

template <class F>
QuadResult integrate(F&& f, Interval iv, double tol = 1e-10) {
  return integrate_impl(
      [g = std::forward<F>(f)](double t) { return cplx(g(t)); }, iv, tol);
}

// Integrates f over [a, inf): marches panels of geometrically growing
// length until two consecutive panels contribute less than tol relative
// to the accumulated value.  Throws QuadratureError if no decay is seen.
QuadResult integrate_to_decay(const std::function<cplx(double)>& f, double a,
                              double tol = 1e-10, double initial_len = 1.0);

// ---------------------------------------------------------------------------
// Sampled data and spectra
// ---------------------------------------------------------------------------

// Uniformly sampled function.  Values must vanish (|v| <= 1e-12) at and
// beyond the declared support boundary.
struct SampledFunction {
  std::vector<cplx> samples;
  double grid_start = 0.0;
  double grid_step = 0.0;
  double support_radius = 0.0;

  SampledFunction() = default;
  SampledFunction(std::vector<cplx> s, double start, double step,
                  double support);

  double t(std::size_t i) const { return grid_start + grid_step * double(i); }
  std::size_t size() const { return samples.size(); }
};

// Frequency-side data under the fixed convention
//   g~(u) = int dt e^{iut} g(t),   inverse carries 1/(2pi).
struct Spectrum {
  std::vector<double> frequencies;  // strictly increasing
  std::vector<cplx> amplitudes;
  bool aliasing_warning = false;
};

inline constexpr int kDefaultGridPoints = 4096;
inline constexpr int kDefaultPaddingFactor = 4;

// DFT realization of the fixed convention, zero-padded by padding_factor.
Spectrum spectral_transform(const SampledFunction& f, int padding_factor);

// Inverse of spectral_transform back onto the original grid layout.
SampledFunction inverse_spectral_transform(const Spectrum& spec,
                                           double grid_start, double grid_step,
                                           std::size_t n,
                                           double support_radius);

// Evaluates int dt e^{-ipt} f(t) from the samples (plain Riemann sum; the
// integrand vanishes with all derivatives at the grid ends, so the sum is
// spectrally accurate).  This is g~(-p) of the sampled data.
cplx sampled_fourier(const SampledFunction& f, double p);

// ---------------------------------------------------------------------------
// Extrapolation
// ---------------------------------------------------------------------------

struct ExtrapolationResult {
  cplx limit;
  double error_estimate;
  bool converged;  // false: non-monotone residuals, raw smallest-h value used
};

// Richardson-style limit h -> 0+ by Neville polynomial extrapolation.
// Requires >= 3 pairs with strictly decreasing h > 0.
ExtrapolationResult extrapolate_to_zero(
    std::span<const std::pair<double, cplx>> pairs);

}  // namespace qiope::numerics
