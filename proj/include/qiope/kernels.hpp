#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "qiope/numerics.hpp"
#include "qiope/testfn.hpp"

namespace qiope::kernels {

using numerics::cplx;
using testfn::TestFunction;

// ---------------------------------------------------------------------------
// Spectral measures
// ---------------------------------------------------------------------------

// Positive measure on [0, inf) under the pairing
//   K(s') = (1/2pi) [ int density(p) e^{-i p s'} dp + sum_a w_a e^{-i loc_a s'} ]
// matching the global Fourier convention.
struct SpectralMeasure {
  std::function<double(double)> density;  // on [0, inf); may be empty
  struct Atom {
    double location;  // >= 0
    double weight;    // > 0
  };
  std::vector<Atom> atoms;
  // int_0^P dmu <= C (1+P)^N
  double growth_C = 1.0;
  double growth_N = 2.0;
  // optional closed form of int_0^P density(p) dp
  std::function<double(double)> cumulative;

  bool zero() const { return !density && atoms.empty(); }
};

// ---------------------------------------------------------------------------
// Kernels  K(s'-i0)
// ---------------------------------------------------------------------------

enum class PositiveType { certified_positive, certified_not, unknown };

struct Kernel {
  enum class Variant { Homogeneous, AnalyticClosure, SpectralForm, Smooth };
  Variant variant = Variant::Smooth;

  // Homogeneous: amplitude * (i(s'-i0))^beta
  double beta = 0.0;
  cplx amplitude = 0.0;

  // analytic continuation on the lower half-plane (Homogeneous fills this
  // too; it is the universal fallback path)
  std::function<cplx(cplx)> closure;

  // Fourier-side representation; present for every homogeneous kernel with
  // beta < 0 and for SpectralForm kernels
  std::optional<SpectralMeasure> spectral;

  // Smooth: an ordinary function on the real line
  std::function<cplx(double)> smooth;

  static Kernel homogeneous(double beta, cplx amplitude);
  static Kernel analytic(std::function<cplx(cplx)> F);
  static Kernel spectral_form(SpectralMeasure m);
  static Kernel smooth_fn(std::function<cplx(double)> C);
  static Kernel free_field_two_point(double mass);
};

// amplitude * (i(s'-i0))^beta; for beta < 0 attaches the spectral density
//   amplitude * 2pi p^{-beta-1} / Gamma(-beta) theta(p).
Kernel homogeneous_kernel(double beta, cplx amplitude);

// Free scalar field in 3+1 dimensions restricted to the time axis:
//   rho(omega) = sqrt(omega^2 - m^2) / (4 pi^2),  omega >= m.
double free_field_rho(double mass, double omega);
// The measure representing Delta_+(s') = int_m^inf rho(omega) e^{-i omega s'} domega.
SpectralMeasure free_field_spectral_density(double mass);

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

struct KnormGrid {
  double re_min = -1.0;
  double re_max = 1.0;
  int n_re = 201;
  double im_min = 1e-8;
  double im_max = 1.0;
  int n_im = 81;  // log-spaced
};

struct KnormEstimate {
  double value;       // lower bound on sup |F(z)| |Im z|^l
  cplx attained_at;   // grid point of the maximum
  bool diverging;     // maximum sits at the boundary and keeps growing
};

KnormEstimate knorm_estimate(const Kernel& K, double ell,
                             const KnormGrid& grid = {});

// 4^{l+2} (l+3) (1 + d^{-l-2}) * knorm * sob
double boundary_bound(int ell, double d, double knorm, double sob);

struct EvalResult {
  cplx value;
  double error_estimate;
  enum class Method { spectral_pairing, epsilon_extrapolation, direct } method;
};

class BoundaryEvalError : public std::runtime_error {
 public:
  BoundaryEvalError(const std::string& what, cplx best)
      : std::runtime_error(what), best_estimate(best) {}
  cplx best_estimate;
};

// lim_{y->0+} int f(x) F(x-iy) dx.  Spectral kernels pair exactly on the
// Fourier side; analytic closures go through the eps = 2^{-k}, k = 4..14
// extrapolation; smooth kernels integrate directly.
EvalResult eval_boundary(const Kernel& K, const TestFunction& f);

// Same, but forcing the epsilon-extrapolation path (used to cross-check
// the spectral pairing).
EvalResult eval_boundary_limit(const Kernel& K, const TestFunction& f);

// Quadratic form int ds ds' K(s') (conj(g) x g)(s, s') of the kernel; equals
// (1/2pi) int K~(p) |g~(p)|^2 dp for spectral kernels.
EvalResult kernel_quadratic_form(const Kernel& K, const TestFunction& g);

// Bochner-Schwartz certification.  Rule-based where a spectral
// representation decides; otherwise a numeric screen over `screen_count`
// seeded random complex test functions.
PositiveType is_positive_type(const Kernel& K, int screen_count = 50,
                              std::uint64_t seed = 12345);

// (1/2pi) (K1~ * K2~): pointwise convolution of densities and atoms.
// Both kernels must carry spectral forms.
SpectralMeasure kernel_product_spectrum(const Kernel& K1, const Kernel& K2);

// K(s' - i eps) for a spectral measure (exponentially damped pairing).
cplx spectral_eval_damped(const SpectralMeasure& m, double sp, double eps);

// (1/2pi) [ int density(p) w(p) dp + sum_a weight_a w(loc_a) ] with the
// p-integral truncated once |w| decays below tol; w must decay
// superpolynomially.  Used for all measure pairings.
numerics::QuadResult pair_measure(const SpectralMeasure& m,
                                  const std::function<cplx(double)>& w,
                                  double tol = 1e-10);

}  // namespace qiope::kernels
