#include "qiope/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace qiope::kernels {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

// int_0^inf p^a w(p) dp  with a > -1 and w decaying superpolynomially.
// The singular part on [0,1] is removed exactly by p = q^{1/(1+a)}.
numerics::QuadResult power_weighted_integral(
    double a, const std::function<cplx(double)>& w, double tol) {
  numerics::QuadResult head{};
  if (a < 0.0) {
    const double inv = 1.0 / (1.0 + a);
    head = numerics::integrate(
        [&](double q) { return w(std::pow(q, inv)) * inv; }, {0.0, 1.0}, tol);
  } else {
    head = numerics::integrate(
        [&](double p) { return std::pow(p, a) * w(p); }, {0.0, 1.0}, tol);
  }
  auto tail = numerics::integrate_to_decay(
      [&](double p) { return std::pow(p, a) * w(p); }, 1.0, tol, 2.0);
  return {head.value + tail.value, head.error_estimate + tail.error_estimate,
          head.evaluations + tail.evaluations};
}

// Pairing of a unit-amplitude homogeneous kernel (beta < 0) with weight w:
//   (1/2pi) int 2pi p^{-beta-1}/Gamma(-beta) w(p) dp.
numerics::QuadResult homogeneous_pairing(double beta,
                                         const std::function<cplx(double)>& w,
                                         double tol) {
  const double a = -beta - 1.0;
  const double gamma = std::tgamma(-beta);
  auto r = power_weighted_integral(a, w, tol * gamma);
  return {r.value / gamma, r.error_estimate / gamma, r.evaluations};
}

std::function<cplx(double)> sampled_transform(const TestFunction& f) {
  // w(p) = int e^{-ipt} f(t) dt from one fixed sampling of f
  auto s = std::make_shared<numerics::SampledFunction>(
      testfn::sample(f, f.support_radius() + 1e-9, 2048));
  return [s](double p) { return numerics::sampled_fourier(*s, p); };
}

cplx autocorrelation(const TestFunction& g, double sp) {
  // int conj(g(tau + sp/2)) g(tau - sp/2) dtau
  const double lo = std::max(g.support_lo() - 0.5 * sp, g.support_lo() + 0.5 * sp);
  const double hi = std::min(g.support_hi() - 0.5 * sp, g.support_hi() + 0.5 * sp);
  if (!(lo < hi)) return 0.0;
  auto r = numerics::integrate(
      [&](double tau) {
        return std::conj(g.value(tau + 0.5 * sp)) * g.value(tau - 0.5 * sp);
      },
      {lo, hi}, 1e-11);
  return r.value;
}

}  // namespace

// ---------------------------------------------------------------------------
// Construction
// ---------------------------------------------------------------------------

Kernel Kernel::homogeneous(double beta, cplx amplitude) {
  return homogeneous_kernel(beta, amplitude);
}

Kernel Kernel::analytic(std::function<cplx(cplx)> F) {
  Kernel k;
  k.variant = Kernel::Variant::AnalyticClosure;
  k.closure = std::move(F);
  return k;
}

Kernel Kernel::spectral_form(SpectralMeasure m) {
  Kernel k;
  k.variant = Kernel::Variant::SpectralForm;
  k.amplitude = 1.0;
  k.spectral = std::move(m);
  return k;
}

Kernel Kernel::smooth_fn(std::function<cplx(double)> C) {
  Kernel k;
  k.variant = Kernel::Variant::Smooth;
  k.smooth = std::move(C);
  return k;
}

Kernel Kernel::free_field_two_point(double mass) {
  return spectral_form(free_field_spectral_density(mass));
}

Kernel homogeneous_kernel(double beta, cplx amplitude) {
  Kernel k;
  k.variant = Kernel::Variant::Homogeneous;
  k.beta = beta;
  k.amplitude = amplitude;
  k.closure = [beta, amplitude](cplx z) {
    return amplitude * std::pow(cplx(0.0, 1.0) * z, beta);
  };
  if (beta < 0.0 && amplitude != cplx(0.0)) {
    // unit-amplitude measure; the complex amplitude multiplies in pairings
    SpectralMeasure m;
    const double a = -beta - 1.0;
    const double gamma = std::tgamma(-beta);
    m.density = [a, gamma](double p) {
      return p <= 0.0 ? 0.0 : kTwoPi * std::pow(p, a) / gamma;
    };
    m.cumulative = [a, gamma](double P) {
      return P <= 0.0 ? 0.0 : kTwoPi * std::pow(P, a + 1.0) / ((a + 1.0) * gamma);
    };
    m.growth_C = kTwoPi / ((a + 1.0) * gamma) + 1.0;
    m.growth_N = a + 1.0;
    k.spectral = std::move(m);
  } else if (amplitude == cplx(0.0)) {
    k.spectral = SpectralMeasure{};  // zero measure
  }
  return k;
}

double free_field_rho(double mass, double omega) {
  if (mass < 0.0) throw std::invalid_argument("free_field_rho: mass >= 0");
  if (omega <= mass) return 0.0;
  return std::sqrt(omega * omega - mass * mass) / (4.0 * M_PI * M_PI);
}

SpectralMeasure free_field_spectral_density(double mass) {
  if (mass < 0.0)
    throw std::invalid_argument("free_field_spectral_density: mass >= 0");
  SpectralMeasure m;
  m.density = [mass](double w) { return kTwoPi * free_field_rho(mass, w); };
  m.cumulative = [mass](double P) {
    if (P <= mass) return 0.0;
    const double s = std::sqrt(P * P - mass * mass);
    if (mass == 0.0) return P * P / (4.0 * M_PI);
    return (P * s - mass * mass * std::log((P + s) / mass)) / (4.0 * M_PI);
  };
  m.growth_C = 1.0;
  m.growth_N = 2.0;
  return m;
}

// ---------------------------------------------------------------------------
// knorm and the boundary-value constant
// ---------------------------------------------------------------------------

KnormEstimate knorm_estimate(const Kernel& K, double ell,
                             const KnormGrid& grid) {
  if (!K.closure)
    throw std::invalid_argument(
        "knorm_estimate: kernel has no analytic closure");
  if (!(ell > 0)) throw std::invalid_argument("knorm_estimate: ell > 0");

  const double log_lo = std::log(grid.im_min);
  const double log_hi = std::log(grid.im_max);
  double best = 0.0;
  cplx best_z = 0.0;
  std::vector<double> row_max(grid.n_im, 0.0);
  for (int i = 0; i < grid.n_im; ++i) {
    const double y = std::exp(log_lo + (log_hi - log_lo) * double(i) /
                                            double(grid.n_im - 1));
    for (int j = 0; j < grid.n_re; ++j) {
      const double x =
          grid.re_min + (grid.re_max - grid.re_min) * double(j) /
                            double(std::max(1, grid.n_re - 1));
      const cplx z(x, -y);
      const cplx fz = K.closure(z);
      if (!std::isfinite(fz.real()) || !std::isfinite(fz.imag()))
        throw std::runtime_error("knorm_estimate: overflow at z = (" +
                                 std::to_string(x) + ", " + std::to_string(-y) +
                                 ")");
      const double v = std::abs(fz) * std::pow(y, ell);
      row_max[i] = std::max(row_max[i], v);
      if (v > best) {
        best = v;
        best_z = z;
      }
    }
  }
  // Divergence: maximum on the smallest-Im row and still growing toward it.
  bool diverging = false;
  if (grid.n_im >= 6 &&
      std::abs(-best_z.imag() - grid.im_min) < 1e-6 * grid.im_min) {
    diverging = true;
    for (int i = 0; i + 1 < 6; ++i) {
      if (!(row_max[i] > 2.0 * row_max[i + 1])) diverging = false;
    }
  }
  return {best, best_z, diverging};
}

double boundary_bound(int ell, double d, double knorm, double sob) {
  if (ell < 0 || !(d > 0) || knorm < 0 || sob < 0)
    throw std::invalid_argument("boundary_bound: bad arguments");
  return std::pow(4.0, ell + 2) * double(ell + 3) *
         (1.0 + std::pow(d, -double(ell + 2))) * knorm * sob;
}

// ---------------------------------------------------------------------------
// Boundary evaluation
// ---------------------------------------------------------------------------

numerics::QuadResult pair_measure(const SpectralMeasure& m,
                                  const std::function<cplx(double)>& w,
                                  double tol) {
  cplx acc = 0.0;
  double err = 0.0;
  std::size_t evals = 0;
  if (m.density) {
    auto r = numerics::integrate_to_decay(
        [&](double p) { return m.density(p) * w(p); }, 0.0, tol, 1.0);
    acc += r.value;
    err += r.error_estimate;
    evals += r.evaluations;
  }
  for (const auto& atom : m.atoms) {
    acc += atom.weight * w(atom.location);
    ++evals;
  }
  return {acc / kTwoPi, err / kTwoPi, evals};
}

cplx spectral_eval_damped(const SpectralMeasure& m, double sp, double eps) {
  if (!(eps > 0)) throw std::invalid_argument("spectral_eval_damped: eps > 0");
  auto r = pair_measure(
      m, [&](double p) { return std::exp(cplx(-eps * p, -sp * p)); }, 1e-10);
  return r.value;
}

namespace {

EvalResult spectral_pairing(const Kernel& K, const TestFunction& f) {
  auto w = sampled_transform(f);  // w(p) = f~(-p)
  if (K.variant == Kernel::Variant::Homogeneous) {
    if (K.amplitude == cplx(0.0)) return {0.0, 0.0, EvalResult::Method::spectral_pairing};
    auto r = homogeneous_pairing(K.beta, w, 1e-11);
    return {K.amplitude * r.value, std::abs(K.amplitude) * r.error_estimate,
            EvalResult::Method::spectral_pairing};
  }
  auto r = pair_measure(*K.spectral, w, 1e-11);
  return {r.value, r.error_estimate, EvalResult::Method::spectral_pairing};
}

// eps-regularized limit along y = 2^{-k}, k = 4..14.
EvalResult closure_limit(const std::function<cplx(double, double)>& g_of_y) {
  std::vector<std::pair<double, cplx>> pairs;
  double qerr = 0.0;
  for (int k = 4; k <= 14; ++k) {
    const double y = std::pow(2.0, -k);
    double e = 0.0;
    const cplx v = g_of_y(y, e);
    qerr = std::max(qerr, e);
    pairs.emplace_back(y, v);
  }
  auto ex = numerics::extrapolate_to_zero(pairs);
  if (!ex.converged)
    throw BoundaryEvalError(
        "eval_boundary: epsilon extrapolation did not converge", ex.limit);
  return {ex.limit, ex.error_estimate + qerr,
          EvalResult::Method::epsilon_extrapolation};
}

}  // namespace

EvalResult eval_boundary(const Kernel& K, const TestFunction& f) {
  if (!f.compact())
    throw std::invalid_argument("eval_boundary: f must be compactly supported");
  switch (K.variant) {
    case Kernel::Variant::Homogeneous:
      if (K.spectral && K.beta < 0.0) return spectral_pairing(K, f);
      if (K.amplitude == cplx(0.0))
        return {0.0, 0.0, EvalResult::Method::spectral_pairing};
      return eval_boundary_limit(K, f);
    case Kernel::Variant::SpectralForm:
      return spectral_pairing(K, f);
    case Kernel::Variant::AnalyticClosure:
      return eval_boundary_limit(K, f);
    case Kernel::Variant::Smooth: {
      auto r = numerics::integrate(
          [&](double sp) { return K.smooth(sp) * f.value(sp); },
          {f.support_lo(), f.support_hi()}, 1e-11);
      return {r.value, r.error_estimate, EvalResult::Method::direct};
    }
  }
  throw std::logic_error("eval_boundary: unknown variant");
}

EvalResult eval_boundary_limit(const Kernel& K, const TestFunction& f) {
  if (K.variant == Kernel::Variant::Smooth) return eval_boundary(K, f);
  if (K.closure) {
    return closure_limit([&](double y, double& err) {
      auto r = numerics::integrate(
          [&](double x) { return f.value(x) * K.closure(cplx(x, -y)); },
          {f.support_lo(), f.support_hi()}, 1e-11);
      err = r.error_estimate;
      return r.value;
    });
  }
  if (K.spectral) {
    auto w = sampled_transform(f);
    return closure_limit([&](double y, double& err) {
      auto r = pair_measure(
          *K.spectral,
          [&](double p) { return std::exp(-y * p) * w(p); }, 1e-11);
      err = r.error_estimate;
      return K.variant == Kernel::Variant::Homogeneous ? K.amplitude * r.value
                                                       : r.value;
    });
  }
  throw std::invalid_argument("eval_boundary_limit: no usable representation");
}

// ---------------------------------------------------------------------------
// Quadratic form and positivity
// ---------------------------------------------------------------------------

EvalResult kernel_quadratic_form(const Kernel& K, const TestFunction& g) {
  // |g~(p)|^2 from one fixed sampling of g
  auto s = std::make_shared<numerics::SampledFunction>(
      testfn::sample(g, g.support_radius() + 1e-9, 2048));
  auto gt2 = [s](double p) {
    // g~(p) = int e^{ipt} g(t) dt
    return cplx(std::norm(numerics::sampled_fourier(*s, -p)), 0.0);
  };
  switch (K.variant) {
    case Kernel::Variant::Homogeneous: {
      if (K.amplitude == cplx(0.0) || !K.spectral)
        break;  // beta >= 0: fall through to the boundary-value route
      auto r = homogeneous_pairing(K.beta, gt2, 1e-11);
      return {K.amplitude * r.value, std::abs(K.amplitude) * r.error_estimate,
              EvalResult::Method::spectral_pairing};
    }
    case Kernel::Variant::SpectralForm: {
      auto r = pair_measure(*K.spectral, gt2, 1e-11);
      return {r.value, r.error_estimate, EvalResult::Method::spectral_pairing};
    }
    default:
      break;
  }
  // Boundary-value route through the autocorrelation
  //   A(s') = int conj(g(tau+s'/2)) g(tau-s'/2) dtau,  Q = int K(s') A(s') ds'.
  const double r2 = 2.0 * g.support_radius();
  if (K.variant == Kernel::Variant::Smooth) {
    auto r = numerics::integrate(
        [&](double sp) { return K.smooth(sp) * autocorrelation(g, sp); },
        {-r2, r2}, 1e-9);
    return {r.value, r.error_estimate, EvalResult::Method::direct};
  }
  if (!K.closure)
    throw std::invalid_argument("kernel_quadratic_form: no representation");
  return closure_limit([&](double y, double& err) {
    auto r = numerics::integrate(
        [&](double sp) {
          return autocorrelation(g, sp) * K.closure(cplx(sp, -y));
        },
        {-r2, r2}, 1e-9);
    err = r.error_estimate;
    return r.value;
  });
}

PositiveType is_positive_type(const Kernel& K, int screen_count,
                              std::uint64_t seed) {
  if (K.variant == Kernel::Variant::Homogeneous) {
    if (K.amplitude == cplx(0.0)) return PositiveType::certified_positive;
    if (K.beta < 0.0 && K.amplitude.imag() == 0.0 && K.amplitude.real() > 0.0)
      return PositiveType::certified_positive;  // density manifestly >= 0
  }
  if (K.variant == Kernel::Variant::SpectralForm && K.spectral) {
    const auto& m = *K.spectral;
    if (m.zero()) return PositiveType::certified_positive;
    bool ok = true;
    if (m.density) {
      for (int i = 0; i <= 400 && ok; ++i) {
        const double p = 1e-6 * std::pow(10.0, 8.0 * double(i) / 400.0);
        if (m.density(p) < -1e-12) ok = false;
      }
    }
    for (const auto& a : m.atoms)
      if (!(a.weight > 0.0) || a.location < 0.0) ok = false;
    if (ok) return PositiveType::certified_positive;
    return PositiveType::certified_not;
  }

  // Numeric screen over seeded random complex test functions.
  std::mt19937_64 rng(seed);
  std::vector<cplx> values(screen_count);
  std::vector<double> gscale(screen_count);
  for (int i = 0; i < screen_count; ++i) {
    auto g = testfn::random_bump(rng, 1.0, true);
    values[i] = kernel_quadratic_form(K, g).value;
    gscale[i] = numerics::integrate(
                    [&](double t) { return std::norm(g.value(t)); },
                    {g.support_lo(), g.support_hi()}, 1e-10)
                    .value.real();
  }
  double scale = 1.0;
  for (int i = 0; i < screen_count; ++i)
    scale = std::max({scale, std::abs(values[i]), gscale[i]});
  for (int i = 0; i < screen_count; ++i) {
    if (values[i].real() < -1e-8 * scale || std::abs(values[i].imag()) > 1e-8 * scale)
      return PositiveType::certified_not;
  }
  return PositiveType::unknown;
}

// ---------------------------------------------------------------------------
// Products
// ---------------------------------------------------------------------------

SpectralMeasure kernel_product_spectrum(const Kernel& K1, const Kernel& K2) {
  if (!K1.spectral || !K2.spectral)
    throw std::invalid_argument(
        "kernel_product_spectrum: both kernels need spectral forms");
  auto fold_amp = [](const Kernel& K) {
    if (K.variant != Kernel::Variant::Homogeneous) return 1.0;
    if (K.amplitude.imag() != 0.0)
      throw std::invalid_argument(
          "kernel_product_spectrum: complex amplitude has no measure form");
    return K.amplitude.real();
  };
  const double a1 = fold_amp(K1), a2 = fold_amp(K2);
  const SpectralMeasure m1 = *K1.spectral;
  const SpectralMeasure m2 = *K2.spectral;

  SpectralMeasure out;
  out.growth_C = m1.growth_C * m2.growth_C;
  out.growth_N = m1.growth_N + m2.growth_N + 1.0;

  for (const auto& x : m1.atoms)
    for (const auto& y : m2.atoms)
      out.atoms.push_back({x.location + y.location,
                           a1 * a2 * x.weight * y.weight / kTwoPi});

  const bool d1 = bool(m1.density), d2 = bool(m2.density);
  if (d1 || d2) {
    out.density = [m1, m2, a1, a2, d1, d2](double p) {
      if (p <= 0.0) return 0.0;
      double acc = 0.0;
      if (d1 && d2) {
        // substitute q = p u to keep endpoint behaviour mild
        auto r = numerics::integrate(
            [&](double u) {
              return m1.density(p * u) * m2.density(p * (1.0 - u)) * p;
            },
            {0.0, 1.0}, 1e-11 * std::max(1.0, p));
        acc += r.value.real();
      }
      if (d2)
        for (const auto& x : m1.atoms)
          if (p > x.location) acc += x.weight * m2.density(p - x.location);
      if (d1)
        for (const auto& y : m2.atoms)
          if (p > y.location) acc += y.weight * m1.density(p - y.location);
      return a1 * a2 * acc / kTwoPi;
    };
  }
  return out;
}

}  // namespace qiope::kernels
