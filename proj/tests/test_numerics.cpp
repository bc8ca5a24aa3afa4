#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "qiope/numerics.hpp"
#include "qiope/testfn.hpp"

using namespace qiope;
using numerics::cplx;

namespace {

double bump(double t) {
  return std::abs(t) < 1.0 ? std::exp(-1.0 / (1.0 - t * t)) : 0.0;
}

// Independent slow oracle: composite Simpson with many panels.
double simpson_oracle(const std::function<double(double)>& f, double a,
                      double b, int n) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double acc = f(a) + f(b);
  for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

}  // namespace

TEST_CASE("integrate: constant") {
  auto r = numerics::integrate([](double) { return 1.0; }, {0.0, 1.0});
  CHECK(r.value.real() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("integrate: bump agrees with independent Simpson oracle") {
  auto r = numerics::integrate([](double t) { return bump(t); }, {-1.0, 1.0});
  const double oracle = simpson_oracle(bump, -1.0, 1.0, 40000);
  CHECK(std::abs(r.value.real() - oracle) < 1e-10);
  // frozen reference value of int_{-1}^{1} e^{-1/(1-t^2)} dt
  CHECK(r.value.real() == doctest::Approx(0.443993816168079).epsilon(1e-12));
}

TEST_CASE("integrate: odd integrand vanishes") {
  auto r =
      numerics::integrate([](double t) { return t * bump(t); }, {-1.0, 1.0});
  CHECK(std::abs(r.value) < 1e-12);
}

TEST_CASE("integrate: linearity on random integrands") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int rep = 0; rep < 10; ++rep) {
    const double a = unit(rng), b = unit(rng);
    auto f = [](double t) { return std::cos(3.0 * t); };
    auto g = [](double t) { return std::exp(-t * t); };
    const double tol = 1e-10;
    auto lhs = numerics::integrate(
        [&](double t) { return a * f(t) + b * g(t); }, {-2.0, 2.0}, tol);
    auto rf = numerics::integrate(f, {-2.0, 2.0}, tol);
    auto rg = numerics::integrate(g, {-2.0, 2.0}, tol);
    CHECK(std::abs(lhs.value - (a * rf.value + b * rg.value)) <= 2.0 * tol);
  }
}

TEST_CASE("integrate: non-convergence reported with best estimate") {
  // |t|^{-0.99} is integrable but the tolerance is unreachable at depth cap.
  bool threw = false;
  try {
    numerics::integrate([](double t) { return std::pow(std::abs(t), -0.99); },
                        {0.0, 1.0}, 1e-13);
  } catch (const numerics::QuadratureError& e) {
    threw = true;
    CHECK(std::abs(e.best_estimate) > 0.0);
  }
  CHECK(threw);
}

TEST_CASE("spectral_transform: zero function") {
  std::vector<cplx> z(64, 0.0);
  numerics::SampledFunction f(std::move(z), -1.0, 2.0 / 63.0, 1.01);
  auto spec = numerics::spectral_transform(f, 2);
  for (auto a : spec.amplitudes) CHECK(std::abs(a) == 0.0);
}

TEST_CASE("spectral_transform: Gaussian closed form") {
  // g(t) = e^{-t^2/2} on [-8,8]; g~(u) = sqrt(2 pi) e^{-u^2/2}
  const std::size_t n = 4096;
  const double dt = 16.0 / double(n - 1);
  std::vector<cplx> vals(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = -8.0 + dt * double(i);
    vals[i] = std::exp(-0.5 * t * t);
  }
  numerics::SampledFunction g(std::move(vals), -8.0, dt, 8.5);
  auto spec = numerics::spectral_transform(g, 4);
  CHECK(!spec.aliasing_warning);
  const double s2pi = std::sqrt(2.0 * M_PI);
  for (std::size_t j = 0; j < spec.frequencies.size(); ++j) {
    const double u = spec.frequencies[j];
    if (std::abs(u) > 8.0) continue;
    const double exact = s2pi * std::exp(-0.5 * u * u);
    CHECK(std::abs(spec.amplitudes[j] - cplx(exact)) < 1e-8);
  }
}

TEST_CASE("spectral_transform: Parseval on random bump superpositions") {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    auto g = testfn::random_bump(rng, 1.0, true);
    auto s = testfn::sample(g, 1.5, 2048);
    auto spec = numerics::spectral_transform(s, 4);
    const double du = spec.frequencies[1] - spec.frequencies[0];
    double lhs = 0.0;
    for (auto a : spec.amplitudes) lhs += std::norm(a);
    lhs *= du;
    auto rhs = numerics::integrate(
        [&g](double t) { return std::norm(g.value(t)); }, {-1.0, 1.0}, 1e-12);
    CHECK(lhs == doctest::Approx(2.0 * M_PI * rhs.value.real()).epsilon(1e-8));
  }
}

TEST_CASE("spectral_transform: shift theorem") {
  const std::size_t n = 1024;
  const double dt = 6.0 / double(n - 1);
  auto g = testfn::TestFunction::bump(1.0);
  auto make = [&](double a) {
    std::vector<cplx> vals(n);
    for (std::size_t i = 0; i < n; ++i)
      vals[i] = g.value(-3.0 + dt * double(i) - a);
    return numerics::SampledFunction(std::move(vals), -3.0, dt, 3.5);
  };
  const double a = 16.0 * dt;  // grid-aligned shift
  auto s0 = numerics::spectral_transform(make(0.0), 2);
  auto s1 = numerics::spectral_transform(make(a), 2);
  for (std::size_t j = 0; j < s0.frequencies.size(); ++j) {
    const double u = s0.frequencies[j];
    const cplx expected = s0.amplitudes[j] * std::exp(cplx(0.0, u * a));
    CHECK(std::abs(s1.amplitudes[j] - expected) < 1e-10);
  }
}

TEST_CASE("spectral_transform then inverse reproduces samples") {
  std::mt19937_64 rng(3);
  auto g = testfn::random_bump(rng, 1.0, true);
  auto s = testfn::sample(g, 1.25, 512);
  auto spec = numerics::spectral_transform(s, 4);
  auto back = numerics::inverse_spectral_transform(
      spec, s.grid_start, s.grid_step, s.size(), s.support_radius);
  double err = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i)
    err = std::max(err, std::abs(back.samples[i] - s.samples[i]));
  CHECK(err < 1e-9);
}

TEST_CASE("extrapolate_to_zero: linear and quadratic") {
  {
    std::vector<std::pair<double, cplx>> pairs = {
        {0.4, cplx(3.4)}, {0.2, cplx(3.2)}, {0.1, cplx(3.1)}};
    auto r = numerics::extrapolate_to_zero(pairs);
    CHECK(std::abs(r.limit - cplx(3.0)) < 1e-12);
    CHECK(r.converged);
  }
  {
    std::vector<std::pair<double, cplx>> pairs;
    for (double h : {0.4, 0.2, 0.1, 0.05})
      pairs.emplace_back(h, cplx(1.0 + h + h * h));
    auto r = numerics::extrapolate_to_zero(pairs);
    CHECK(std::abs(r.limit - cplx(1.0)) < 1e-6);
  }
}

TEST_CASE("extrapolate_to_zero: single pair is a precondition error") {
  std::vector<std::pair<double, cplx>> pairs = {{0.1, cplx(1.0)}};
  CHECK_THROWS_AS(numerics::extrapolate_to_zero(pairs),
                  std::invalid_argument);
}

TEST_CASE("extrapolate_to_zero: noise flags non-convergence") {
  std::vector<std::pair<double, cplx>> pairs;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> noise(-1.0, 1.0);
  for (double h : {0.4, 0.2, 0.1, 0.05, 0.025, 0.0125})
    pairs.emplace_back(h, cplx(2.0 + noise(rng)));
  auto r = numerics::extrapolate_to_zero(pairs);
  if (!r.converged) CHECK(r.limit == pairs.back().second);
}

TEST_CASE("integrate_to_decay: Gaussian tail") {
  auto r = numerics::integrate_to_decay(
      [](double t) { return cplx(std::exp(-t * t)); }, 0.0, 1e-10);
  CHECK(r.value.real() == doctest::Approx(0.5 * std::sqrt(M_PI)).epsilon(1e-9));
}
