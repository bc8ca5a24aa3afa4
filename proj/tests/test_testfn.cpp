#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "qiope/numerics.hpp"
#include "qiope/testfn.hpp"

using namespace qiope;
using numerics::cplx;
using testfn::TestFunction;

namespace {
// frozen by independent quadrature: int_{-1}^{1} e^{-1/(1-t^2)} dt
constexpr double kBumpL1 = 0.443993816168079;
}

TEST_CASE("bump vanishes outside support with all derivatives") {
  auto b = TestFunction::bump(1.0);
  for (double t : {-1.0, -1.2, 1.0, 1.5, 3.0}) {
    for (int n = 0; n <= 12; ++n) CHECK(std::abs(b.derivative(t, n)) == 0.0);
  }
}

TEST_CASE("derivatives match central finite differences") {
  auto b = TestFunction::bump(1.0);
  auto p = TestFunction::mollified_polynomial({1.0, 0.5, -0.25}, 1.0, 0.0);
  auto g = TestFunction::gaussian(0.8, 0.1);
  for (const auto& f : {b, p, g}) {
    for (double t : {-0.6, -0.21, 0.0, 0.33, 0.72}) {
      for (int n = 1; n <= 6; ++n) {
        const double h = 1e-5;
        const cplx fd =
            (f.derivative(t + h, n - 1) - f.derivative(t - h, n - 1)) /
            (2.0 * h);
        const cplx ex = f.derivative(t, n);
        const double scale = std::max(std::abs(ex), std::abs(fd));
        if (scale > 1e-8) CHECK(std::abs(fd - ex) / scale < 1e-6);
      }
    }
  }
}

TEST_CASE("high-order bump derivative matches repeated differentiation") {
  // cross-check order 12 against nested finite differences of order 10
  auto b = TestFunction::bump(1.0);
  const double t = 0.31, h = 1e-4;
  const cplx fd =
      (b.derivative(t + h, 11) - b.derivative(t - h, 11)) / (2.0 * h);
  const cplx ex = b.derivative(t, 12);
  CHECK(std::abs(fd - ex) / std::abs(ex) < 1e-5);
}

TEST_CASE("sobolev_norm: zero function and bump L1") {
  auto z = TestFunction::sum({{cplx(0.0), TestFunction::bump(1.0)}});
  CHECK(testfn::sobolev_norm(z, 1.0, 3) == 0.0);

  auto b = TestFunction::bump(1.0);
  CHECK(testfn::sobolev_norm(b, 1.0, 0) ==
        doctest::Approx(kBumpL1).epsilon(1e-10));
}

TEST_CASE("sobolev_norm: scale invariance") {
  auto b = TestFunction::bump(1.0);
  for (double lam : {0.3, 0.5, 2.0, 7.5}) {
    auto bl = testfn::scale(b, lam);
    const double n0 = testfn::sobolev_norm(b, 1.0, 4);
    const double n1 = testfn::sobolev_norm(bl, lam, 4);
    CHECK(std::abs(n0 - n1) < 1e-9 * std::max(1.0, n0));
  }
}

TEST_CASE("sobolev_norm: support violation is a precondition error") {
  auto b = TestFunction::bump(1.0);
  CHECK_THROWS_AS(testfn::sobolev_norm(b, 0.5, 2), std::invalid_argument);
}

TEST_CASE("sobolev_norm: monotone in M and absolutely homogeneous") {
  std::mt19937_64 rng(17);
  auto g = testfn::random_bump(rng, 1.0, false);
  double prev = 0.0;
  for (int M = 0; M <= 6; ++M) {
    const double cur = testfn::sobolev_norm(g, 1.0, M);
    CHECK(cur >= prev - 1e-12);
    prev = cur;
  }
  const cplx c(2.5, 0.0);
  auto cg = TestFunction::sum({{c, g}});
  CHECK(std::abs(testfn::sobolev_norm(cg, 1.0, 3) -
                 std::abs(c) * testfn::sobolev_norm(g, 1.0, 3)) < 1e-10);
}

TEST_CASE("scale: identity, mass conservation, composition") {
  auto b = TestFunction::bump(1.0);
  auto b1 = testfn::scale(b, 1.0);
  for (double t : {-0.7, 0.0, 0.4}) CHECK(b1.value(t) == b.value(t));

  auto b2 = testfn::scale(b, 0.45);
  auto m0 = numerics::integrate([&](double t) { return b.value(t); },
                                {-1.0, 1.0}, 1e-12);
  auto m1 = numerics::integrate([&](double t) { return b2.value(t); },
                                {-0.45, 0.45}, 1e-12);
  CHECK(std::abs(m0.value - m1.value) < 1e-10);

  auto a = testfn::scale(testfn::scale(b, 0.5), 3.0);
  auto c = testfn::scale(b, 1.5);
  for (double t : {-1.2, -0.3, 0.0, 0.9, 1.4})
    CHECK(std::abs(a.value(t) - c.value(t)) < 1e-10);
}

TEST_CASE("diamond: s'=0 diagonal and support arithmetic") {
  auto g = TestFunction::bump(1.0);
  auto dd = testfn::diamond(g, g);
  for (double s : {-0.5, 0.0, 0.3})
    CHECK(std::abs(dd.value(s, 0.0) - g.value(s) * g.value(s)) < 1e-15);
  for (double sp : {2.0, 2.5, -2.0, 5.0})
    CHECK(std::abs(dd.value(0.0, sp)) == 0.0);
}

TEST_CASE("diamond: conjugate-reflection identity") {
  std::mt19937_64 rng(23);
  auto g = testfn::random_bump(rng, 1.0, true);
  auto dd = testfn::diamond(g.conj(), g);
  for (double s : {-0.4, 0.1, 0.6}) {
    for (double sp : {-1.1, -0.2, 0.5, 1.3}) {
      const cplx lhs = std::conj(dd.value(s, sp));
      const cplx rhs = dd.value(s, -sp);
      CHECK(std::abs(lhs - rhs) < 1e-14);
    }
  }
}

TEST_CASE("diamond: vanishes in s beyond the support radius") {
  auto g = TestFunction::bump(1.0);
  auto dd = testfn::diamond(g.conj(), g);
  for (double s : {1.0, 1.3, -1.0, -2.0})
    for (double sp : {-1.0, 0.0, 0.7})
      CHECK(std::abs(dd.value(s, sp)) == 0.0);
}

TEST_CASE("diamond: s'-derivatives match finite differences") {
  auto g = TestFunction::bump(1.0);
  auto dd = testfn::diamond(g, g);
  const double s = 0.2;
  for (int n : {1, 2, 4}) {
    for (double sp : {0.0, 0.4}) {
      const double h = 1e-5;
      const cplx fd =
          (dd.dsp(s, sp + h, n - 1) - dd.dsp(s, sp - h, n - 1)) / (2.0 * h);
      const cplx ex = dd.dsp(s, sp, n);
      const double scale = std::max({std::abs(ex), std::abs(fd), 1e-6});
      CHECK(std::abs(fd - ex) / scale < 1e-5);
    }
  }
}

TEST_CASE("l1_sum_bound_check") {
  auto z = TestFunction::sum({{cplx(0.0), TestFunction::bump(1.0)}});
  auto [zl, zr] = testfn::l1_sum_bound_check(z, 1.0, 2);
  CHECK(zl == 0.0);
  CHECK(zr == 0.0);

  auto b = TestFunction::bump(1.0);
  auto [l1, r1] = testfn::l1_sum_bound_check(b, 1.0, 2);
  CHECK(l1 <= r1 * (1.0 + 1e-12));

  auto bs = testfn::scale(b, 0.1);
  auto [l2, r2] = testfn::l1_sum_bound_check(bs, 0.1, 3);
  CHECK(l2 <= r2 * (1.0 + 1e-12));
  // rhs carries the d^{-3} amplification
  CHECK(r2 > 100.0 * testfn::sobolev_norm(bs, 0.1, 3));
}

TEST_CASE("mollified polynomial values") {
  auto p = TestFunction::mollified_polynomial({0.0, 1.0}, 1.0, 0.0);
  auto b = TestFunction::bump(1.0);
  for (double t : {-0.8, -0.1, 0.5})
    CHECK(std::abs(p.value(t) - t * b.value(t)) < 1e-15);
}

TEST_CASE("gaussian is flagged non-compact") {
  auto g = TestFunction::gaussian(1.0, 0.0);
  CHECK(!g.compact());
  CHECK(g.value(0.0).real() == doctest::Approx(1.0));
}
