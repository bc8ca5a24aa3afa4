#pragma once

#include <complex>
#include <memory>
#include <random>
#include <vector>

#include "qiope/numerics.hpp"

namespace qiope::testfn {

using numerics::cplx;

// Maximum derivative order guaranteed by every evaluator.
inline constexpr int kMaxDerivativeOrder = 16;

namespace detail {
struct FnNode;
}

// Smooth compactly supported function with exact derivatives.  Immutable
// value type; copies share the evaluator tree.
class TestFunction {
 public:
  TestFunction() = default;

  // value (order 0) or exact n-th derivative at t
  cplx value(double t) const { return derivative(t, 0); }
  cplx derivative(double t, int order) const;

  double support_lo() const { return lo_; }
  double support_hi() const { return hi_; }
  // Smallest r with supp contained in [-r, r].
  double support_radius() const;
  bool real_valued() const { return real_; }
  // False only for the internal Gaussian diagnostic family.
  bool compact() const { return compact_; }

  // lambda^{-1} g(t/lambda); support scales to lambda * (lo, hi)
  TestFunction scaled(double lambda) const;
  TestFunction shifted(double a) const;
  TestFunction conj() const;
  // exact k-th derivative as a function in its own right
  TestFunction derivative_fn(int k) const;

  static TestFunction bump(double d = 1.0, double center = 0.0,
                           cplx amplitude = 1.0);
  // (sum_k coeffs[k] x^k) * bump(x), x = (t-center)/d
  static TestFunction mollified_polynomial(const std::vector<double>& coeffs,
                                           double d = 1.0, double center = 0.0);
  static TestFunction sum(const std::vector<std::pair<cplx, TestFunction>>&
                              terms);
  static TestFunction product(const std::vector<TestFunction>& factors);
  // Internal diagnostic family; not compactly supported.  The declared
  // support is where values fall below 1e-12 absolute.
  static TestFunction gaussian(double sigma = 1.0, double center = 0.0);

 private:
  TestFunction(std::shared_ptr<const detail::FnNode> node, double lo, double hi,
               bool real, bool compact);
  std::shared_ptr<const detail::FnNode> node_;
  double lo_ = 0.0, hi_ = 0.0;
  bool real_ = true;
  bool compact_ = true;
};

// g1(s + s'/2) * g2(s - s'/2) with exact s'-derivatives at fixed s.
struct DiamondProduct {
  TestFunction left;
  TestFunction right;

  cplx value(double s, double sp) const;
  // n-th partial derivative in s' at (s, s')
  cplx dsp(double s, double sp, int n) const;
};

DiamondProduct diamond(const TestFunction& g1, const TestFunction& g2);

// max_{0<=n<=M} d^n ||g^(n)||_1, each L1 norm by quadrature at tol.
// Precondition: supp g contained in [-d, d].
double sobolev_norm(const TestFunction& g, double d, int M, double tol = 1e-10);

// lambda^{-1} g(t/lambda)
TestFunction scale(const TestFunction& g, double lambda);

// lhs = sum_{k<=M} ||g^(k)||_1, rhs = (M+1) max{1, d^-M} * sobolev_norm.
std::pair<double, double> l1_sum_bound_check(const TestFunction& g, double d,
                                             int M);

// Random superposition of 1-3 bumps supported inside (-d, d).
TestFunction random_bump(std::mt19937_64& rng, double d, bool complex_coeffs);

// Sampled values of g on a uniform grid covering [-r, r].
numerics::SampledFunction sample(const TestFunction& g, double r,
                                 std::size_t n);

}  // namespace qiope::testfn
