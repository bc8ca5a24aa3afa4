#include "qiope/testfn.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>

namespace qiope::testfn {

namespace detail {

struct FnNode {
  virtual ~FnNode() = default;
  virtual cplx deriv(double t, int order) const = 0;
};

namespace {

// Binomial table up to 2*kMaxDerivativeOrder.
constexpr int kBinomMax = 2 * kMaxDerivativeOrder + 2;
const double* binom_row(int n) {
  static double table[kBinomMax][kBinomMax];
  static std::once_flag once;
  std::call_once(once, [] {
    for (int i = 0; i < kBinomMax; ++i) {
      table[i][0] = 1.0;
      for (int j = 1; j <= i; ++j)
        table[i][j] = (j == i) ? 1.0 : table[i - 1][j - 1] + table[i - 1][j];
    }
  });
  return table[n];
}

// b(t) = exp(-1/(1-t^2)) on (-1,1).  b^(n) = P_n(t) (1-t^2)^{-2n} b(t)
// with the polynomial recursion
//   P_{n+1} = P_n' (1-t^2)^2 + (4 n t (1-t^2) - 2t) P_n.
class BumpTable {
 public:
  static const BumpTable& instance() {
    static BumpTable t;
    return t;
  }

  double deriv(double t, int order) const {
    const double u = 1.0 - t * t;
    // e^{-1/u} underflows long before the polynomial factor matters.
    if (u < 2e-3) return 0.0;
    const double b = std::exp(-1.0 / u);
    if (order == 0) return b;
    const double p = eval_poly(poly_[order], t);
    return p * std::pow(u, -2.0 * order) * b;
  }

 private:
  BumpTable() {
    poly_.resize(kMaxDerivativeOrder + 1);
    poly_[0] = {1.0};
    for (int n = 0; n < kMaxDerivativeOrder; ++n) {
      const auto& p = poly_[n];
      std::vector<double> next(p.size() + 4, 0.0);
      // p' * (1 - 2t^2 + t^4)
      for (std::size_t k = 1; k < p.size(); ++k) {
        const double dk = double(k) * p[k];
        next[k - 1] += dk;
        next[k + 1] -= 2.0 * dk;
        next[k + 3] += dk;
      }
      // ((4n - 2) t - 4n t^3) * p
      for (std::size_t k = 0; k < p.size(); ++k) {
        next[k + 1] += (4.0 * n - 2.0) * p[k];
        next[k + 3] -= 4.0 * n * p[k];
      }
      while (next.size() > 1 && next.back() == 0.0) next.pop_back();
      poly_[n + 1] = std::move(next);
    }
  }

  static double eval_poly(const std::vector<double>& c, double t) {
    double acc = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) acc = acc * t + c[k];
    return acc;
  }

  std::vector<std::vector<double>> poly_;
};

void check_order(int order) {
  if (order < 0 || order > kMaxDerivativeOrder)
    throw std::invalid_argument("TestFunction: derivative order out of range");
}

struct BumpNode final : FnNode {
  double d, center;
  cplx amplitude;
  cplx deriv(double t, int order) const override {
    const double x = (t - center) / d;
    return amplitude * BumpTable::instance().deriv(x, order) *
           std::pow(d, -double(order));
  }
};

struct MollifiedPolyNode final : FnNode {
  std::vector<double> coeffs;
  double d, center;

  double poly_deriv(double x, int k) const {
    // k-th derivative of sum_j c_j x^j
    if (coeffs.size() <= std::size_t(k)) return 0.0;
    double acc = 0.0;
    for (std::size_t j = coeffs.size(); j-- > std::size_t(k);) {
      double fac = 1.0;
      for (int r = 0; r < k; ++r) fac *= double(j - r);
      acc = acc * x + fac * coeffs[j];
    }
    return acc;
  }

  cplx deriv(double t, int order) const override {
    const double x = (t - center) / d;
    if (std::abs(x) >= 1.0) return 0.0;
    const auto& bt = BumpTable::instance();
    const double* binom = binom_row(order);
    double acc = 0.0;
    for (int k = 0; k <= order; ++k)
      acc += binom[k] * poly_deriv(x, k) * bt.deriv(x, order - k);
    return acc * std::pow(d, -double(order));
  }
};

struct ScaleNode final : FnNode {
  std::shared_ptr<const FnNode> inner;
  double lambda;
  cplx deriv(double t, int order) const override {
    return inner->deriv(t / lambda, order) *
           std::pow(lambda, -1.0 - double(order));
  }
};

struct ShiftNode final : FnNode {
  std::shared_ptr<const FnNode> inner;
  double a;
  cplx deriv(double t, int order) const override {
    return inner->deriv(t - a, order);
  }
};

struct ConjNode final : FnNode {
  std::shared_ptr<const FnNode> inner;
  cplx deriv(double t, int order) const override {
    return std::conj(inner->deriv(t, order));
  }
};

struct DerivNode final : FnNode {
  std::shared_ptr<const FnNode> inner;
  int k;
  cplx deriv(double t, int order) const override {
    check_order(order + k);
    return inner->deriv(t, order + k);
  }
};

struct SumNode final : FnNode {
  std::vector<std::pair<cplx, std::shared_ptr<const FnNode>>> terms;
  cplx deriv(double t, int order) const override {
    cplx acc = 0.0;
    for (const auto& [c, n] : terms) acc += c * n->deriv(t, order);
    return acc;
  }
};

struct ProductNode final : FnNode {
  std::shared_ptr<const FnNode> a, b;
  cplx deriv(double t, int order) const override {
    const double* binom = binom_row(order);
    cplx acc = 0.0;
    for (int k = 0; k <= order; ++k)
      acc += binom[k] * a->deriv(t, k) * b->deriv(t, order - k);
    return acc;
  }
};

struct GaussianNode final : FnNode {
  double sigma, center;
  cplx deriv(double t, int order) const override {
    // g^(n)(t) = sigma^{-n} (-1)^n He_n(u) e^{-u^2/2}, u = (t-c)/sigma
    const double u = (t - center) / sigma;
    const double e = std::exp(-0.5 * u * u);
    if (order == 0) return e;
    double he0 = 1.0, he1 = u;
    for (int n = 1; n < order; ++n) {
      const double he2 = u * he1 - double(n) * he0;
      he0 = he1;
      he1 = he2;
    }
    const double sign = (order % 2 == 0) ? 1.0 : -1.0;
    return sign * he1 * e * std::pow(sigma, -double(order));
  }
};

}  // namespace
}  // namespace detail

TestFunction::TestFunction(std::shared_ptr<const detail::FnNode> node,
                           double lo, double hi, bool real, bool compact)
    : node_(std::move(node)), lo_(lo), hi_(hi), real_(real), compact_(compact) {}

cplx TestFunction::derivative(double t, int order) const {
  detail::check_order(order);
  if (!node_) return 0.0;
  if (compact_ && (t <= lo_ || t >= hi_)) return 0.0;
  return node_->deriv(t, order);
}

double TestFunction::support_radius() const {
  return std::max(std::abs(lo_), std::abs(hi_));
}

TestFunction TestFunction::bump(double d, double center, cplx amplitude) {
  if (!(d > 0)) throw std::invalid_argument("bump: d must be > 0");
  auto n = std::make_shared<detail::BumpNode>();
  n->d = d;
  n->center = center;
  n->amplitude = amplitude;
  return TestFunction(n, center - d, center + d, amplitude.imag() == 0.0,
                      true);
}

TestFunction TestFunction::mollified_polynomial(
    const std::vector<double>& coeffs, double d, double center) {
  if (!(d > 0))
    throw std::invalid_argument("mollified_polynomial: d must be > 0");
  auto n = std::make_shared<detail::MollifiedPolyNode>();
  n->coeffs = coeffs;
  n->d = d;
  n->center = center;
  return TestFunction(n, center - d, center + d, true, true);
}

TestFunction TestFunction::gaussian(double sigma, double center) {
  if (!(sigma > 0)) throw std::invalid_argument("gaussian: sigma must be > 0");
  auto n = std::make_shared<detail::GaussianNode>();
  n->sigma = sigma;
  n->center = center;
  // e^{-72} ~ 5e-32, well under the sampling tolerance.
  const double r = 12.0 * sigma;
  return TestFunction(n, center - r, center + r, true, false);
}

TestFunction TestFunction::scaled(double lambda) const {
  if (!(lambda > 0)) throw std::invalid_argument("scale: lambda must be > 0");
  auto n = std::make_shared<detail::ScaleNode>();
  n->inner = node_;
  n->lambda = lambda;
  return TestFunction(n, lambda * lo_, lambda * hi_, real_, compact_);
}

TestFunction TestFunction::shifted(double a) const {
  auto n = std::make_shared<detail::ShiftNode>();
  n->inner = node_;
  n->a = a;
  return TestFunction(n, lo_ + a, hi_ + a, real_, compact_);
}

TestFunction TestFunction::conj() const {
  if (real_) return *this;
  auto n = std::make_shared<detail::ConjNode>();
  n->inner = node_;
  return TestFunction(n, lo_, hi_, real_, compact_);
}

TestFunction TestFunction::derivative_fn(int k) const {
  detail::check_order(k);
  auto n = std::make_shared<detail::DerivNode>();
  n->inner = node_;
  n->k = k;
  return TestFunction(n, lo_, hi_, real_, compact_);
}

TestFunction TestFunction::sum(
    const std::vector<std::pair<cplx, TestFunction>>& terms) {
  if (terms.empty()) throw std::invalid_argument("sum: no terms");
  auto n = std::make_shared<detail::SumNode>();
  double lo = terms[0].second.lo_, hi = terms[0].second.hi_;
  bool real = true, compact = true;
  for (const auto& [c, g] : terms) {
    n->terms.emplace_back(c, g.node_);
    lo = std::min(lo, g.lo_);
    hi = std::max(hi, g.hi_);
    real = real && g.real_ && (c.imag() == 0.0);
    compact = compact && g.compact_;
  }
  return TestFunction(n, lo, hi, real, compact);
}

TestFunction TestFunction::product(const std::vector<TestFunction>& factors) {
  if (factors.empty()) throw std::invalid_argument("product: no factors");
  TestFunction acc = factors[0];
  for (std::size_t i = 1; i < factors.size(); ++i) {
    auto n = std::make_shared<detail::ProductNode>();
    n->a = acc.node_;
    n->b = factors[i].node_;
    const double lo = std::max(acc.lo_, factors[i].lo_);
    const double hi = std::min(acc.hi_, factors[i].hi_);
    acc = TestFunction(n, lo, std::max(lo, hi), acc.real_ && factors[i].real_,
                       acc.compact_ && factors[i].compact_);
  }
  return acc;
}

// ---------------------------------------------------------------------------

DiamondProduct diamond(const TestFunction& g1, const TestFunction& g2) {
  return DiamondProduct{g1, g2};
}

cplx DiamondProduct::value(double s, double sp) const {
  return left.value(s + 0.5 * sp) * right.value(s - 0.5 * sp);
}

cplx DiamondProduct::dsp(double s, double sp, int n) const {
  const double* binom = detail::binom_row(n);
  cplx acc = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double sign = ((n - k) % 2 == 0) ? 1.0 : -1.0;
    acc += binom[k] * left.derivative(s + 0.5 * sp, k) *
           right.derivative(s - 0.5 * sp, n - k) * sign;
  }
  return acc * std::pow(0.5, n);
}

// ---------------------------------------------------------------------------

double sobolev_norm(const TestFunction& g, double d, int M, double tol) {
  if (!(d > 0)) throw std::invalid_argument("sobolev_norm: d must be > 0");
  if (M < 0) throw std::invalid_argument("sobolev_norm: M must be >= 0");
  const double slack = 1e-12 * std::max(1.0, d);
  if (g.support_lo() < -d - slack || g.support_hi() > d + slack)
    throw std::invalid_argument(
        "sobolev_norm: support of g exceeds (-d, d)");
  double best = 0.0;
  double dn = 1.0;
  for (int n = 0; n <= M; ++n) {
    auto l1 = numerics::integrate(
        [&g, n](double t) { return std::abs(g.derivative(t, n)); },
        {g.support_lo(), g.support_hi()}, tol);
    best = std::max(best, dn * l1.value.real());
    dn *= d;
  }
  return best;
}

TestFunction scale(const TestFunction& g, double lambda) {
  return g.scaled(lambda);
}

std::pair<double, double> l1_sum_bound_check(const TestFunction& g, double d,
                                             int M) {
  double lhs = 0.0;
  for (int k = 0; k <= M; ++k) {
    auto l1 = numerics::integrate(
        [&g, k](double t) { return std::abs(g.derivative(t, k)); },
        {g.support_lo(), g.support_hi()}, 1e-10);
    lhs += l1.value.real();
  }
  const double rhs = double(M + 1) * std::max(1.0, std::pow(d, -double(M))) *
                     sobolev_norm(g, d, M);
  return {lhs, rhs};
}

TestFunction random_bump(std::mt19937_64& rng, double d, bool complex_coeffs) {
  std::uniform_int_distribution<int> kdist(1, 3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int k = kdist(rng);
  std::vector<std::pair<cplx, TestFunction>> terms;
  for (int i = 0; i < k; ++i) {
    const double w = d * (0.25 + 0.35 * unit(rng));
    const double amax = (d - w) * 0.95;
    const double a = amax * (2.0 * unit(rng) - 1.0);
    cplx c(2.0 * unit(rng) - 1.0, 0.0);
    if (complex_coeffs) c += cplx(0.0, 2.0 * unit(rng) - 1.0);
    if (std::abs(c) < 0.1) c += cplx(0.5, 0.0);
    terms.emplace_back(c, TestFunction::bump(w, a));
  }
  return TestFunction::sum(terms);
}

numerics::SampledFunction sample(const TestFunction& g, double r,
                                 std::size_t n) {
  if (n < 2) throw std::invalid_argument("sample: need n >= 2");
  const double step = 2.0 * r / double(n - 1);
  std::vector<cplx> vals(n);
  for (std::size_t i = 0; i < n; ++i)
    vals[i] = g.value(-r + step * double(i));
  return numerics::SampledFunction(std::move(vals), -r, step, r);
}

}  // namespace qiope::testfn
