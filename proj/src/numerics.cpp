#include "qiope/numerics.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <queue>

namespace qiope::numerics {

namespace {

// Gauss(7)/Kronrod(15) nodes and weights on [-1,1] (QUADPACK constants).
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  cplx value;
  double error;
};

Panel gk15(const std::function<cplx(double)>& f, double a, double b,
           std::size_t& evals) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  cplx fv[15];
  for (int i = 0; i < 7; ++i) {
    fv[i] = f(c - h * kXgk[i]);
    fv[14 - i] = f(c + h * kXgk[i]);
  }
  fv[7] = f(c);
  evals += 15;
  cplx kron = kWgk[7] * fv[7];
  cplx gauss = kWg[3] * fv[7];
  for (int i = 0; i < 7; ++i) {
    kron += kWgk[i] * (fv[i] + fv[14 - i]);
    if (i % 2 == 1) gauss += kWg[i / 2] * (fv[i] + fv[14 - i]);
  }
  kron *= h;
  gauss *= h;
  return {kron, std::abs(kron - gauss)};
}

struct PanelRec {
  double error;
  double a, b;
  cplx value;
};

// worst error first; ties broken by position so the split order (and hence
// the bitwise result) is deterministic
struct PanelOrder {
  bool operator()(const PanelRec& x, const PanelRec& y) const {
    if (x.error != y.error) return x.error < y.error;
    return x.a > y.a;
  }
};

constexpr std::size_t kMaxPanels = 30000;

}  // namespace

QuadResult integrate_impl(const std::function<cplx(double)>& f, Interval iv,
                          double tol) {
  if (!(tol > 0)) throw std::invalid_argument("integrate: tol must be > 0");
  if (iv.a == iv.b) return {cplx(0.0), 0.0, 0};
  double sign = 1.0;
  double a = iv.a, b = iv.b;
  if (b < a) {
    std::swap(a, b);
    sign = -1.0;
  }

  std::size_t evals = 0;
  std::priority_queue<PanelRec, std::vector<PanelRec>, PanelOrder> heap;
  Panel first = gk15(f, a, b, evals);
  heap.push({first.error, a, b, first.value});
  cplx total = first.value;
  double total_err = first.error;
  std::size_t n_panels = 1;

  const double span = b - a;
  auto bound = [&]() {
    // absolute target with a machine-precision relative floor
    return std::max(tol, 1e-13 * std::abs(total));
  };

  while (total_err > bound() && n_panels < kMaxPanels) {
    PanelRec worst = heap.top();
    const double w = worst.b - worst.a;
    if (w < 1e-15 * span + 1e-300) break;  // cannot refine further
    heap.pop();
    const double m = 0.5 * (worst.a + worst.b);
    Panel l = gk15(f, worst.a, m, evals);
    Panel r = gk15(f, m, worst.b, evals);
    total += l.value + r.value - worst.value;
    total_err += l.error + r.error - worst.error;
    heap.push({l.error, worst.a, m, l.value});
    heap.push({r.error, m, worst.b, r.value});
    ++n_panels;
  }

  if (total_err > bound() * 4.0) {
    throw QuadratureError("integrate: tolerance not reached after " +
                              std::to_string(n_panels) +
                              " panels (error estimate " +
                              std::to_string(total_err) + ")",
                          sign * total, total_err);
  }
  return {sign * total, total_err, evals};
}

QuadResult integrate_to_decay(const std::function<cplx(double)>& f, double a,
                              double tol, double initial_len) {
  cplx acc = 0.0;
  double err = 0.0;
  std::size_t evals = 0;
  double lo = a;
  double len = initial_len;
  int small_in_a_row = 0;
  for (int k = 0; k < 60; ++k) {
    QuadResult r = integrate(f, {lo, lo + len}, tol);
    acc += r.value;
    err += r.error_estimate;
    evals += r.evaluations;
    const double scale = std::max(1e-300, std::abs(acc));
    if (std::abs(r.value) < tol * std::max(1.0, scale)) {
      if (++small_in_a_row >= 2) return {acc, err, evals};
    } else {
      small_in_a_row = 0;
    }
    lo += len;
    len *= 1.6;
  }
  throw QuadratureError(
      "integrate_to_decay: integrand did not decay on [a,inf)", acc, err);
}

// ---------------------------------------------------------------------------

SampledFunction::SampledFunction(std::vector<cplx> s, double start, double step,
                                 double support)
    : samples(std::move(s)),
      grid_start(start),
      grid_step(step),
      support_radius(support) {
  if (samples.size() < 2)
    throw std::invalid_argument("SampledFunction: need at least 2 samples");
  if (!(grid_step > 0))
    throw std::invalid_argument("SampledFunction: grid_step must be > 0");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (std::abs(t(i)) >= support_radius && std::abs(samples[i]) > 1e-12)
      throw std::invalid_argument(
          "SampledFunction: values must vanish at and beyond the declared "
          "support boundary");
  }
}

namespace {

// FFTW plan cache.  Plans are created once per (size, sign) under a lock
// and executed via the thread-safe new-array interface.  FFTW_UNALIGNED
// removes the alignment requirement on caller buffers.
std::mutex g_plan_mutex;
std::map<std::pair<int, int>, fftw_plan> g_plans;

fftw_plan plan_for(int n, int sign) {
  std::lock_guard<std::mutex> lock(g_plan_mutex);
  auto it = g_plans.find({n, sign});
  if (it != g_plans.end()) return it->second;
  std::vector<cplx> tmp_in(n), tmp_out(n);
  fftw_plan p = fftw_plan_dft_1d(
      n, reinterpret_cast<fftw_complex*>(tmp_in.data()),
      reinterpret_cast<fftw_complex*>(tmp_out.data()), sign,
      FFTW_ESTIMATE | FFTW_UNALIGNED);
  g_plans[{n, sign}] = p;
  return p;
}

void fft_exec(std::vector<cplx>& in, std::vector<cplx>& out, int sign) {
  const int n = static_cast<int>(in.size());
  out.resize(n);
  fftw_plan p = plan_for(n, sign);
  fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(in.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
}

}  // namespace

Spectrum spectral_transform(const SampledFunction& f, int padding_factor) {
  if (padding_factor < 1)
    throw std::invalid_argument("spectral_transform: padding_factor >= 1");
  const std::size_t n = f.size();
  const std::size_t m = n * static_cast<std::size_t>(padding_factor);
  const double dt = f.grid_step;

  std::vector<cplx> in(m, cplx(0.0));
  std::copy(f.samples.begin(), f.samples.end(), in.begin());
  std::vector<cplx> out;
  // Backward (sign +1) gives sum_n x_n e^{+2pi i jn/m}, matching e^{+iut}.
  fft_exec(in, out, FFTW_BACKWARD);

  const double du = 2.0 * M_PI / (double(m) * dt);
  Spectrum spec;
  spec.frequencies.resize(m);
  spec.amplitudes.resize(m);
  const long long half = static_cast<long long>(m) / 2;
  for (long long j = -half; j < half; ++j) {
    const std::size_t idx = static_cast<std::size_t>(j + half);
    const double u = du * double(j);
    const std::size_t src = static_cast<std::size_t>((j + (long long)m) % m);
    // amplitude = dt e^{iu t0} sum_n x_n e^{iu n dt}
    spec.frequencies[idx] = u;
    spec.amplitudes[idx] =
        dt * std::exp(cplx(0.0, u * f.grid_start)) * out[src];
  }

  // Aliasing check: energy above 90% of Nyquist vs total.
  double total = 0.0, high = 0.0;
  const double nyq = M_PI / dt;
  for (std::size_t j = 0; j < m; ++j) {
    const double e = std::norm(spec.amplitudes[j]);
    total += e;
    if (std::abs(spec.frequencies[j]) > 0.9 * nyq) high += e;
  }
  spec.aliasing_warning = (total > 0.0) && (high > 1e-6 * total);
  return spec;
}

SampledFunction inverse_spectral_transform(const Spectrum& spec,
                                           double grid_start, double grid_step,
                                           std::size_t n,
                                           double support_radius) {
  const std::size_t m = spec.amplitudes.size();
  // Undo the phase/scale applied in spectral_transform, then forward DFT.
  std::vector<cplx> in(m), out;
  const long long half = static_cast<long long>(m) / 2;
  for (long long j = -half; j < half; ++j) {
    const std::size_t idx = static_cast<std::size_t>(j + half);
    const std::size_t dst = static_cast<std::size_t>((j + (long long)m) % m);
    in[dst] = spec.amplitudes[idx] *
              std::exp(cplx(0.0, -spec.frequencies[idx] * grid_start)) /
              grid_step;
  }
  fft_exec(in, out, FFTW_FORWARD);
  std::vector<cplx> samples(n);
  for (std::size_t i = 0; i < n; ++i) samples[i] = out[i] / double(m);
  return SampledFunction(std::move(samples), grid_start, grid_step,
                         support_radius);
}

cplx sampled_fourier(const SampledFunction& f, double p) {
  cplx acc = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    acc += f.samples[i] * std::exp(cplx(0.0, -p * f.t(i)));
  return acc * f.grid_step;
}

// ---------------------------------------------------------------------------

ExtrapolationResult extrapolate_to_zero(
    std::span<const std::pair<double, cplx>> pairs) {
  const std::size_t n = pairs.size();
  if (n < 3)
    throw std::invalid_argument("extrapolate_to_zero: need at least 3 pairs");
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (!(pairs[i].first > pairs[i + 1].first) || !(pairs[i + 1].first > 0))
      throw std::invalid_argument(
          "extrapolate_to_zero: h must be strictly decreasing and positive");
  }

  // Neville tableau evaluated at h = 0.  row[i] holds T_{i,j} in place;
  // stage[j] records T_{n-1,j}, the estimate using the j+1 smallest nodes.
  std::vector<cplx> row(n);
  for (std::size_t i = 0; i < n; ++i) row[i] = pairs[i].second;
  std::vector<cplx> stage;
  stage.push_back(row[n - 1]);
  for (std::size_t j = 1; j < n; ++j) {
    for (std::size_t i = n - 1;; --i) {
      const double hi = pairs[i].first;
      const double hij = pairs[i - j].first;
      row[i] = (hij * row[i] - hi * row[i - 1]) / (hij - hi);
      if (i == j) break;
    }
    stage.push_back(row[n - 1]);
  }

  // Residuals between successive stages; the last difference is the error
  // estimate.  A residual growing at the final stage marks divergence.
  std::vector<double> res(n - 1);
  for (std::size_t j = 0; j + 1 < n; ++j)
    res[j] = std::abs(stage[j + 1] - stage[j]);
  const cplx limit = stage[n - 1];
  const double last = res[n - 2];
  const double prev = res[n - 3];
  const bool diverging =
      last > 2.0 * prev && last > 1e-13 * (std::abs(limit) + 1e-300);
  if (diverging) {
    return {pairs[n - 1].second, std::abs(pairs[n - 1].second - limit), false};
  }
  return {limit, std::max(last, 1e-16 * std::abs(limit)), true};
}

}  // namespace qiope::numerics
