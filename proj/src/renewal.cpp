#include "crp/renewal.hpp"

#include <fftw3.h>

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <complex>
#include <mutex>

#include "crp/errors.hpp"

namespace crp {

namespace {

// Grid step for the Weibull convolution, as a fraction of the mean.
constexpr double kGridFraction = 2000.0;
constexpr std::size_t kMaxSeriesTerms = 1'000'000;

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

// Linear convolution with a fixed kernel, truncated to `out_len` samples.
class FftConvolver {
 public:
  FftConvolver(std::span<const double> kernel, std::size_t out_len) : out_len_(out_len) {
    n_ = 1;
    while (n_ < 2 * out_len) n_ <<= 1;
    const std::size_t nc = n_ / 2 + 1;
    real_ = fftw_alloc_real(n_);
    spec_ = fftw_alloc_complex(nc);
    {
      std::lock_guard lock(fftw_planner_mutex());
      forward_ = fftw_plan_dft_r2c_1d(static_cast<int>(n_), real_, spec_, FFTW_ESTIMATE);
      backward_ = fftw_plan_dft_c2r_1d(static_cast<int>(n_), spec_, real_, FFTW_ESTIMATE);
    }
    load(kernel);
    fftw_execute(forward_);
    kernel_hat_.resize(nc);
    for (std::size_t i = 0; i < nc; ++i) kernel_hat_[i] = {spec_[i][0], spec_[i][1]};
  }

  FftConvolver(const FftConvolver&) = delete;
  FftConvolver& operator=(const FftConvolver&) = delete;

  ~FftConvolver() {
    {
      std::lock_guard lock(fftw_planner_mutex());
      fftw_destroy_plan(forward_);
      fftw_destroy_plan(backward_);
    }
    fftw_free(real_);
    fftw_free(spec_);
  }

  std::vector<double> apply(std::span<const double> x) {
    load(x);
    fftw_execute(forward_);
    for (std::size_t i = 0; i < kernel_hat_.size(); ++i) {
      const std::complex<double> v = std::complex<double>(spec_[i][0], spec_[i][1]) * kernel_hat_[i];
      spec_[i][0] = v.real();
      spec_[i][1] = v.imag();
    }
    fftw_execute(backward_);
    std::vector<double> out(out_len_);
    const double scale = 1.0 / static_cast<double>(n_);
    // masses are nonnegative; clip round-off
    for (std::size_t i = 0; i < out_len_; ++i) out[i] = std::max(0.0, real_[i] * scale);
    return out;
  }

 private:
  void load(std::span<const double> x) {
    std::fill(real_, real_ + n_, 0.0);
    std::copy_n(x.begin(), std::min(x.size(), out_len_), real_);
  }

  std::size_t out_len_;
  std::size_t n_;
  double* real_;
  fftw_complex* spec_;
  fftw_plan forward_;
  fftw_plan backward_;
  std::vector<std::complex<double>> kernel_hat_;
};

double gamma_series(const ParamDistribution& k, double t, double tail_tol) {
  const double x = k.rate() * t;
  const double shape = k.shape();
  double total = 0.0;
  for (std::size_t n = 1; n < kMaxSeriesTerms; ++n) {
    const double term = boost::math::gamma_p(static_cast<double>(n) * shape, x);
    total += term;
    if (term < tail_tol) break;
  }
  return total;
}

struct WeibullRenewal {
  double h = 0.0;                 // grid spacing; cell midpoints sit on odd multiples
  std::vector<double> cumulative; // sum_{n>=0} of the discrete n-fold convolutions
  double value_at_end = 0.0;      // E[N] at the last grid point
};

// Grid convolution for a Weibull law up to lmax * h.
WeibullRenewal weibull_renewal(const ParamDistribution& k, double h, std::size_t lmax,
                               double tail_tol) {
  const double t_end = static_cast<double>(lmax) * h;
  const std::size_t len = lmax + 1;

  // mass of cell [i*2h, (i+1)*2h) placed at its midpoint (2i+1)h
  std::vector<double> f(len, 0.0);
  for (std::size_t l = 1; l < len; l += 2) {
    const double lo = static_cast<double>(l - 1) * h;
    const double hi = static_cast<double>(l + 1) * h;
    f[l] = survival(k, lo) - survival(k, hi);
  }
  std::vector<double> k_at_end(len);
  for (std::size_t l = 0; l < len; ++l) {
    k_at_end[l] = cdf(k, std::max(0.0, t_end - static_cast<double>(l) * h));
  }

  FftConvolver conv(f, len);
  WeibullRenewal out;
  out.h = h;
  out.cumulative.assign(len, 0.0);
  out.cumulative[0] = 1.0;
  std::vector<double> g(len, 0.0);
  g[0] = 1.0;
  const std::size_t cap = 10 * lmax + 100;
  for (std::size_t n = 1; n < cap; ++n) {
    // n-th term: the (n-1)-fold grid law convolved with the exact K
    double term = 0.0;
    for (std::size_t l = 0; l < len; ++l) term += g[l] * k_at_end[l];
    out.value_at_end += term;
    if (term < tail_tol) break;
    g = conv.apply(g);
    for (std::size_t l = 0; l < len; ++l) out.cumulative[l] += g[l];
  }
  return out;
}

}  // namespace

double renewal_mean(const ParamDistribution& k, double t, double tail_tol) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("renewal time must be nonnegative");
  if (!(tail_tol > 0.0)) throw DomainError("tail tolerance must be positive");
  if (t == 0.0) return 0.0;
  if (k.family() != Family::Weibull || k.is_exponential()) {
    const auto as_gamma = ParamDistribution::gamma(k.rate(), k.shape());
    return gamma_series(as_gamma, t, tail_tol);
  }
  const double half_cell = mean(k) / kGridFraction / 2.0;
  const auto lmax = static_cast<std::size_t>(std::ceil(t / half_cell));
  return weibull_renewal(k, t / static_cast<double>(lmax), lmax, tail_tol).value_at_end;
}

std::vector<double> renewal_mean_grid(const ParamDistribution& k, double step,
                                      std::size_t n_points, double tail_tol) {
  if (!(step > 0.0)) throw DomainError("grid step must be positive");
  std::vector<double> out(n_points, 0.0);
  if (n_points == 0) return out;
  if (k.family() != Family::Weibull || k.is_exponential()) {
    for (std::size_t i = 1; i < n_points; ++i) {
      out[i] = renewal_mean(k, step * static_cast<double>(i), tail_tol);
    }
    return out;
  }
  // refine so every requested point lies on the convolution grid
  const double half_cell = mean(k) / kGridFraction / 2.0;
  const auto sub = static_cast<std::size_t>(std::ceil(step / half_cell));
  const double h = step / static_cast<double>(sub);
  const std::size_t lmax = sub * (n_points - 1);
  const auto ren = weibull_renewal(k, h, lmax, tail_tol);

  // E[N_u] = sum_l cumulative[l] K(u - l h); one more convolution for all u
  std::vector<double> kgrid(lmax + 1);
  for (std::size_t l = 0; l <= lmax; ++l) kgrid[l] = cdf(k, static_cast<double>(l) * h);
  FftConvolver conv(kgrid, lmax + 1);
  const auto m = conv.apply(ren.cumulative);
  for (std::size_t i = 1; i < n_points; ++i) out[i] = m[i * sub];
  return out;
}

LinearityReport poisson_linearity_report(const ParamDistribution& k, std::span<const double> grid,
                                         double tail_tol) {
  if (grid.empty()) throw DomainError("linearity grid must be nonempty");
  LinearityReport r;
  const double rate = 1.0 / mean(k);
  for (double t : grid) {
    if (!(t > 0.0)) throw DomainError("linearity grid points must be positive");
    const double linear = t * rate;
    const double dev = std::abs(renewal_mean(k, t, tail_tol) - linear) / linear;
    r.relative_deviation.push_back(dev);
    r.max_rel_dev = std::max(r.max_rel_dev, dev);
  }
  r.is_linear = r.max_rel_dev <= 10.0 * tail_tol;
  return r;
}

TransformReport lst_relation_check(const ParamDistribution& k, std::span<const double> s_grid,
                                   double tail_tol) {
  constexpr double kBoundary = 1e-8;
  TransformReport r;
  std::vector<double> s_eval;
  for (double s : s_grid) {
    if (!(s >= 0.0)) throw DomainError("transform arguments must be nonnegative");
    if (s <= kBoundary) {
      ++r.boundary_points;
    } else {
      s_eval.push_back(s);
    }
  }
  r.s_values = s_eval;
  if (s_eval.empty()) return r;

  if (k.is_exponential()) {
    r.method = TransformReport::Method::ExponentialClosedForm;
    const double theta = k.rate();
    for (double s : s_eval) r.deviations.push_back(std::abs(lst(k, s) - theta / (theta + s)));
  } else {
    r.method = TransformReport::Method::RenewalTransform;
    const auto [s_min, s_max] = std::minmax_element(s_eval.begin(), s_eval.end());
    const double upper = 40.0 / *s_min;
    const double h = std::min(0.01, 0.05 / *s_max);
    const auto n = static_cast<std::size_t>(std::ceil(upper / h)) + 1;
    const auto m = renewal_mean_grid(k, h, n, tail_tol);
    for (double s : s_eval) {
      // trapezoid for int_0^upper e^{-su} m(u) du; m(0) = 0
      double integral = 0.0;
      for (std::size_t i = 1; i < n; ++i) {
        const double wgt = (i == n - 1) ? 0.5 : 1.0;
        integral += wgt * std::exp(-s * h * static_cast<double>(i)) * m[i];
      }
      integral *= h;
      const double u_hat = 1.0 + s * integral;
      const double from_k = 1.0 / (1.0 - lst(k, s));
      r.deviations.push_back(std::abs(u_hat - from_k));
    }
  }
  for (double d : r.deviations) r.max_abs_dev = std::max(r.max_abs_dev, d);
  return r;
}

}  // namespace crp
