#include "crp/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

namespace crp {

namespace {
constexpr unsigned kMaxDepth = 20;
}

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double rel_tol, double abs_tol) {
  QuadratureResult out;
  double l1 = 0.0;
  try {
    out.value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        f, a, b, kMaxDepth, rel_tol, &out.error, &l1);
  } catch (const std::exception&) {
    // boost raises on non-finite integrand values
    out.value = std::numeric_limits<double>::infinity();
    out.error = std::numeric_limits<double>::infinity();
    return out;
  }
  out.converged = std::isfinite(out.value) && std::isfinite(out.error) &&
                  out.error <= std::max(abs_tol, 10.0 * rel_tol * l1);
  return out;
}

QuadratureResult integrate_half_line(const std::function<double(double)>& f, double split,
                                     double rel_tol, double abs_tol) {
  const auto head = integrate(f, 0.0, split, rel_tol, abs_tol);
  const auto tail = integrate(f, split, std::numeric_limits<double>::infinity(), rel_tol, abs_tol);
  return {head.value + tail.value, head.error + tail.error, head.converged && tail.converged};
}

}  // namespace crp
