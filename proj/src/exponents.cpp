#include "fbl/exponents.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace fbl {

double positive_pow(double base, double expo) {
  if (base < 0.0)
    throw std::domain_error("positive_pow: negative base " + std::to_string(base));
  if (base == 0.0) {
    if (expo > 0.0) return 0.0;
    if (expo == 0.0) return 1.0;
    return std::numeric_limits<double>::infinity();
  }
  return std::exp(expo * std::log(base));
}

GammaParams derive_params(double gamma) {
  if (!(gamma > 0.0 && gamma < 2.0))
    throw std::domain_error("gamma must lie in the open interval (0, 2), got " +
                            std::to_string(gamma));
  GammaParams p;
  p.gamma = gamma;
  p.alpha = 2.0 / (2.0 + gamma);
  p.c_alpha = positive_pow(p.alpha, -p.alpha);
  // Cross-check against the ((gamma+2)/2)^(2/(gamma+2)) form.
  const double c_check = positive_pow(0.5 * (gamma + 2.0), 2.0 / (gamma + 2.0));
  if (std::abs(p.c_alpha - c_check) > 1e-12 * c_check)
    throw std::runtime_error("c_alpha closed forms disagree at gamma=" + std::to_string(gamma));
  p.s = 2.0 * (p.alpha - 1.0);
  p.c_gamma = (2.0 - gamma) * (2.0 - gamma) / 16.0;
  return p;
}

double profile(const GammaParams& p, double t, int order) {
  if (order < 0 || order > 2)
    throw std::invalid_argument("profile: order must be 0, 1, or 2");
  if (t < 0.0) return 0.0;
  if (t == 0.0) {
    if (order == 0) return 0.0;
    // u0' -> +inf and u0'' -> -inf as t -> 0+; report signed infinities,
    // never a silent large number.
    return order == 1 ? std::numeric_limits<double>::infinity()
                      : -std::numeric_limits<double>::infinity();
  }
  double v;
  switch (order) {
    case 0: v = p.c_alpha * positive_pow(t, p.alpha); break;
    case 1: v = p.c_alpha * p.alpha * positive_pow(t, p.alpha - 1.0); break;
    default: v = p.c_alpha * p.alpha * (p.alpha - 1.0) * positive_pow(t, p.alpha - 2.0); break;
  }
  if (!std::isfinite(v))
    throw std::overflow_error("profile: result overflows at t=" + std::to_string(t) +
                              ", order=" + std::to_string(order));
  return v;
}

double profile_inverse(const GammaParams& p, double u_val) {
  if (u_val < 0.0)
    throw std::domain_error("profile_inverse: negative value " + std::to_string(u_val));
  if (u_val == 0.0) return 0.0;
  return positive_pow(u_val / p.c_alpha, 1.0 / p.alpha);
}

double comparison_psi_u(const GammaParams& p, double d, double mu) {
  if (d < 0.0) throw std::domain_error("comparison_psi_u: negative distance");
  if (d == 0.0) return 0.0;
  return p.c_alpha * positive_pow(d, p.alpha) + mu * positive_pow(d, 2.0 - p.alpha);
}

double comparison_psi_w(const GammaParams& p, double d, double mu) {
  if (d < 0.0) throw std::domain_error("comparison_psi_w: negative distance");
  if (d == 0.0) return 0.0;
  return d + mu * positive_pow(d, 1.0 - p.s);
}

double hodograph(const GammaParams& p, double val, HodographDir dir) {
  if (val < 0.0)
    throw std::domain_error("hodograph: negative value " + std::to_string(val));
  if (val == 0.0) return 0.0;
  if (dir == HodographDir::forward)
    return positive_pow(val / p.c_alpha, 1.0 / p.alpha);
  return p.c_alpha * positive_pow(val, p.alpha);
}

}  // namespace fbl
