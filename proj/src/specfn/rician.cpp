#include "raqr/specfn.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace raqr::specfn {
namespace {

void require(bool ok, const char* what) {
    if (!ok) throw DomainError(what);
}

}  // namespace

double rician_log_pdf(double y, double nu, double sigma2) {
    require(std::isfinite(y) && y >= 0.0, "rician_log_pdf: y must be finite and >= 0");
    require(std::isfinite(nu) && nu >= 0.0, "rician_log_pdf: nu must be finite and >= 0");
    require(std::isfinite(sigma2) && sigma2 > 0.0, "rician_log_pdf: sigma2 must be finite and > 0");
    if (y == 0.0) return -std::numeric_limits<double>::infinity();
    // ln I0(z) - (y^2 + nu^2)/sigma2 == ln(e^{-z} I0(z)) - (y - nu)^2/sigma2 with z = 2 y nu / sigma2.
    const double z = 2.0 * y * nu / sigma2;
    const double d = y - nu;
    return std::log(2.0 * y / sigma2) + log_bessel_i0_scaled(z) - d * d / sigma2;
}

double rician_mean(double nu, double sigma2) {
    require(std::isfinite(nu) && nu >= 0.0, "rician_mean: nu must be finite and >= 0");
    require(std::isfinite(sigma2) && sigma2 > 0.0, "rician_mean: sigma2 must be finite and > 0");
    return std::sqrt(std::numbers::pi * sigma2 / 4.0) * laguerre_half(-nu * nu / sigma2);
}

}  // namespace raqr::specfn
