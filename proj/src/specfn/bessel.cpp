#include "raqr/specfn.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace raqr::specfn {
namespace {

constexpr double kSeriesLimit = 15.0;
constexpr double kTermFloor = 1e-17;

void require_nonnegative(double x, const char* name) {
    if (!std::isfinite(x) || x < 0.0) {
        throw DomainError(std::string(name) + ": argument must be finite and >= 0, got " + std::to_string(x));
    }
}

// log1p of the tail of sum_k q^k / (k! (k + nu)!) beyond the k = 0 term,
// for nu in {0, 1}.
double log_series(double x, int nu) {
    const double q = 0.25 * x * x;
    double term = 1.0;
    double tail = 0.0;
    for (int k = 1; k < 500; ++k) {
        term *= q / (static_cast<double>(k) * static_cast<double>(k + nu));
        tail += term;
        if (term < kTermFloor * (1.0 + tail)) break;
    }
    return std::log1p(tail);
}

// ln of sum_k (-1)^k a_k(nu) / x^k, the bracket of the large-argument
// expansion I_nu(x) ~ e^x / sqrt(2 pi x) * [...]. Stops at the smallest
// term, which is below 1e-13 relative for x > 15.
double log_asymptotic_bracket(double x, int nu) {
    const double mu = 4.0 * nu * nu;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 200; ++k) {
        const double odd = 2.0 * k - 1.0;
        const double next = term * (-(mu - odd * odd)) / (8.0 * k * x);
        if (std::abs(next) >= std::abs(term)) break;
        term = next;
        sum += term;
        if (std::abs(term) < kTermFloor) break;
    }
    return std::log(sum);
}

double log_prefactor_scaled(double x) { return -0.5 * std::log(2.0 * std::numbers::pi * x); }

}  // namespace

double log_bessel_i0(double x) {
    require_nonnegative(x, "log_bessel_i0");
    if (x <= kSeriesLimit) return log_series(x, 0);
    return x + log_prefactor_scaled(x) + log_asymptotic_bracket(x, 0);
}

double log_bessel_i0_scaled(double x) {
    require_nonnegative(x, "log_bessel_i0_scaled");
    if (x <= kSeriesLimit) return log_series(x, 0) - x;
    return log_prefactor_scaled(x) + log_asymptotic_bracket(x, 0);
}

double log_bessel_i1(double x) {
    require_nonnegative(x, "log_bessel_i1");
    if (x == 0.0) return -std::numeric_limits<double>::infinity();
    if (x <= kSeriesLimit) return std::log(0.5 * x) + log_series(x, 1);
    return x + log_prefactor_scaled(x) + log_asymptotic_bracket(x, 1);
}

double log_bessel_i1_scaled(double x) {
    require_nonnegative(x, "log_bessel_i1_scaled");
    if (x == 0.0) return -std::numeric_limits<double>::infinity();
    if (x <= kSeriesLimit) return std::log(0.5 * x) + log_series(x, 1) - x;
    return log_prefactor_scaled(x) + log_asymptotic_bracket(x, 1);
}

double laguerre_half(double x) {
    if (!std::isfinite(x) || x > 0.0) {
        throw DomainError("laguerre_half: argument must be finite and <= 0, got " + std::to_string(x));
    }
    const double u = -0.5 * x;
    const double i0e = std::exp(log_bessel_i0_scaled(u));
    const double i1e = u > 0.0 ? std::exp(log_bessel_i1_scaled(u)) : 0.0;
    return (1.0 + 2.0 * u) * i0e + 2.0 * u * i1e;
}

}  // namespace raqr::specfn
