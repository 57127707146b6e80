#include "raqr/specfn.hpp"
#include "raqr/summation.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace raqr::specfn {
namespace {

constexpr double kWeightFloor = 1e-17;
constexpr int kResyncEvery = 64;

void validate(int order, double a, double b) {
    if (order < 1) throw DomainError("marcum_q: order must be >= 1, got " + std::to_string(order));
    if (!std::isfinite(a) || a < 0.0) throw DomainError("marcum_q: a must be finite and >= 0");
    if (!std::isfinite(b) || b < 0.0) throw DomainError("marcum_q: b must be finite and >= 0");
}

// ln of the Poisson(x) probability mass at n.
double log_poisson_pmf(double n, double x) { return -x + n * std::log(x) - std::lgamma(n + 1.0); }

// sum_k Pois(k; lambda) G(L + k, x), where G is the regularized upper (sign
// = +1) or lower (sign = -1) incomplete gamma function. For integer order
// G(n + 1, x) = G(n, x) + sign * Poisson(x) mass at n, so after one
// incomplete-gamma evaluation at the Poisson mode the window is walked
// outward until the mixing weights drop below 1e-17 on both sides.
double poisson_gamma_mixture(double L, double lambda, double x, double sign) {
    const double k0 = std::floor(lambda);
    const double w0 = std::exp(-lambda + k0 * std::log(lambda) - std::lgamma(k0 + 1.0));
    const double g0 = sign > 0 ? boost::math::gamma_q(L + k0, x) : boost::math::gamma_p(L + k0, x);
    const double log_x = std::log(x);

    CompensatedSum total;
    total += w0 * g0;
    {
        double w = w0;
        double g = g0;
        double log_p = log_poisson_pmf(L + k0, x);
        for (double k = k0 + 1.0;; k += 1.0) {
            g = std::clamp(g + sign * std::exp(log_p), 0.0, 1.0);
            w *= lambda / k;
            total += w * g;
            if (w < kWeightFloor) break;
            const double n = L + k;
            log_p = static_cast<long long>(k - k0) % kResyncEvery == 0 ? log_poisson_pmf(n, x)
                                                                     : log_p + log_x - std::log(n);
        }
    }
    {
        double w = w0;
        double g = g0;
        for (double k = k0; k > 0.0; k -= 1.0) {
            g = std::clamp(g - sign * std::exp(log_poisson_pmf(L + k - 1.0, x)), 0.0, 1.0);
            w *= k / lambda;
            total += w * g;
            if (w < kWeightFloor) break;
        }
    }
    return total.value();
}

}  // namespace

// Q_L(a, b) = sum_k Pois(k; a^2/2) Q(L + k, b^2/2). Below the mean of the
// mixture the complement is summed instead, so values near 1 keep full
// absolute precision.
Probability marcum_q(int order, double a, double b) {
    validate(order, a, b);
    if (b == 0.0) return Probability(1.0);
    const double x = 0.5 * b * b;
    const double lambda = 0.5 * a * a;
    const double L = order;
    if (lambda == 0.0) return Probability::clamped(boost::math::gamma_q(L, x));
    if (x >= L + lambda) return Probability::clamped(poisson_gamma_mixture(L, lambda, x, +1.0));
    return Probability::clamped(1.0 - poisson_gamma_mixture(L, lambda, x, -1.0));
}

double inverse_marcum_q_b(int order, double a, Probability p) {
    if (order < 1) throw DomainError("inverse_marcum_q_b: order must be >= 1");
    if (!std::isfinite(a) || a < 0.0) throw DomainError("inverse_marcum_q_b: a must be finite and >= 0");
    if (!(p.value() > 0.0 && p.value() < 1.0)) {
        throw DomainError("inverse_marcum_q_b: p must lie in (0,1), got " + std::to_string(p.value()));
    }
    const double target = p.value();
    double lo = 0.0;
    double hi = a + 50.0 * std::sqrt(2.0 * order);
    int expansions = 0;
    while (marcum_q(order, a, hi).value() > target) {
        if (++expansions > 8) {
            throw NumericError("inverse_marcum_q_b: failed to bracket root for L=" + std::to_string(order) +
                               ", a=" + std::to_string(a) + ", p=" + std::to_string(target));
        }
        lo = hi;
        hi *= 2.0;
    }
    // Q_L(a, .) is strictly decreasing: keep Q(lo) > p >= Q(hi).
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (marcum_q(order, a, mid).value() > target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace raqr::specfn
