#pragma once

// Special functions behind the Rician likelihoods and the energy-detector
// thresholds. Every function works in the log or scaled domain where the
// naive form would overflow.
//
// Convention: `sigma2` is always the total complex noise variance, so each
// quadrature of a CN(0, sigma2) variate has variance sigma2 / 2.

#include "raqr/error.hpp"

#include <string>

namespace raqr {

// A probability in [0, 1].
class Probability {
public:
    constexpr Probability() noexcept = default;

    explicit Probability(double value) : value_(value) {
        if (!(value >= 0.0 && value <= 1.0)) {
            throw DomainError("probability out of [0,1]: " + std::to_string(value));
        }
    }

    // Clamps rounding spill (e.g. 1 + 1e-16) back into [0, 1].
    static Probability clamped(double value) {
        if (value < 0.0) return Probability(0.0);
        if (value > 1.0) return Probability(1.0);
        return Probability(value);
    }

    [[nodiscard]] constexpr double value() const noexcept { return value_; }
    [[nodiscard]] constexpr double complement() const noexcept { return 1.0 - value_; }

    friend constexpr bool operator==(Probability, Probability) = default;

private:
    double value_ = 0.0;
};

namespace specfn {

// ln I0(x) for x >= 0. Power series for x <= 15, large-argument asymptotic
// series beyond; finite for any finite x.
[[nodiscard]] double log_bessel_i0(double x);

// ln I1(x) for x >= 0; returns -infinity at x == 0.
[[nodiscard]] double log_bessel_i1(double x);

// ln(e^{-x} I0(x)) and ln(e^{-x} I1(x)). Avoids the cancellation of
// log_bessel_i0(x) - x at large x.
[[nodiscard]] double log_bessel_i0_scaled(double x);
[[nodiscard]] double log_bessel_i1_scaled(double x);

// Laguerre function L_{1/2}(x) for x <= 0, via
//   L_{1/2}(x) = e^{x/2} [(1 - x) I0(-x/2) - x I1(-x/2)].
[[nodiscard]] double laguerre_half(double x);

// Log density of |nu + w|, w ~ CN(0, sigma2):
//   ln[(2y/sigma2) I0(2 y nu / sigma2)] - (y^2 + nu^2) / sigma2.
// Returns -infinity at y == 0.
[[nodiscard]] double rician_log_pdf(double y, double nu, double sigma2);

// E|nu + w| for w ~ CN(0, sigma2): sqrt(pi sigma2 / 4) L_{1/2}(-nu^2 / sigma2).
[[nodiscard]] double rician_mean(double nu, double sigma2);

// Generalized Marcum Q function Q_L(a, b) = Pr(Z > b^2) where Z is
// noncentral chi-square with 2L degrees of freedom and noncentrality a^2.
[[nodiscard]] Probability marcum_q(int order, double a, double b);

// Smallest b with marcum_q(order, a, b) == p, by bracketing and bisection.
// Requires 0 < p < 1. Throws NumericError if no bracket is found.
[[nodiscard]] double inverse_marcum_q_b(int order, double a, Probability p);

}  // namespace specfn
}  // namespace raqr
