#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "raqr/rng.hpp"
#include "raqr/specfn.hpp"
#include "raqr/validation.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <vector>

using namespace raqr;
using namespace raqr::specfn;

namespace {

double rel_err(double got, double want) { return std::abs(got - want) / std::max(1.0, std::abs(want)); }

}  // namespace

TEST_CASE("Probability rejects values outside [0,1]") {
    CHECK(Probability(0.25).value() == 0.25);
    CHECK(Probability(0.25).complement() == 0.75);
    CHECK_THROWS_AS(Probability(-1e-12), DomainError);
    CHECK_THROWS_AS(Probability(1.0 + 1e-12), DomainError);
    CHECK_THROWS_AS(Probability(std::nan("")), DomainError);
    CHECK(Probability::clamped(1.0 + 1e-16).value() == 1.0);
    CHECK(Probability::clamped(-1e-18).value() == 0.0);
}

TEST_CASE("log_bessel_i0 examples") {
    CHECK(log_bessel_i0(0.0) == 0.0);
    CHECK(log_bessel_i0(1.0) == doctest::Approx(0.235914358507178648).epsilon(1e-13));
    CHECK(log_bessel_i0(2.0) == doctest::Approx(0.823993541482956283).epsilon(1e-13));
    CHECK(log_bessel_i0(4.0) == doctest::Approx(2.424972795515459310).epsilon(1e-13));
    // Oracle value; the asymptotic series gives 495.974007668..., not 495.97636.
    CHECK(std::abs(log_bessel_i0(500.0) - 495.974007668106696) < 1e-9);
    CHECK(std::isfinite(log_bessel_i0(1e8)));
    CHECK_THROWS_AS((void)log_bessel_i0(-1.0), DomainError);
    CHECK_THROWS_AS((void)log_bessel_i0(std::numeric_limits<double>::infinity()), DomainError);
    CHECK_THROWS_AS((void)log_bessel_i0(std::nan("")), DomainError);
}

TEST_CASE("log_bessel_i1 examples") {
    CHECK(log_bessel_i1(1.0) == doctest::Approx(-0.570647987490831281).epsilon(1e-13));
    CHECK(log_bessel_i1(2.0) == doctest::Approx(0.464134473546159744).epsilon(1e-13));
    CHECK(log_bessel_i1(0.0) == -std::numeric_limits<double>::infinity());
    CHECK(std::abs(log_bessel_i1(1e-8) - std::log(0.5e-8)) < 1e-15);
    CHECK_THROWS_AS((void)log_bessel_i1(-0.5), DomainError);
}

TEST_CASE("Bessel branches join smoothly at the series/asymptotic seam") {
    const double d = 1e-6;
    for (double x : {15.0}) {
        const double slope0 = std::exp(log_bessel_i1(x) - log_bessel_i0(x));
        CHECK(std::abs(log_bessel_i0(x + d) - log_bessel_i0(x - d) - 2 * d * slope0) < 1e-10);
        // d/dx ln I1 = I0/I1 - 1/x
        const double slope1 = std::exp(log_bessel_i0(x) - log_bessel_i1(x)) - 1.0 / x;
        CHECK(std::abs(log_bessel_i1(x + d) - log_bessel_i1(x - d) - 2 * d * slope1) < 1e-10);
    }
}

TEST_CASE("scaled Bessel logs agree with the unscaled ones") {
    for (double x : {0.0, 0.3, 3.0, 14.0, 16.0, 80.0, 1e4}) {
        CHECK(log_bessel_i0_scaled(x) == doctest::Approx(log_bessel_i0(x) - x).epsilon(1e-12));
    }
    CHECK(log_bessel_i1_scaled(2.0) == doctest::Approx(log_bessel_i1(2.0) - 2.0).epsilon(1e-12));
}

TEST_CASE("laguerre_half examples") {
    CHECK(laguerre_half(0.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(laguerre_half(-1.0) == doctest::Approx(1.446491344083171833).epsilon(1e-12));
    CHECK(std::abs(laguerre_half(-1e6) / 1000.0 - 2.0 / std::sqrt(std::numbers::pi)) < 1e-6);
    CHECK_THROWS_AS((void)laguerre_half(0.1), DomainError);
}

TEST_CASE("rician_log_pdf examples") {
    // Normalized density (2y/s) I0(2 y nu / s) exp(-(y^2 + nu^2) / s).
    CHECK(rician_log_pdf(1.0, 0.0, 1.0) == doctest::Approx(std::log(2.0) - 1.0).epsilon(1e-14));
    CHECK(rician_log_pdf(1.0, 1.0, 1.0) == doctest::Approx(std::log(2.0) - 2.0 + 0.823993541482956283).epsilon(1e-13));
    CHECK(rician_log_pdf(0.0, 1.0, 1.0) == -std::numeric_limits<double>::infinity());
    CHECK(std::isfinite(rician_log_pdf(1e3, 1e3, 1e-2)));
    CHECK_THROWS_AS((void)rician_log_pdf(-1.0, 1.0, 1.0), DomainError);
    CHECK_THROWS_AS((void)rician_log_pdf(1.0, -1.0, 1.0), DomainError);
    CHECK_THROWS_AS((void)rician_log_pdf(1.0, 1.0, 0.0), DomainError);
}

TEST_CASE("rician_mean examples") {
    CHECK(rician_mean(0.0, 1.0) == doctest::Approx(std::sqrt(std::numbers::pi) / 2).epsilon(1e-14));
    CHECK(rician_mean(1.0, 1.0) == doctest::Approx(1.281919576560856866).epsilon(1e-12));
    CHECK(std::abs(rician_mean(100.0, 1.0) - 100.0025) < 1e-3);
    CHECK_THROWS_AS((void)rician_mean(-1.0, 1.0), DomainError);
    CHECK_THROWS_AS((void)rician_mean(1.0, 0.0), DomainError);
}

TEST_CASE("marcum_q examples") {
    for (int L : {1, 3, 40}) CHECK(marcum_q(L, 2.5, 0.0).value() == 1.0);
    CHECK(marcum_q(1, 0.0, 2.0).value() == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
    CHECK(std::abs(marcum_q(1, 1.0, 1.0).value() - 0.732879803796820218) < 1e-10);
    // Oracle value of Q_1(2,2).
    CHECK(std::abs(marcum_q(1, 2.0, 2.0).value() - 0.603500960611993349) < 1e-10);
    CHECK_THROWS_AS((void)marcum_q(0, 1.0, 1.0), DomainError);
    CHECK_THROWS_AS((void)marcum_q(1, -1.0, 1.0), DomainError);
    CHECK_THROWS_AS((void)marcum_q(1, 1.0, -1.0), DomainError);
}

TEST_CASE("marcum_q stays accurate near 1 and at large arguments") {
    CHECK(std::abs(marcum_q(1, 7.0, 1.0).value() - 0.9999999996515039456) < 1e-15);
    CHECK(std::abs(marcum_q(1, 100.0, 100.0).value() - 0.50199473633730236605) < 1e-10);
    CHECK(std::abs(marcum_q(200, 50.0, 55.0).value() - 0.11529903593867904539) < 1e-10);
}

TEST_CASE("inverse_marcum_q_b examples") {
    CHECK(inverse_marcum_q_b(1, 0.0, Probability(0.1)) == doctest::Approx(std::sqrt(-2.0 * std::log(0.1))).epsilon(1e-11));
    CHECK(std::abs(inverse_marcum_q_b(1, 1.0, Probability(0.732879803796820218)) - 1.0) < 1e-8);
    // b^2/2 is the upper-0.1 quantile of Gamma(20, 1) = 25.90252...
    CHECK(std::abs(inverse_marcum_q_b(20, 0.0, Probability(0.1)) - 7.197573008543749313) < 1e-8);
    CHECK_THROWS_AS((void)inverse_marcum_q_b(1, 0.0, Probability(0.0)), DomainError);
    CHECK_THROWS_AS((void)inverse_marcum_q_b(1, 0.0, Probability(1.0)), DomainError);
}

TEST_CASE("Philox4x32-10 known-answer vectors") {
    using A4 = std::array<std::uint32_t, 4>;
    CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) == A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
          A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
          A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("RngStream determinism and stream separation") {
    RngStream a(7, 3);
    RngStream b(7, 3);
    RngStream c(7, 4);
    int same_as_c = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto x = a.next_u64();
        CHECK(x == b.next_u64());
        same_as_c += x == c.next_u64();
    }
    CHECK(same_as_c == 0);

    RngStream u(1, 1);
    for (int i = 0; i < 100000; ++i) {
        const double v = u.next_uniform();
        REQUIRE(v > 0.0);
        REQUIRE(v < 1.0);
    }
    std::vector<int> counts(3);
    for (int i = 0; i < 30000; ++i) ++counts[u.next_index(3)];
    for (int k : counts) CHECK(std::abs(k - 10000) < 400);
}

TEST_CASE("sample_complex_gaussian moments") {
    RngStream s(11, 0);
    const cplx m(0.3, -2.0);
    CHECK(std::abs(sample_complex_gaussian(s, m, 1e-30) - m) < 1e-10);
    CHECK_THROWS_AS((void)sample_complex_gaussian(s, m, 0.0), DomainError);

    const int n = 1000000;
    double sr = 0, si = 0, sr2 = 0;
    for (int i = 0; i < n; ++i) {
        const cplx z = sample_complex_gaussian(s, {0.0, 0.0}, 1.0);
        sr += z.real();
        si += z.imag();
        sr2 += z.real() * z.real();
    }
    CHECK(std::abs(sr / n) < 3.0 / std::sqrt(n));
    CHECK(std::abs(si / n) < 3.0 / std::sqrt(n));
    CHECK(std::abs(sr2 / n - 0.5) < 0.005);
}

TEST_CASE("sample_rician mean and degenerate limit") {
    RngStream s(12, 0);
    CHECK(sample_rician(s, {3.0, 4.0}, 1e-30) == doctest::Approx(5.0).epsilon(1e-12));
    const int n = 1000000;
    double sum = 0;
    for (int i = 0; i < n; ++i) sum += sample_rician(s, {0.0, 1.0}, 1.0);
    CHECK(std::abs(sum / n - rician_mean(1.0, 1.0)) < 0.002);
}

TEST_CASE("reference values file replays") {
    const auto report = validation::reference_values(std::filesystem::path(RAQR_TEST_DATA_DIR) / "reference_values.csv");
    for (const auto& c : report.checks) {
        INFO(c.name << ": " << c.detail);
        CHECK(c.passed);
    }
    CHECK(report.checks.size() == 1);
}

TEST_CASE("a corrupted reference file is a named failure") {
    const auto path = std::filesystem::temp_directory_path() / "raqr_corrupt_reference.csv";
    {
        std::ofstream out(path);
        out << "function,x1,x2,x3,expected,tolerance,tolerance_kind,provenance\n";
        out << "log_bessel_i0,1,,,0.3,1e-12,rel_or_abs,tampered\n";
        out << "marcum_q,1,1,not-a-number,0.7,1e-10,abs,tampered\n";
    }
    const auto report = validation::reference_values(path);
    CHECK_FALSE(report.all_passed());
    CHECK(report.failures() == 3);
    CHECK(report.checks.at(1).name == "reference_values:row2");
    CHECK(report.checks.at(2).name == "reference_values:row3");
    const auto missing = validation::reference_values("/nonexistent/reference_values.csv");
    CHECK_FALSE(missing.all_passed());
    std::filesystem::remove(path);
}

TEST_CASE("special-function properties") {
    const auto report = validation::specfn_properties(20251016);
    for (const auto& c : report.checks) {
        INFO(c.name << " measured " << c.measured << " tol " << c.tolerance);
        CHECK(c.passed);
    }
}
