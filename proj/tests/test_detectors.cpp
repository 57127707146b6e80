#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "raqr/detectors.hpp"
#include "raqr/error.hpp"
#include "raqr/rng.hpp"
#include "raqr/specfn.hpp"

#include <cmath>

using namespace raqr;

namespace {

ShotMatrix shots_of(std::size_t rows, std::size_t cols, std::vector<double> v) {
    return ShotMatrix(RealMatrix(rows, cols, std::move(v)));
}

SystemConfig one_cell(int shots, double eta = 1.0) {
    SystemConfig cfg;
    cfg.n_rx = 1;
    cfg.shots = shots;
    cfg.prior_eta = eta;
    return cfg;
}

}  // namespace

TEST_CASE("detector names round-trip") {
    for (DetectorKind k : kAllDetectors) CHECK(detector_from_name(detector_name(k)) == k);
    CHECK_THROWS_AS(detector_from_name("glrt"), ConfigError);
}

TEST_CASE("ga_statistic examples") {
    const ReferenceField ref{{cplx(1, 0), cplx(0, 2)}};
    const std::vector<cplx> same = {cplx(0, 1), cplx(2, 0)};
    const auto y = shots_of(2, 3, {0.3, 1.2, 4.0, 0.0, 2.0, 7.0});
    CHECK(ga_statistic(y, same, ref, 1.0) == 0.0);
    const auto zeros = shots_of(2, 3, std::vector<double>(6, 0.0));
    CHECK(ga_statistic(zeros, std::vector<cplx>{cplx(3, 0), cplx(5, 0)}, ref, 1.0) == 0.0);

    // ln I0(4) - ln I0(2), oracle values.
    const ReferenceField r1{{cplx(1, 0)}};
    CHECK(ga_statistic(shots_of(1, 1, {1.0}), std::vector<cplx>{cplx(0, 2)}, r1, 1.0) ==
          doctest::Approx(2.424972795515459310 - 0.823993541482956283).epsilon(1e-13));

    CHECK_THROWS_AS(ga_statistic(y, std::vector<cplx>{cplx(1, 0)}, ref, 1.0), DomainError);
    CHECK_THROWS_AS(ga_statistic(y, same, ref, 0.0), DomainError);
}

TEST_CASE("map thresholds") {
    const ReferenceField r1{{cplx(1, 0)}};
    CHECK(ga_map_threshold(one_cell(1), std::vector<cplx>{cplx(0, 1)}, r1) == 0.0);
    CHECK(ga_map_threshold(one_cell(1), std::vector<cplx>{cplx(2, 0)}, r1) == doctest::Approx(3.0));
    CHECK(ga_map_threshold(one_cell(1, std::exp(1.0)), std::vector<cplx>{cplx(2, 0)}, r1) == doctest::Approx(4.0));
    CHECK(pa_map_threshold(one_cell(3), std::vector<double>{1.0}, r1) == 0.0);
    CHECK(pa_map_threshold(one_cell(2), std::vector<double>{2.0}, r1) == doctest::Approx(6.0));
    CHECK(pa_map_threshold(one_cell(2, 0.5), std::vector<double>{2.0}, r1) == doctest::Approx(6.0 + std::log(0.5)));
}

TEST_CASE("pa_statistic examples") {
    const ReferenceField r1{{cplx(1, 0)}};
    CHECK(pa_statistic(shots_of(1, 2, {0.4, 3.0}), std::vector<double>{1.0}, r1, 1.0) == 0.0);
    CHECK(pa_statistic(shots_of(1, 2, {0.0, 0.0}), std::vector<double>{1.7}, r1, 1.0) == 0.0);
    const double abar = specfn::rician_mean(1.0, 1.0);
    // ln I0(2 * 1.2819...) - ln I0(2), oracle 0.4158998...
    CHECK(pa_statistic(shots_of(1, 1, {1.0}), std::vector<double>{abar}, r1, 1.0) ==
          doctest::Approx(0.41589980).epsilon(1e-7));
}

TEST_CASE("pa equals ga when alpha_bar is set to |alpha|") {
    RngStream s(21, 0);
    const std::vector<cplx> alpha = {cplx(0.3, 1.1), cplx(-2.0, 0.4), cplx(0.0, 0.2)};
    const ReferenceField ref{{cplx(1, 0), cplx(1, 0), cplx(1, 0)}};
    std::vector<double> mags;
    for (const auto& a : alpha) mags.push_back(std::abs(a));
    for (int i = 0; i < 20; ++i) {
        RealMatrix m(3, 4);
        for (std::size_t r = 0; r < 3; ++r)
            for (std::size_t c = 0; c < 4; ++c) m(r, c) = sample_rician(s, alpha[r], 1.0);
        const ShotMatrix y(std::move(m));
        CHECK(pa_statistic(y, mags, ref, 1.0) == ga_statistic(y, alpha, ref, 1.0));
    }
}

TEST_CASE("log-domain safety at huge Bessel arguments") {
    const ReferenceField r1{{cplx(1, 0)}};
    const auto y = shots_of(1, 2, {5e5, 1e5});
    CHECK(std::isfinite(ga_statistic(y, std::vector<cplx>{cplx(1.0, 0)}, r1, 1.0)));
    CHECK(std::isfinite(ga_statistic(y, std::vector<cplx>{cplx(1.0, 0.5)}, r1, 1.0)));
    CHECK(std::isfinite(pa_statistic(y, std::vector<double>{0.2}, r1, 1.0)));
}

TEST_CASE("per-shot LRT kernel is nondecreasing in y when |alpha| > |r|") {
    for (double a : {1.1, 2.0, 7.0}) {
        double prev = -1e300;
        for (int i = 0; i <= 4000; ++i) {
            const double y = 0.005 * i;
            const double v = specfn::log_bessel_i0(2 * y * a) - specfn::log_bessel_i0(2 * y * 1.0);
            REQUIRE(v >= prev);
            prev = v;
        }
    }
}

TEST_CASE("ed_statistic and ed_noncentrality examples") {
    CHECK(ed_statistic(shots_of(1, 3, {0, 0, 0})) == 0.0);
    CHECK(ed_statistic(shots_of(1, 1, {3.0})) == 9.0);
    CHECK(ed_statistic(shots_of(2, 2, {1, 2, 3, 4})) == 30.0);

    CHECK(ed_noncentrality(std::vector<cplx>{cplx(0, 0), cplx(0, 0)}, 3, 1.0) == 0.0);
    CHECK(ed_noncentrality(std::vector<cplx>{cplx(1, 0)}, 5, 1.0) == doctest::Approx(10.0));
    CHECK(ed_noncentrality(std::vector<cplx>{cplx(1, 0), cplx(0, 2)}, 2, 2.0) == doctest::Approx(10.0));
}

TEST_CASE("ed_cfar_threshold examples") {
    CHECK(ed_cfar_threshold(Probability(0.1), 1, 0.0, 1.0) == doctest::Approx(-std::log(0.1)).epsilon(1e-11));
    CHECK(ed_cfar_threshold(Probability(std::exp(-2.0)), 1, 0.0, 2.0) == doctest::Approx(4.0).epsilon(1e-11));
    const double tau = ed_cfar_threshold(Probability(0.1), 4, 2.0, 1.0);
    CHECK(std::abs(specfn::marcum_q(4, std::sqrt(2.0), std::sqrt(2.0 * tau)).value() - 0.1) < 1e-9);
}

TEST_CASE("ed_pd_closed_form examples") {
    for (int L : {1, 4, 30}) CHECK(ed_pd_closed_form(Probability(0.1), L, 7.0, 7.0).value() == 0.1);
    CHECK(ed_pd_closed_form(Probability(0.1), 1, 0.0, 0.0).value() == 0.1);

    // L = 4, Lambda0 = 2, Lambda1 = 20 against a 1e6-draw noncentral chi-square.
    const double pd = ed_pd_closed_form(Probability(0.1), 4, 2.0, 20.0).value();
    const double b = specfn::inverse_marcum_q_b(4, std::sqrt(2.0), Probability(0.1));
    RngStream s(31, 0);
    const int n = 1000000;
    int hits = 0;
    // 2L = 8 real Gaussians, mean vector of squared norm 20.
    const double mu = std::sqrt(20.0 / 4.0);
    for (int i = 0; i < n; ++i) {
        double z = 0;
        for (int l = 0; l < 4; ++l) z += std::norm(sample_complex_gaussian(s, cplx(mu / std::sqrt(2.0), mu / std::sqrt(2.0)), 2.0));
        hits += z > b * b;
    }
    const double emp = static_cast<double>(hits) / n;
    CHECK(std::abs(emp - pd) < 3 * std::sqrt(pd * (1 - pd) / n));
}

TEST_CASE("rf energy detector examples") {
    CHECK(rf_ed_statistic(ComplexMatrix(2, 2)) == 0.0);
    CHECK(rf_ed_statistic(ComplexMatrix(1, 1, cplx(3, 4))) == 25.0);
    CHECK(rf_ed_statistic(ComplexMatrix(2, 2, std::vector<cplx>{cplx(1, 0), cplx(0, 1), cplx(1, 1), cplx(0, 0)})) == 4.0);

    CHECK(rf_cfar_threshold(Probability(0.1), 1, 1.0) == doctest::Approx(2.302585092994046).epsilon(1e-11));
    CHECK(rf_cfar_threshold(Probability(0.1), 2, 1.0) == doctest::Approx(0.5 * 7.779440339734858).epsilon(1e-10));
    CHECK(rf_cfar_threshold(Probability(0.1), 7, 2.0) == doctest::Approx(2.0 * rf_cfar_threshold(Probability(0.1), 7, 1.0)).epsilon(1e-12));

    const TransmitSignal zero{{cplx(0, 0), cplx(0, 0)}, 0.0};
    CHECK(rf_noncentrality(Channel{ComplexMatrix(3, 2, cplx(1, 1))}, zero, 4, 1.0) == 0.0);
    ComplexMatrix g(1, 3);
    g(0, 0) = 1.0;
    CHECK(rf_noncentrality(Channel{g}, TransmitSignal{{cplx(1, 0), cplx(0, 1), cplx(-1, 0)}, 1.0}, 1, 2.0) ==
          doctest::Approx(1.0));
    CHECK_THROWS_AS(rf_noncentrality(Channel{g}, zero, 1, 2.0), DomainError);

    RngStream s(41, 0);
    SystemConfig cfg;
    const Channel ch = draw_channel(s, cfg);
    const TransmitSignal x = draw_signal(s, cfg);
    double direct = 0;
    for (std::size_t m = 0; m < ch.gains.rows(); ++m) {
        cplx acc = 0;
        for (std::size_t l = 0; l < ch.gains.cols(); ++l) acc += ch.gains(m, l) * x.symbols[l];
        direct += std::norm(acc);
    }
    CHECK(rf_noncentrality(ch, x, 7, 3.0) == doctest::Approx(2.0 * 7 / 3.0 * direct).epsilon(1e-12));

    CHECK(rf_pd_closed_form(Probability(0.1), 5, 0.0).value() == 0.1);
    // Q_1(2, 2) oracle: 0.6035..., the listed 0.585498 is not Q_1(2,2).
    CHECK(std::abs(rf_pd_closed_form(Probability(std::exp(-2.0)), 1, 4.0).value() - 0.603500960611993349) < 1e-9);
    double prev = 0.0;
    for (int i = 0; i <= 60; ++i) {
        const double pd = rf_pd_closed_form(Probability(0.1), 8, 0.5 * i).value();
        CHECK(pd >= prev);
        if (i > 0) CHECK(pd > prev);
        prev = pd;
    }
}
