#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "raqr/error.hpp"
#include "raqr/harness.hpp"
#include "raqr/manifest.hpp"
#include "raqr/rng.hpp"
#include "raqr/validation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

using namespace raqr;

namespace {

ExperimentSpec small_spec(std::int64_t trials) {
    ExperimentSpec spec;
    spec.trials = trials;
    return spec;
}

// Two-sample KS distance.
double ks2(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    double d = 0;
    while (i < a.size() && j < b.size()) {
        const double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == v) ++i;
        while (j < b.size() && b[j] == v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
    }
    return d;
}

}  // namespace

TEST_CASE("parse_grid forms") {
    CHECK(parse_grid("1,2,5") == std::vector<double>{1, 2, 5});
    CHECK(parse_grid("1:4") == std::vector<double>{1, 2, 3, 4});
    CHECK(parse_grid("-5:5:2.5") == std::vector<double>{-5, -2.5, 0, 2.5, 5});
    CHECK_THROWS_AS(parse_grid(""), ConfigError);
    CHECK_THROWS_AS(parse_grid("3:1"), ConfigError);
    CHECK_THROWS_AS(parse_grid("1,x"), ConfigError);
}

TEST_CASE("ExperimentSpec validation") {
    ExperimentSpec spec = small_spec(100);
    CHECK_NOTHROW(spec.validate());
    spec.trials = 99;
    CHECK_THROWS_AS(spec.validate(), ConfigError);
    spec.trials = 100;
    spec.sweep_variable = SweepVariable::Shots;
    spec.grid = {1, 3, 2};
    CHECK_THROWS_AS(spec.validate(), ConfigError);
    spec.grid = {5, 3, 1};
    CHECK_NOTHROW(spec.validate());
    spec.grid = {1.5};
    CHECK_THROWS_AS(spec.validate(), ConfigError);
    spec.grid = {};
    CHECK_THROWS_AS(spec.validate(), ConfigError);

    const auto file = ConfigFile::parse("[experiment]\ngrid = 1:3\ntrials = 500\ncalibration = in_sample\n[detection]\np_fa = 0.05\n");
    const auto parsed = experiment_spec_from(file, SweepVariable::Shots, {1});
    CHECK(parsed.grid.size() == 3);
    CHECK(parsed.trials == 500);
    CHECK(parsed.calibration == Calibration::InSample);
    CHECK(parsed.p_fa.value() == 0.05);
    CHECK(parsed.config_at(2).shots == 3);
    CHECK_THROWS_AS(experiment_spec_from(ConfigFile::parse("[experiment]\ngird = 1\n"), SweepVariable::Shots, {1}),
                    ConfigError);
}

TEST_CASE("empirical_threshold examples") {
    std::vector<double> v(100);
    std::iota(v.begin(), v.end(), 1.0);
    std::reverse(v.begin(), v.end());
    CHECK(empirical_threshold(v, Probability(0.1)) == 90.0);
    CHECK(exceed_rate(v, 90.0).estimate == doctest::Approx(0.1));

    const std::vector<double> flat(200, 3.25);
    CHECK(empirical_threshold(flat, Probability(0.1)) == 3.25);
    CHECK(exceed_rate(flat, 3.25).estimate == 0.0);

    RngStream s(51, 0);
    std::vector<double> u(100000);
    for (auto& x : u) x = s.next_uniform();
    CHECK(std::abs(empirical_threshold(u, Probability(0.1)) - 0.9) < 0.005);
    CHECK(exceed_rate(u, empirical_threshold(u, Probability(0.1))).estimate <= 0.1);
    CHECK(exceed_rate(u, empirical_threshold(u, Probability(0.1))).estimate >= 0.1 - 1.0 / u.size());

    CHECK_THROWS_AS((void)empirical_threshold(std::vector<double>(99, 1.0), Probability(0.1)), DomainError);
    CHECK_THROWS_AS((void)empirical_threshold(u, Probability(0.0)), DomainError);
}

TEST_CASE("empirical_roc and auc examples") {
    std::vector<double> h0(1000), h1(1000);
    std::iota(h0.begin(), h0.end(), 0.0);
    std::iota(h1.begin(), h1.end(), 5000.0);
    const auto roc = empirical_roc(h0, h1);
    CHECK(roc.front() == RocPoint{Probability(0.0), Probability(0.0)});
    CHECK(roc.back() == RocPoint{Probability(1.0), Probability(1.0)});
    CHECK(std::any_of(roc.begin(), roc.end(), [](const RocPoint& p) { return p.first.value() == 0.0 && p.second.value() == 1.0; }));
    for (std::size_t i = 1; i < roc.size(); ++i) {
        CHECK(roc[i].first.value() >= roc[i - 1].first.value());
        CHECK(roc[i].second.value() >= roc[i - 1].second.value());
    }
    CHECK(auc(h0, h1).estimate == 1.0);

    RngStream s(52, 0);
    std::vector<double> a(10000), b(10000);
    for (auto& x : a) x = s.next_uniform();
    for (auto& x : b) x = s.next_uniform();
    CHECK(std::abs(auc(a, b).estimate - 0.5) < 0.01);
    const auto null_roc = empirical_roc(a, b);
    double worst = 0;
    for (const auto& p : null_roc) worst = std::max(worst, std::abs(p.first.value() - p.second.value()));
    CHECK(worst < 1.63 * std::sqrt(2.0 / 10000));

    CHECK_THROWS_AS((void)empirical_roc(std::vector<TrialRecord>(999), DetectorKind::GenieLRT), DomainError);
}

TEST_CASE("bayes_error examples") {
    std::vector<double> same(1001);
    std::iota(same.begin(), same.end(), 0.0);
    const Estimate pe = bayes_error_at(same, same, 500.0);
    CHECK(std::abs(pe.estimate - 0.5) <= 2 * pe.std_error + 1e-3);

    std::vector<TrialRecord> recs(500);
    for (std::size_t i = 0; i < recs.size(); ++i) {
        recs[i].h0[0] = -1.0 - static_cast<double>(i);
        recs[i].h1[0] = 1.0 + static_cast<double>(i);
        recs[i].h0[2] = static_cast<double>(i);
        recs[i].h1[2] = 1000.0 + static_cast<double>(i);
    }
    CHECK(bayes_error(recs, DetectorKind::GenieLRT).estimate == 0.0);
    CHECK(bayes_error_min_empirical(recs, recs, DetectorKind::QuantumED).estimate == 0.0);
    CHECK_THROWS_AS((void)bayes_error(recs, DetectorKind::QuantumED), DomainError);
}

TEST_CASE("trials are deterministic across repeats and worker counts") {
    ExperimentSpec spec = small_spec(300);
    spec.sweep_variable = SweepVariable::Shots;
    spec.grid = {1, 4};
    const auto serial = run_trials_serial(spec, 1);
    CHECK(serial == run_trials_serial(spec, 1));
    for (int w : {1, 2, 8}) CHECK(run_trials(spec, 1, w) == serial);
    for (const auto& r : serial) {
        for (double v : r.h0) REQUIRE(std::isfinite(v));
        for (double v : r.h1) REQUIRE(std::isfinite(v));
    }
    // A single trial, for the record.
    ExperimentSpec one = small_spec(1);
    CHECK(run_trials(one, 0, 1) == run_trials(one, 0, 8));
    CHECK(run_trials(one, 0, 1).front() == run_trials_serial(one, 0).front());
}

TEST_CASE("sweep output is byte-identical across worker counts") {
    ExperimentSpec spec = small_spec(1000);
    spec.sweep_variable = SweepVariable::Shots;
    spec.grid = {1, 2};
    spec.emit_roc = true;
    std::ostringstream a, b;
    sweep(spec, 1).write_csv(a);
    sweep(spec, 3).write_csv(b);
    CHECK(a.str() == b.str());
    CHECK(a.str().rfind("grid_value,detector,metric,estimate,std_error,n_trials\n", 0) == 0);
}

TEST_CASE("common random numbers pair the noise") {
    ExperimentSpec spec = small_spec(200);
    spec.base.total_power = 0.0;
    spec.common_random_numbers = true;
    for (const auto& r : run_trials(spec, 0, 1)) {
        CHECK(r.h0 == r.h1);
    }
}

TEST_CASE("with zero power the hypotheses are identically distributed") {
    ExperimentSpec spec = small_spec(10000);
    spec.base.total_power = 0.0;
    const auto recs = run_trials(spec, 0);
    const double crit = 1.628 * std::sqrt(2.0 / 10000);
    for (DetectorKind k : {DetectorKind::QuantumED, DetectorKind::ClassicalRfED}) {
        std::vector<double> a, b;
        for (const auto& r : recs) {
            a.push_back(score(r, k, false));
            b.push_back(score(r, k, true));
        }
        CHECK(ks2(a, b) < crit);
    }
    // No signal: the LRT statistics vanish identically under both hypotheses.
    for (const auto& r : recs) {
        REQUIRE(r.h0[0] == 0.0);
        REQUIRE(r.h1[1] == 0.0);
    }
}

TEST_CASE("ED analytic P_D agrees with the empirical rate") {
    ExperimentSpec spec = small_spec(40000);
    spec.enabled = {false, false, true, true};
    const auto res = sweep(spec, 0);
    for (DetectorKind k : {DetectorKind::QuantumED, DetectorKind::ClassicalRfED}) {
        const auto emp = res.find(0.0, k, metric::kPd);
        const auto ana = res.find(0.0, k, metric::kPdAnalytic);
        REQUIRE(emp);
        REQUIRE(ana);
        CHECK(std::abs(emp->estimate - ana->estimate) < 3 * std::hypot(emp->std_error, ana->std_error));
    }
}

TEST_CASE("manifest carries the resolved config") {
    RunManifest m;
    m.experiment_id = "unit";
    m.command = "pd-vs-k";
    m.resolved_config.set("system.seed", "7");
    m.spec = small_spec(100);
    m.spec.base.master_seed = 7;
    const std::string j = manifest_json(m);
    CHECK(j.find("\"system.seed\": \"7\"") != std::string::npos);
    CHECK(j.find("\"tool_version\"") != std::string::npos);
    CHECK(output_stem("pd_shots_pd-vs-k", 7) == "pd_shots_pd-vs-k_seed7");
}
