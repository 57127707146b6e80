#include "raqr/error.hpp"
#include "raqr/harness.hpp"
#include "raqr/summation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iterator>
#include <limits>
#include <ostream>

namespace raqr {
namespace {

constexpr double kRocPfaGrid[] = {0.001, 0.002, 0.005, 0.01, 0.02, 0.05, 0.1, 0.2,
                                  0.3,   0.4,   0.5,   0.6,  0.7,  0.8,  0.9};

std::vector<double> sorted_copy(std::span<const double> v) {
    std::vector<double> s(v.begin(), v.end());
    std::sort(s.begin(), s.end());
    return s;
}

// Number of entries of sorted `s` strictly above t.
std::size_t count_above(const std::vector<double>& s, double t) {
    return static_cast<std::size_t>(s.end() - std::upper_bound(s.begin(), s.end(), t));
}

std::vector<double> scores(std::span<const TrialRecord> records, DetectorKind kind, bool h1) {
    std::vector<double> out(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) out[i] = score(records[i], kind, h1);
    return out;
}

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

}  // namespace

double score(const TrialRecord& r, DetectorKind kind, bool under_h1) noexcept {
    const auto i = static_cast<std::size_t>(kind);
    const double t = under_h1 ? r.h1[i] : r.h0[i];
    switch (kind) {
        case DetectorKind::GenieLRT: return t - r.ga_map_threshold;
        case DetectorKind::PhaseAvgLRT: return t - r.pa_map_threshold;
        default: return t;
    }
}

double binomial_se(double p, std::int64_t n) noexcept {
    if (n <= 0) return 0.0;
    return std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(n));
}

double empirical_threshold(std::span<const double> statistics_h0, Probability p_fa) {
    const std::size_t n = statistics_h0.size();
    if (n < 100) throw DomainError("empirical_threshold: need at least 100 samples, got " + std::to_string(n));
    if (!(p_fa.value() > 0.0 && p_fa.value() < 1.0)) throw DomainError("empirical_threshold: p_fa must lie in (0,1)");
    std::vector<double> s(statistics_h0.begin(), statistics_h0.end());
    // Guard against (1 - 0.1) * 100 landing a hair above 90.
    auto k = static_cast<std::size_t>(std::ceil(p_fa.complement() * static_cast<double>(n) - 1e-9));
    k = std::clamp<std::size_t>(k, 1, n);
    std::nth_element(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(k - 1), s.end());
    return s[k - 1];
}

Estimate exceed_rate(std::span<const double> statistics, double threshold) {
    std::int64_t hits = 0;
    for (double v : statistics) hits += v > threshold ? 1 : 0;
    const auto n = static_cast<std::int64_t>(statistics.size());
    const double p = n > 0 ? static_cast<double>(hits) / static_cast<double>(n) : 0.0;
    return {p, binomial_se(p, n), n};
}

std::vector<RocPoint> empirical_roc(std::span<const double> h0, std::span<const double> h1) {
    if (h0.empty() || h1.empty()) throw DomainError("empirical_roc: empty statistic list");
    const auto s0 = sorted_copy(h0);
    const auto s1 = sorted_copy(h1);
    std::vector<double> thresholds;
    thresholds.reserve(s0.size() + s1.size());
    std::merge(s0.begin(), s0.end(), s1.begin(), s1.end(), std::back_inserter(thresholds));
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

    const double n0 = static_cast<double>(s0.size());
    const double n1 = static_cast<double>(s1.size());
    std::vector<RocPoint> curve;
    curve.reserve(thresholds.size() + 2);
    curve.emplace_back(Probability(0.0), Probability(0.0));
    // Descending thresholds trace the curve from (0,0) upward.
    for (auto it = thresholds.rbegin(); it != thresholds.rend(); ++it) {
        curve.emplace_back(Probability::clamped(count_above(s0, *it) / n0),
                           Probability::clamped(count_above(s1, *it) / n1));
    }
    curve.emplace_back(Probability(1.0), Probability(1.0));
    return curve;
}

std::vector<RocPoint> empirical_roc(std::span<const TrialRecord> records, DetectorKind kind) {
    if (records.size() < 1000) {
        throw DomainError("empirical_roc: need at least 1000 records, got " + std::to_string(records.size()));
    }
    return empirical_roc(scores(records, kind, false), scores(records, kind, true));
}

Estimate auc(std::span<const double> h0, std::span<const double> h1) {
    if (h0.empty() || h1.empty()) throw DomainError("auc: empty statistic list");
    const auto s0 = sorted_copy(h0);
    CompensatedSum wins;
    for (double v : h1) {
        const auto lo = std::lower_bound(s0.begin(), s0.end(), v);
        const auto hi = std::upper_bound(lo, s0.end(), v);
        wins += static_cast<double>(lo - s0.begin()) + 0.5 * static_cast<double>(hi - lo);
    }
    const double n0 = static_cast<double>(h0.size());
    const double n1 = static_cast<double>(h1.size());
    const double a = wins.value() / (n0 * n1);
    // Hanley and McNeil (1982).
    const double q1 = a / (2.0 - a);
    const double q2 = 2.0 * a * a / (1.0 + a);
    const double var = (a * (1.0 - a) + (n1 - 1.0) * (q1 - a * a) + (n0 - 1.0) * (q2 - a * a)) / (n0 * n1);
    return {a, std::sqrt(std::max(var, 0.0)), static_cast<std::int64_t>(std::min(h0.size(), h1.size()))};
}

Estimate bayes_error_at(std::span<const double> h0, std::span<const double> h1, double threshold) {
    const Estimate fa = exceed_rate(h0, threshold);
    const Estimate det = exceed_rate(h1, threshold);
    const double pe = 0.5 * (fa.estimate + (1.0 - det.estimate));
    const double se = 0.5 * std::hypot(fa.std_error, det.std_error);
    return {pe, se, std::min(fa.n, det.n)};
}

Estimate bayes_error(std::span<const TrialRecord> records, DetectorKind kind) {
    if (!is_lrt(kind)) throw DomainError("bayes_error: MAP rule is defined for the LRT kinds only");
    return bayes_error_at(scores(records, kind, false), scores(records, kind, true), 0.0);
}

Estimate bayes_error_min_empirical(std::span<const TrialRecord> calibration, std::span<const TrialRecord> evaluation,
                                   DetectorKind kind) {
    const auto s0 = sorted_copy(scores(calibration, kind, false));
    const auto s1 = sorted_copy(scores(calibration, kind, true));
    if (s0.empty()) throw DomainError("bayes_error_min_empirical: no calibration records");
    std::vector<double> candidates;
    candidates.reserve(s0.size() + s1.size());
    std::merge(s0.begin(), s0.end(), s1.begin(), s1.end(), std::back_inserter(candidates));
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    const double n0 = static_cast<double>(s0.size());
    const double n1 = static_cast<double>(s1.size());
    double best_t = -std::numeric_limits<double>::infinity();
    double best_pe = 0.5;  // always decide H1
    for (double t : candidates) {
        const double pe = 0.5 * (count_above(s0, t) / n0 + 1.0 - count_above(s1, t) / n1);
        if (pe < best_pe) {
            best_pe = pe;
            best_t = t;
        }
    }
    return bayes_error_at(scores(evaluation, kind, false), scores(evaluation, kind, true), best_t);
}

std::span<const double> roc_pfa_grid() noexcept { return kRocPfaGrid; }

std::optional<SweepRow> SweepResult::find(double grid_value, DetectorKind kind, std::string_view metric) const {
    for (const auto& row : rows) {
        if (row.grid_value == grid_value && row.detector == detector_name(kind) && row.metric == metric) return row;
    }
    return std::nullopt;
}

void SweepResult::write_csv(std::ostream& out) const {
    out << "grid_value,detector,metric,estimate,std_error,n_trials\n";
    for (const auto& r : rows) {
        out << format_number(r.grid_value) << ',' << r.detector << ',' << r.metric << ',' << format_number(r.estimate)
            << ',' << format_number(r.std_error) << ',' << r.n_trials << '\n';
    }
}

void summarize(const ExperimentSpec& spec, double grid_value, std::span<const TrialRecord> records, SweepResult& out) {
    const bool held_out = spec.calibration == Calibration::HeldOut;
    const std::size_t half = held_out ? records.size() / 2 : 0;
    const auto calibration = held_out ? records.first(half) : records;
    const auto evaluation = held_out ? records.subspan(half) : records;

    auto emit = [&](DetectorKind kind, std::string metric, const Estimate& e) {
        out.rows.push_back({grid_value, std::string(detector_name(kind)), std::move(metric), e.estimate, e.std_error, e.n});
    };

    for (DetectorKind kind : kAllDetectors) {
        if (!spec.is_enabled(kind)) continue;
        const auto all0 = scores(records, kind, false);
        const auto all1 = scores(records, kind, true);
        const auto eval0 = scores(evaluation, kind, false);
        const auto eval1 = scores(evaluation, kind, true);

        if (is_lrt(kind)) {
            const double tau = empirical_threshold(scores(calibration, kind, false), spec.p_fa);
            emit(kind, std::string(metric::kPd), exceed_rate(eval1, tau));
            emit(kind, std::string(metric::kPfa), exceed_rate(eval0, tau));
            emit(kind, std::string(metric::kPe), bayes_error(records, kind));
        } else {
            const bool quantum = kind == DetectorKind::QuantumED;
            const double tau = quantum ? records.front().ed_threshold : records.front().rf_threshold;
            emit(kind, std::string(metric::kPd), exceed_rate(all1, tau));
            emit(kind, std::string(metric::kPfa), exceed_rate(all0, tau));
            emit(kind, std::string(metric::kPeMinEmpirical), bayes_error_min_empirical(calibration, evaluation, kind));
            CompensatedSum sum;
            CompensatedSum sq;
            for (const auto& r : records) {
                const double p = quantum ? r.ed_pd_analytic : r.rf_pd_analytic;
                sum += p;
                sq += p * p;
            }
            const double n = static_cast<double>(records.size());
            const double mean = sum.value() / n;
            const double var = n > 1 ? std::max(sq.value() / n - mean * mean, 0.0) * n / (n - 1.0) : 0.0;
            emit(kind, std::string(metric::kPdAnalytic), {mean, std::sqrt(var / n), static_cast<std::int64_t>(n)});
        }
        emit(kind, std::string(metric::kAuc), auc(all0, all1));

        if (spec.emit_roc) {
            const auto cal0 = scores(calibration, kind, false);
            for (double pfa : kRocPfaGrid) {
                const double tau = empirical_threshold(cal0, Probability(pfa));
                char name[48];
                std::snprintf(name, sizeof name, "roc_pd@pfa=%g", pfa);
                emit(kind, name, exceed_rate(eval1, tau));
            }
        }
    }
}

SweepResult sweep(const ExperimentSpec& spec, int workers) {
    spec.validate();
    SweepResult result;
    for (std::size_t g = 0; g < spec.grid.size(); ++g) {
        const auto records = run_trials(spec, g, workers);
        summarize(spec, spec.grid[g], records, result);
    }
    return result;
}

}  // namespace raqr
