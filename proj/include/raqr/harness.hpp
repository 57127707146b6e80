#pragma once

// Deterministic Monte Carlo engine: trials, threshold calibration, sweeps.

#include "raqr/config.hpp"
#include "raqr/detectors.hpp"
#include "raqr/specfn.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace raqr {

enum class SweepVariable { None, Shots, RnrDb, RfShots, RfNoisePenaltyDb };

[[nodiscard]] std::string_view sweep_variable_name(SweepVariable v) noexcept;
[[nodiscard]] SweepVariable sweep_variable_from_name(std::string_view name);

enum class Calibration { HeldOut, InSample };

struct ExperimentSpec {
    SystemConfig base;
    SweepVariable sweep_variable = SweepVariable::None;
    std::vector<double> grid{0.0};
    std::int64_t trials = 100000;
    Probability p_fa{0.1};
    Calibration calibration = Calibration::HeldOut;
    // Non-default variance reduction: H1 reuses the H0 noise substream.
    bool common_random_numbers = false;
    // Detectors whose statistics are computed; disabled slots hold 0.
    std::array<bool, 4> enabled{true, true, true, true};
    // Emit roc_pd@pfa=... rows as well.
    bool emit_roc = false;

    // Grid nonempty and strictly monotone, trials >= 100, 0 < p_fa < 1.
    void validate() const;
    [[nodiscard]] SystemConfig config_at(std::size_t grid_index) const;
    [[nodiscard]] bool is_enabled(DetectorKind k) const noexcept { return enabled[static_cast<std::size_t>(k)]; }
};

// Reads [experiment] (grid, trials, calibration, common_random_numbers) and
// detection.p_fa on top of system_config_from(). `fallback_grid` is used
// when experiment.grid is absent.
ExperimentSpec experiment_spec_from(const ConfigFile& file, SweepVariable variable, std::vector<double> fallback_grid);

// "1,2,5", "1:12" (unit step) or "-5:30:2.5".
std::vector<double> parse_grid(const std::string& text);

struct TrialRecord {
    std::int64_t trial_index = 0;
    // Raw statistics, indexed by DetectorKind.
    std::array<double, 4> h0{};
    std::array<double, 4> h1{};
    double ga_map_threshold = 0.0;
    double pa_map_threshold = 0.0;
    // Analytic CFAR thresholds on the raw ED statistics.
    double ed_threshold = 0.0;
    double rf_threshold = 0.0;
    double ed_lambda0 = 0.0;
    double ed_lambda1 = 0.0;
    double rf_lambda = 0.0;
    double ed_pd_analytic = 0.0;
    double rf_pd_analytic = 0.0;

    friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

// The statistic a pooled threshold is swept over. For the LRTs this is the
// log likelihood ratio minus ln eta (statistic minus MAP threshold), which
// makes scores comparable across trials with different scenes; the ED
// kinds use the raw statistic.
[[nodiscard]] double score(const TrialRecord& r, DetectorKind kind, bool under_h1) noexcept;

// Substream layout: (grid_index * trials + trial_index) * kStreamStride + role.
inline constexpr std::uint64_t kStreamStride = 8;
enum StreamRole : std::uint64_t { kChannel = 0, kSignal, kShotsH0, kShotsH1, kRfChannel, kRfH0, kRfH1 };

// Serial reference implementation.
std::vector<TrialRecord> run_trials_serial(const ExperimentSpec& spec, std::size_t grid_index);
// OpenMP version; workers <= 0 means the OpenMP default. Output is
// identical to run_trials_serial for any worker count.
std::vector<TrialRecord> run_trials(const ExperimentSpec& spec, std::size_t grid_index, int workers = 0);

struct Estimate {
    double estimate = 0.0;
    double std_error = 0.0;
    std::int64_t n = 0;
};

[[nodiscard]] double binomial_se(double p, std::int64_t n) noexcept;

// k-th smallest with k = ceil((1 - p_fa) n); deciding H1 when statistic >
// threshold gives an in-sample FA rate of at most p_fa. Needs n >= 100.
[[nodiscard]] double empirical_threshold(std::span<const double> statistics_h0, Probability p_fa);

// Fraction of entries strictly above `threshold`.
[[nodiscard]] Estimate exceed_rate(std::span<const double> statistics, double threshold);

using RocPoint = std::pair<Probability, Probability>;  // (P_FA, P_D)

// Pooled step ROC from (0,0) to (1,1). Needs >= 1000 records.
[[nodiscard]] std::vector<RocPoint> empirical_roc(std::span<const TrialRecord> records, DetectorKind kind);
[[nodiscard]] std::vector<RocPoint> empirical_roc(std::span<const double> h0, std::span<const double> h1);

// Mann-Whitney AUC with ties counted one half; Hanley-McNeil SE.
[[nodiscard]] Estimate auc(std::span<const double> h0, std::span<const double> h1);

// LRT kinds: MAP rule (score > 0), P_e = (P_FA + P_MD) / 2.
// ED kinds: threshold minimizing empirical P_e on `calibration`, evaluated
// on `evaluation` (pass the same records twice for in-sample).
[[nodiscard]] Estimate bayes_error(std::span<const TrialRecord> records, DetectorKind kind);
[[nodiscard]] Estimate bayes_error_min_empirical(std::span<const TrialRecord> calibration,
                                                 std::span<const TrialRecord> evaluation, DetectorKind kind);
// P_e of the fixed rule "H1 iff statistic > threshold".
[[nodiscard]] Estimate bayes_error_at(std::span<const double> h0, std::span<const double> h1, double threshold);

struct SweepRow {
    double grid_value = 0.0;
    std::string detector;
    std::string metric;
    double estimate = 0.0;
    double std_error = 0.0;
    std::int64_t n_trials = 0;
};

struct SweepResult {
    std::vector<SweepRow> rows;

    [[nodiscard]] std::optional<SweepRow> find(double grid_value, DetectorKind kind, std::string_view metric) const;
    void write_csv(std::ostream& out) const;
};

// Metric names used in SweepResult rows.
namespace metric {
inline constexpr std::string_view kPd = "pd";
inline constexpr std::string_view kPfa = "pfa";
inline constexpr std::string_view kPe = "pe";
inline constexpr std::string_view kPeMinEmpirical = "pe_min_empirical";
inline constexpr std::string_view kAuc = "auc";
inline constexpr std::string_view kPdAnalytic = "pd_analytic";
}  // namespace metric

// P_FA grid of the roc_pd@pfa=... rows.
[[nodiscard]] std::span<const double> roc_pfa_grid() noexcept;

// Runs every grid point and summarizes it. `workers` as in run_trials.
SweepResult sweep(const ExperimentSpec& spec, int workers = 0);

// Summary rows for one grid point's records.
void summarize(const ExperimentSpec& spec, double grid_value, std::span<const TrialRecord> records,
               SweepResult& out);

}  // namespace raqr
