#include "raqr/error.hpp"
#include "raqr/harness.hpp"
#include "raqr/scene.hpp"

#include <omp.h>

#include <cmath>
#include <exception>
#include <mutex>

namespace raqr {
namespace {

// Everything that is constant across the trials of one grid point.
struct GridContext {
    SystemConfig cfg;
    ReferenceField reference;
    std::vector<double> reference_magnitude;
    std::vector<cplx> rf_null_means;
    double rf_noise_var = 0.0;
    int ed_dof = 1;
    int rf_dof = 1;
    double ed_lambda0 = 0.0;
    double ed_threshold = 0.0;
    double ed_b = 0.0;  // sqrt(2 ed_threshold / sigma2)
    double rf_threshold = 0.0;
    double rf_b = 0.0;
};

GridContext make_context(const ExperimentSpec& spec, std::size_t grid_index) {
    GridContext ctx;
    ctx.cfg = spec.config_at(grid_index);
    ctx.cfg.validate();
    const auto& cfg = ctx.cfg;
    ctx.reference = make_reference(cfg);
    for (const cplx& r : ctx.reference.values) ctx.reference_magnitude.push_back(std::abs(r));
    ctx.rf_null_means.assign(static_cast<std::size_t>(cfg.n_rx), cplx{});
    ctx.rf_noise_var = cfg.rf_noise_var();
    ctx.ed_dof = cfg.n_rx * cfg.shots;
    ctx.rf_dof = cfg.n_rx * cfg.rf_shots;
    ctx.ed_lambda0 = ed_noncentrality(ctx.reference.values, cfg.shots, cfg.noise_var);
    ctx.ed_threshold = ed_cfar_threshold(spec.p_fa, ctx.ed_dof, ctx.ed_lambda0, cfg.noise_var);
    ctx.ed_b = std::sqrt(2.0 * ctx.ed_threshold / cfg.noise_var);
    ctx.rf_threshold = rf_cfar_threshold(spec.p_fa, ctx.rf_dof, ctx.rf_noise_var);
    ctx.rf_b = std::sqrt(2.0 * ctx.rf_threshold / ctx.rf_noise_var);
    return ctx;
}

TrialRecord run_one(const ExperimentSpec& spec, const GridContext& ctx, std::size_t grid_index, std::int64_t trial) {
    const auto& cfg = ctx.cfg;
    const std::uint64_t base =
        (static_cast<std::uint64_t>(grid_index) * static_cast<std::uint64_t>(spec.trials) +
         static_cast<std::uint64_t>(trial)) * kStreamStride;
    const std::uint64_t seed = cfg.master_seed;

    RngStream channel_stream(seed, base + kChannel);
    RngStream signal_stream(seed, base + kSignal);
    Scene scene = build_scene(draw_channel(channel_stream, cfg), draw_signal(signal_stream, cfg), ctx.reference, cfg);

    TrialRecord rec;
    rec.trial_index = trial;
    rec.ed_threshold = ctx.ed_threshold;
    rec.rf_threshold = ctx.rf_threshold;
    rec.ed_lambda0 = ctx.ed_lambda0;

    const bool want_raqr = spec.is_enabled(DetectorKind::GenieLRT) || spec.is_enabled(DetectorKind::PhaseAvgLRT) ||
                           spec.is_enabled(DetectorKind::QuantumED);
    if (want_raqr) {
        RngStream h0_stream(seed, base + kShotsH0);
        RngStream h1_stream(seed, base + (spec.common_random_numbers ? kShotsH0 : kShotsH1));
        const ShotMatrix y0 = generate_shots(h0_stream, ctx.reference.values, cfg.noise_var, cfg.shots);
        const ShotMatrix y1 = generate_shots(h1_stream, scene.alpha, cfg.noise_var, cfg.shots);

        std::vector<double> alpha_magnitude(scene.alpha.size());
        for (std::size_t m = 0; m < scene.alpha.size(); ++m) alpha_magnitude[m] = std::abs(scene.alpha[m]);

        constexpr auto ga = static_cast<std::size_t>(DetectorKind::GenieLRT);
        constexpr auto pa = static_cast<std::size_t>(DetectorKind::PhaseAvgLRT);
        constexpr auto ed = static_cast<std::size_t>(DetectorKind::QuantumED);
        if (spec.is_enabled(DetectorKind::GenieLRT)) {
            rec.h0[ga] = lrt_statistic(y0, alpha_magnitude, ctx.reference_magnitude, cfg.noise_var);
            rec.h1[ga] = lrt_statistic(y1, alpha_magnitude, ctx.reference_magnitude, cfg.noise_var);
            rec.ga_map_threshold = lrt_map_threshold(cfg.prior_eta, cfg.shots, cfg.noise_var, alpha_magnitude,
                                                     ctx.reference_magnitude);
        }
        if (spec.is_enabled(DetectorKind::PhaseAvgLRT)) {
            rec.h0[pa] = lrt_statistic(y0, scene.alpha_bar, ctx.reference_magnitude, cfg.noise_var);
            rec.h1[pa] = lrt_statistic(y1, scene.alpha_bar, ctx.reference_magnitude, cfg.noise_var);
            rec.pa_map_threshold = lrt_map_threshold(cfg.prior_eta, cfg.shots, cfg.noise_var, scene.alpha_bar,
                                                     ctx.reference_magnitude);
        }
        if (spec.is_enabled(DetectorKind::QuantumED)) {
            rec.h0[ed] = ed_statistic(y0);
            rec.h1[ed] = ed_statistic(y1);
            rec.ed_lambda1 = ed_noncentrality(scene.alpha, cfg.shots, cfg.noise_var);
            rec.ed_pd_analytic = rec.ed_lambda1 == ctx.ed_lambda0
                                     ? spec.p_fa.value()
                                     : specfn::marcum_q(ctx.ed_dof, std::sqrt(rec.ed_lambda1), ctx.ed_b).value();
        }
    }

    if (spec.is_enabled(DetectorKind::ClassicalRfED)) {
        constexpr auto rf = static_cast<std::size_t>(DetectorKind::ClassicalRfED);
        RngStream rf_channel_stream(seed, base + kRfChannel);
        RngStream rf0_stream(seed, base + kRfH0);
        RngStream rf1_stream(seed, base + (spec.common_random_numbers ? kRfH0 : kRfH1));
        const Channel rf_channel = draw_channel(rf_channel_stream, cfg);
        const std::vector<cplx> rf_means = project(rf_channel, scene.signal);
        rec.h0[rf] = rf_ed_statistic(generate_rf_samples(rf0_stream, ctx.rf_null_means, ctx.rf_noise_var, cfg.rf_shots));
        rec.h1[rf] = rf_ed_statistic(generate_rf_samples(rf1_stream, rf_means, ctx.rf_noise_var, cfg.rf_shots));
        rec.rf_lambda = ed_noncentrality(rf_means, cfg.rf_shots, ctx.rf_noise_var);
        rec.rf_pd_analytic = rec.rf_lambda == 0.0
                                 ? spec.p_fa.value()
                                 : specfn::marcum_q(ctx.rf_dof, std::sqrt(rec.rf_lambda), ctx.rf_b).value();
    }
    return rec;
}

void check_run(const ExperimentSpec& spec, std::size_t grid_index) {
    if (spec.trials < 1) throw ConfigError("trials must be >= 1");
    if (grid_index >= spec.grid.size()) throw ConfigError("grid index out of range");
}

}  // namespace

std::vector<TrialRecord> run_trials_serial(const ExperimentSpec& spec, std::size_t grid_index) {
    check_run(spec, grid_index);
    const GridContext ctx = make_context(spec, grid_index);
    std::vector<TrialRecord> out(static_cast<std::size_t>(spec.trials));
    for (std::int64_t t = 0; t < spec.trials; ++t) out[static_cast<std::size_t>(t)] = run_one(spec, ctx, grid_index, t);
    return out;
}

std::vector<TrialRecord> run_trials(const ExperimentSpec& spec, std::size_t grid_index, int workers) {
    check_run(spec, grid_index);
    const GridContext ctx = make_context(spec, grid_index);
    std::vector<TrialRecord> out(static_cast<std::size_t>(spec.trials));
    const int threads = workers > 0 ? workers : omp_get_max_threads();
    std::exception_ptr failure;
    std::mutex failure_mutex;

#pragma omp parallel for schedule(dynamic, 256) num_threads(threads)
    for (std::int64_t t = 0; t < spec.trials; ++t) {
        try {
            out[static_cast<std::size_t>(t)] = run_one(spec, ctx, grid_index, t);
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

}  // namespace raqr
