// raqr: experiment driver and self-check.

#include "raqr/config.hpp"
#include "raqr/detectors.hpp"
#include "raqr/error.hpp"
#include "raqr/harness.hpp"
#include "raqr/manifest.hpp"
#include "raqr/scene.hpp"
#include "raqr/validation.hpp"

#include <CLI11.hpp>

#include <omp.h>

#include <charconv>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>

#ifndef RAQR_DEFAULT_DATA_DIR
#define RAQR_DEFAULT_DATA_DIR "data"
#endif

namespace {

using namespace raqr;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitUsage = 2;

struct CommonOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::int64_t> trials;
    int workers = 0;
    std::string out_dir;
    std::vector<std::string> overrides;
    bool in_sample = false;
    bool crn = false;
    std::vector<std::string> detectors;
};

struct Experiment {
    std::string command;
    SweepVariable variable;
    std::vector<double> default_grid;
    std::vector<DetectorKind> default_detectors;
    bool emit_roc = false;
};

// Shortest text that reads back to the same double.
std::string num(double v) {
    char buf[32];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

std::vector<double> range(double lo, double hi, double step = 1.0) {
    return parse_grid(num(lo) + ":" + num(hi) + ":" + num(step));
}

std::filesystem::path default_out_dir() {
    if (const char* env = std::getenv("RAQR_OUT_DIR"); env != nullptr && *env != '\0') return env;
    return "results";
}

void add_common(CLI::App* sub, CommonOptions& o) {
    sub->add_option("--config", o.config_path, "Configuration file (sectioned key = value)");
    sub->add_option("--seed", o.seed, "Master seed (overrides system.seed)");
    sub->add_option("--trials", o.trials, "Monte Carlo trials per grid point (overrides experiment.trials)");
    sub->add_option("--workers", o.workers, "OpenMP worker threads (default: all)")->check(CLI::NonNegativeNumber);
    sub->add_option("--out", o.out_dir, "Output directory (default: $RAQR_OUT_DIR or ./results)");
    sub->add_option("--set", o.overrides, "Override, section.key=value (repeatable)")->take_all();
    sub->add_flag("--in-sample", o.in_sample, "Calibrate LRT thresholds on the evaluation trials");
    sub->add_flag("--crn", o.crn, "Common random numbers: H1 reuses the H0 noise (non-default)");
    sub->add_option("--detectors", o.detectors, "Subset of genie_lrt,phase_avg_lrt,quantum_ed,rf_ed")->delimiter(',');
}

ConfigFile resolve_config(const CommonOptions& o) {
    ConfigFile file = o.config_path.empty() ? ConfigFile{} : ConfigFile::load(o.config_path);
    for (const auto& kv : o.overrides) file.set_assignment(kv);
    if (o.seed) file.set("system.seed", std::to_string(*o.seed));
    if (o.trials) file.set("experiment.trials", std::to_string(*o.trials));
    if (o.in_sample) file.set("experiment.calibration", "in_sample");
    if (o.crn) file.set("experiment.common_random_numbers", "true");
    static const std::set<std::string> sections = {"system", "raqr", "rf", "detection", "experiment", "timing"};
    for (const auto& key : file.keys()) {
        if (!sections.contains(key.substr(0, key.find('.')))) throw ConfigError("unknown config section in key: " + key);
        if (key.rfind("timing.", 0) == 0 && key != "timing.signal_interval_s" && key != "timing.relaxation_s" &&
            key != "timing.readout_s") {
            throw ConfigError("unknown config key: " + key);
        }
    }
    return file;
}

// The shot budget of the multi-shot limit, when the config carries timing.
void warn_shot_budget(const ConfigFile& file, const ExperimentSpec& spec) {
    const auto t_sig = file.get("timing.signal_interval_s");
    const auto t_r = file.get("timing.relaxation_s");
    const auto t_n = file.get("timing.readout_s");
    if (!t_sig && !t_r && !t_n) return;
    if (!t_sig || !t_r || !t_n) throw ConfigError("timing section needs signal_interval_s, relaxation_s and readout_s");
    const int bound = max_shots(std::stod(*t_sig), std::stod(*t_r), std::stod(*t_n));
    int worst = 0;
    for (std::size_t g = 0; g < spec.grid.size(); ++g) worst = std::max(worst, spec.config_at(g).shots);
    if (worst > bound) {
        std::cerr << "warning: " << worst << " shots exceed the " << bound
                  << " approximately independent shots that fit in one signalling interval\n";
    }
}

int run_experiment(const Experiment& ex, const CommonOptions& o) {
    const auto start = std::chrono::system_clock::now();
    ConfigFile file = resolve_config(o);
    ExperimentSpec spec = experiment_spec_from(file, ex.variable, ex.default_grid);
    spec.emit_roc = ex.emit_roc;
    spec.enabled = {false, false, false, false};
    if (o.detectors.empty()) {
        for (auto k : ex.default_detectors) spec.enabled[static_cast<std::size_t>(k)] = true;
    } else {
        for (const auto& name : o.detectors) spec.enabled[static_cast<std::size_t>(detector_from_name(name))] = true;
    }
    warn_shot_budget(file, spec);

    // Echo exactly what runs.
    store_system_config(spec.base, file);
    file.set("experiment.trials", std::to_string(spec.trials));
    file.set("experiment.calibration", spec.calibration == Calibration::HeldOut ? "held_out" : "in_sample");
    file.set("experiment.common_random_numbers", spec.common_random_numbers ? "true" : "false");
    std::string grid_text;
    for (double g : spec.grid) grid_text += (grid_text.empty() ? "" : ",") + num(g);
    file.set("experiment.grid", grid_text);
    file.set("detection.p_fa", num(spec.p_fa.value()));

    const int workers = o.workers > 0 ? o.workers : omp_get_max_threads();
    const SweepResult result = sweep(spec, workers);

    std::string id = ex.command;
    if (!o.config_path.empty()) id = std::filesystem::path(o.config_path).stem().string() + "_" + id;
    RunManifest manifest{id, ex.command, file, spec, workers, start, std::chrono::system_clock::now(), {}};
    const auto dir = o.out_dir.empty() ? default_out_dir() : std::filesystem::path(o.out_dir);
    for (const auto& p : write_run(dir, std::move(manifest), result)) std::cout << p.string() << '\n';
    return kExitOk;
}

int run_validate(const std::string& data_dir, const std::string& out_dir, std::uint64_t seed, bool quick) {
    namespace v = raqr::validation;
    v::Report report = v::reference_values(std::filesystem::path(data_dir) / "reference_values.csv");
    report.append(v::specfn_properties(seed));
    report.append(v::sampler_fidelity(seed, 10, quick ? 20000 : 100000));
    report.append(v::ed_exactness(seed, quick ? 20000 : 100000, quick ? 3 : 10, quick ? 20000 : 100000));

    // CFAR honesty and null safety through the full harness.
    ExperimentSpec spec;
    spec.base.master_seed = seed;
    spec.trials = quick ? 20000 : 100000;
    const SweepResult honest = sweep(spec);
    spec.base.total_power = 0.0;
    const SweepResult null = sweep(spec);
    for (DetectorKind k : kAllDetectors) {
        const auto fa = honest.find(0.0, k, metric::kPfa);
        const double se = binomial_se(0.1, fa->n_trials);
        report.add({"cfar_honesty:" + std::string(detector_name(k)), std::abs(fa->estimate - 0.1) <= 3 * se,
                    std::abs(fa->estimate - 0.1), 3 * se, "held-out P_FA " + std::to_string(fa->estimate)});
        const auto pd = null.find(0.0, k, metric::kPd);
        const auto pf = null.find(0.0, k, metric::kPfa);
        const double se2 = std::hypot(pd->std_error, pf->std_error);
        const double tol = 3 * std::max(se2, 1.0 / static_cast<double>(pd->n_trials));
        report.add({"null_safety:" + std::string(detector_name(k)), std::abs(pd->estimate - pf->estimate) <= tol,
                    std::abs(pd->estimate - pf->estimate), tol,
                    "P_D " + std::to_string(pd->estimate) + " vs P_FA " + std::to_string(pf->estimate)});
    }

    report.print(std::cout);
    const auto dir = out_dir.empty() ? default_out_dir() : std::filesystem::path(out_dir);
    std::filesystem::create_directories(dir);
    const auto path = dir / ("validate_seed" + std::to_string(seed) + ".json");
    std::ofstream(path) << report.json();
    std::cout << (report.all_passed() ? "all " : "") << report.checks.size() - report.failures() << "/"
              << report.checks.size() << " checks passed; report: " << path.string() << '\n';
    return report.all_passed() ? kExitOk : kExitValidation;
}

// Per-cell decomposition of every statistic for one trial.
int run_inspect(const CommonOptions& o, std::int64_t trial) {
    ConfigFile file = resolve_config(o);
    ExperimentSpec spec = experiment_spec_from(file, SweepVariable::None, {0.0});
    const SystemConfig& cfg = spec.base;
    const std::uint64_t base = static_cast<std::uint64_t>(trial) * kStreamStride;
    RngStream ch(cfg.master_seed, base + kChannel);
    RngStream sg(cfg.master_seed, base + kSignal);
    RngStream s0(cfg.master_seed, base + kShotsH0);
    RngStream s1(cfg.master_seed, base + kShotsH1);
    const Scene scene = build_scene(draw_channel(ch, cfg), draw_signal(sg, cfg), make_reference(cfg), cfg);
    const ShotMatrix y0 = generate_shots(s0, scene.reference.values, cfg.noise_var, cfg.shots);
    const ShotMatrix y1 = generate_shots(s1, scene.alpha, cfg.noise_var, cfg.shots);
    std::vector<double> amag;
    std::vector<double> rmag;
    for (const auto& a : scene.alpha) amag.push_back(std::abs(a));
    for (const auto& r : scene.reference.values) rmag.push_back(std::abs(r));

    std::cout << "cell,|alpha|,alpha_bar,|r|,sigma_v2,hyp,ga_term,pa_term,ed_term\n";
    for (int h = 0; h < 2; ++h) {
        const ShotMatrix& y = h == 0 ? y0 : y1;
        const auto ga = lrt_cell_terms(y, amag, rmag, cfg.noise_var);
        const auto pa = lrt_cell_terms(y, scene.alpha_bar, rmag, cfg.noise_var);
        for (std::size_t m = 0; m < y.cells(); ++m) {
            double e = 0.0;
            for (double v : y.cell(m)) e += v * v;
            std::cout << m << ',' << amag[m] << ',' << scene.alpha_bar[m] << ',' << rmag[m] << ',' << scene.sigma_v2[m]
                      << ",H" << h << ',' << ga[m] << ',' << pa[m] << ',' << e << '\n';
        }
    }
    std::cout << "ga_map_threshold," << ga_map_threshold(cfg, scene.alpha, scene.reference) << '\n';
    std::cout << "pa_map_threshold," << pa_map_threshold(cfg, scene.alpha_bar, scene.reference) << '\n';
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-shot RAQR detection experiments"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kToolVersion));

    const std::vector<DetectorKind> raqr3(kRaqrDetectors.begin(), kRaqrDetectors.end());
    const std::vector<DetectorKind> eds = {DetectorKind::QuantumED, DetectorKind::ClassicalRfED};
    const std::vector<Experiment> experiments = {
        {"roc", SweepVariable::Shots, {1, 5}, raqr3, true},
        {"pd-vs-k", SweepVariable::Shots, range(1, 12), raqr3, false},
        {"pe-vs-k", SweepVariable::Shots, range(1, 12), raqr3, false},
        {"rnr-sweep", SweepVariable::RnrDb, range(-5, 30), eds, false},
        {"rf-compare", SweepVariable::RfShots, range(1, 200), eds, false},
    };
    const char* help[] = {"ROC curves (roc_pd@pfa rows) for each K",
                          "P_D at CFAR P_FA versus shots K",
                          "Bayesian P_e versus shots K",
                          "P_D versus reference-to-noise ratio",
                          "P_D versus RF samples K_RF"};

    std::vector<CommonOptions> options(experiments.size() + 1);
    std::vector<CLI::App*> subs;
    for (std::size_t i = 0; i < experiments.size(); ++i) {
        subs.push_back(app.add_subcommand(experiments[i].command, help[i]));
        add_common(subs.back(), options[i]);
    }
    auto* inspect = app.add_subcommand("inspect", "Per-cell statistic decomposition for one scene");
    std::int64_t inspect_trial = 0;
    add_common(inspect, options.back());
    inspect->add_option("--trial", inspect_trial, "Trial index whose substreams are used");

    auto* validate = app.add_subcommand("validate", "Run the self-validation suite");
    std::string data_dir = RAQR_DEFAULT_DATA_DIR;
    std::string validate_out;
    std::uint64_t validate_seed = 20251016;
    bool quick = false;
    validate->add_option("--data", data_dir, "Directory holding reference_values.csv");
    validate->add_option("--out", validate_out, "Report directory (default: $RAQR_OUT_DIR or ./results)");
    validate->add_option("--seed", validate_seed, "Seed for the statistical checks");
    validate->add_flag("--quick", quick, "Smaller Monte Carlo sizes");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (validate->parsed()) return run_validate(data_dir, validate_out, validate_seed, quick);
        if (inspect->parsed()) return run_inspect(options.back(), inspect_trial);
        for (std::size_t i = 0; i < experiments.size(); ++i) {
            if (subs[i]->parsed()) return run_experiment(experiments[i], options[i]);
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    }
    return kExitUsage;
}
