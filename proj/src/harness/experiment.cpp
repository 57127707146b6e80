#include "raqr/error.hpp"
#include "raqr/harness.hpp"

#include <cmath>
#include <sstream>

namespace raqr {
namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string::npos) return {};
    return s.substr(first, s.find_last_not_of(" \t") - first + 1);
}

double grid_number(const std::string& token) {
    const std::string t = trim(token);
    try {
        std::size_t used = 0;
        const double v = std::stod(t, &used);
        if (used == t.size() && std::isfinite(v)) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError("grid: cannot parse '" + token + "' as a finite number");
}

int integral_value(double v, const char* what) {
    if (v != std::round(v) || v < 1 || v > 1e9) {
        throw ConfigError(std::string(what) + " grid values must be positive integers");
    }
    return static_cast<int>(v);
}

bool parse_bool(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
    if (t == "false" || t == "0" || t == "no" || t == "off") return false;
    throw ConfigError("config key " + key + ": expected a boolean, got '" + text + "'");
}

}  // namespace

std::string_view sweep_variable_name(SweepVariable v) noexcept {
    switch (v) {
        case SweepVariable::None: return "none";
        case SweepVariable::Shots: return "shots";
        case SweepVariable::RnrDb: return "rnr_db";
        case SweepVariable::RfShots: return "rf_shots";
        case SweepVariable::RfNoisePenaltyDb: return "rf_noise_penalty_db";
    }
    return "none";
}

SweepVariable sweep_variable_from_name(std::string_view name) {
    for (auto v : {SweepVariable::None, SweepVariable::Shots, SweepVariable::RnrDb, SweepVariable::RfShots,
                   SweepVariable::RfNoisePenaltyDb}) {
        if (sweep_variable_name(v) == name) return v;
    }
    throw ConfigError("unknown sweep variable: " + std::string(name));
}

std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> out;
    if (text.find(':') != std::string::npos) {
        std::vector<double> parts;
        std::stringstream ss(text);
        for (std::string tok; std::getline(ss, tok, ':');) parts.push_back(grid_number(tok));
        if (parts.size() < 2 || parts.size() > 3) throw ConfigError("grid range must be start:stop[:step]");
        const double step = parts.size() == 3 ? parts[2] : 1.0;
        if (!(step > 0.0)) throw ConfigError("grid step must be > 0");
        const double n = std::floor((parts[1] - parts[0]) / step + 1e-9);
        if (n < 0) throw ConfigError("grid range is empty: " + text);
        for (long i = 0; i <= static_cast<long>(n); ++i) out.push_back(parts[0] + i * step);
        return out;
    }
    std::stringstream ss(text);
    for (std::string tok; std::getline(ss, tok, ',');) {
        if (!trim(tok).empty()) out.push_back(grid_number(tok));
    }
    if (out.empty()) throw ConfigError("grid is empty");
    return out;
}

void ExperimentSpec::validate() const {
    base.validate();
    if (grid.empty()) throw ConfigError("experiment grid must be nonempty");
    if (grid.size() > 1) {
        const bool up = grid[1] > grid[0];
        for (std::size_t i = 1; i < grid.size(); ++i) {
            if (up ? !(grid[i] > grid[i - 1]) : !(grid[i] < grid[i - 1])) {
                throw ConfigError("experiment grid must be strictly monotone");
            }
        }
    }
    if (trials < 100) throw ConfigError("experiment.trials must be >= 100");
    if (!(p_fa.value() > 0.0 && p_fa.value() < 1.0)) throw ConfigError("detection.p_fa must lie in (0, 1)");
    for (std::size_t i = 0; i < grid.size(); ++i) config_at(i).validate();
}

SystemConfig ExperimentSpec::config_at(std::size_t grid_index) const {
    SystemConfig cfg = base;
    const double v = grid.at(grid_index);
    switch (sweep_variable) {
        case SweepVariable::None: break;
        case SweepVariable::Shots: cfg.shots = integral_value(v, "shots"); break;
        case SweepVariable::RnrDb: cfg.rnr_db = v; break;
        case SweepVariable::RfShots: cfg.rf_shots = integral_value(v, "rf_shots"); break;
        case SweepVariable::RfNoisePenaltyDb: cfg.rf_noise_penalty_db = v; break;
    }
    return cfg;
}

ExperimentSpec experiment_spec_from(const ConfigFile& file, SweepVariable variable, std::vector<double> fallback_grid) {
    for (const auto& key : file.keys()) {
        if (key.rfind("experiment.", 0) == 0 && key != "experiment.grid" && key != "experiment.trials" &&
            key != "experiment.calibration" && key != "experiment.common_random_numbers") {
            throw ConfigError("unknown config key: " + key);
        }
    }
    ExperimentSpec spec;
    spec.base = system_config_from(file);
    spec.sweep_variable = variable;
    spec.grid = std::move(fallback_grid);
    if (auto g = file.get("experiment.grid")) spec.grid = parse_grid(*g);
    if (variable == SweepVariable::None && spec.grid.size() != 1) {
        throw ConfigError("experiment.grid must hold a single value when nothing is swept");
    }
    if (auto t = file.get("experiment.trials")) {
        try {
            std::size_t used = 0;
            spec.trials = std::stoll(trim(*t), &used);
            if (used != trim(*t).size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw ConfigError("config key experiment.trials: expected an integer, got '" + *t + "'");
        }
    }
    if (auto c = file.get("experiment.calibration")) {
        if (*c == "held_out") {
            spec.calibration = Calibration::HeldOut;
        } else if (*c == "in_sample") {
            spec.calibration = Calibration::InSample;
        } else {
            throw ConfigError("experiment.calibration must be held_out or in_sample, got '" + *c + "'");
        }
    }
    if (auto c = file.get("experiment.common_random_numbers")) {
        spec.common_random_numbers = parse_bool("experiment.common_random_numbers", *c);
    }
    if (auto p = file.get("detection.p_fa")) {
        double v = 0.0;
        try {
            v = std::stod(*p);
        } catch (const std::exception&) {
            throw ConfigError("config key detection.p_fa: expected a real number, got '" + *p + "'");
        }
        if (!(v > 0.0 && v < 1.0)) throw ConfigError("detection.p_fa must lie in (0, 1)");
        spec.p_fa = Probability(v);
    }
    spec.validate();
    return spec;
}

}  // namespace raqr
