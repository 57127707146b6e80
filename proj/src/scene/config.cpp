#include "raqr/config.hpp"
#include "raqr/error.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace raqr {
namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::pair<std::string, std::string> split_key(const std::string& dotted) {
    const auto dot = dotted.find('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == dotted.size()) {
        throw ConfigError("config key must look like section.key, got '" + dotted + "'");
    }
    return {trim(dotted.substr(0, dot)), trim(dotted.substr(dot + 1))};
}

std::string format_double(double v) {
    if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

double parse_double(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    if (t == "off" || t == "-inf") return -std::numeric_limits<double>::infinity();
    try {
        std::size_t used = 0;
        const double v = std::stod(t, &used);
        if (used != t.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key " + key + ": expected a real number, got '" + text + "'");
    }
}

std::int64_t parse_int(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size()) {
        throw ConfigError("config key " + key + ": expected an integer, got '" + text + "'");
    }
    return v;
}

std::uint64_t parse_u64(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size()) {
        throw ConfigError("config key " + key + ": expected an unsigned 64-bit integer, got '" + text + "'");
    }
    return v;
}

const std::set<std::string>& system_keys() {
    static const std::set<std::string> keys = {
        "system.n_tx",  "system.n_rx",         "system.psk_order", "system.total_power",     "system.noise_var",
        "system.seed",  "raqr.shots",          "raqr.rnr_db",      "rf.shots",               "rf.noise_penalty_db",
        "detection.prior_eta"};
    return keys;
}

}  // namespace

void SystemConfig::validate() const {
    auto fail = [](const std::string& what) { throw ConfigError("invalid config: " + what); };
    if (n_tx < 1) fail("system.n_tx must be >= 1");
    if (n_rx < 1) fail("system.n_rx must be >= 1");
    if (shots < 1) fail("raqr.shots must be >= 1");
    if (psk_order < 2) fail("system.psk_order must be >= 2");
    if (!std::isfinite(total_power) || total_power < 0.0) fail("system.total_power must be finite and >= 0");
    if (!std::isfinite(noise_var) || noise_var <= 0.0) fail("system.noise_var must be finite and > 0");
    if (std::isnan(rnr_db) || rnr_db == std::numeric_limits<double>::infinity()) fail("raqr.rnr_db must be finite or -inf");
    if (!std::isfinite(rf_noise_penalty_db)) fail("rf.noise_penalty_db must be finite");
    if (rf_shots < 1) fail("rf.shots must be >= 1");
    if (!std::isfinite(prior_eta) || prior_eta <= 0.0) fail("detection.prior_eta must be finite and > 0");
}

double SystemConfig::reference_amplitude() const {
    if (std::isinf(rnr_db) && rnr_db < 0) return 0.0;
    return std::sqrt(noise_var * std::pow(10.0, rnr_db / 10.0));
}

double SystemConfig::rf_noise_var() const { return noise_var * std::pow(10.0, rf_noise_penalty_db / 10.0); }

ConfigFile ConfigFile::parse(const std::string& text) {
    boost::property_tree::ptree tree;
    std::istringstream in(text);
    try {
        boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    ConfigFile file;
    for (const auto& [section, body] : tree) {
        if (body.empty()) {
            if (!body.data().empty()) {
                throw ConfigError("config: key '" + section + "' appears outside any [section]");
            }
            file.sections_[section];
            continue;
        }
        for (const auto& [key, value] : body) {
            file.sections_[section][key] = trim(value.get_value<std::string>());
        }
    }
    return file;
}

ConfigFile ConfigFile::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

void ConfigFile::set(const std::string& dotted_key, const std::string& value) {
    const auto [section, key] = split_key(dotted_key);
    sections_[section][key] = trim(value);
}

void ConfigFile::set_assignment(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ConfigError("override must look like section.key=value, got '" + assignment + "'");
    set(trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

std::optional<std::string> ConfigFile::get(const std::string& dotted_key) const {
    const auto [section, key] = split_key(dotted_key);
    const auto s = sections_.find(section);
    if (s == sections_.end()) return std::nullopt;
    const auto k = s->second.find(key);
    if (k == s->second.end()) return std::nullopt;
    return k->second;
}

std::vector<std::string> ConfigFile::keys() const {
    std::vector<std::string> out;
    for (const auto& [section, body] : sections_) {
        for (const auto& [key, value] : body) out.push_back(section + "." + key);
    }
    return out;
}

std::string ConfigFile::dump() const {
    std::ostringstream os;
    bool first = true;
    for (const auto& [section, body] : sections_) {
        if (!first) os << '\n';
        first = false;
        os << '[' << section << "]\n";
        for (const auto& [key, value] : body) os << key << " = " << value << '\n';
    }
    return os.str();
}

SystemConfig system_config_from(const ConfigFile& file) {
    for (const auto& key : file.keys()) {
        const auto section = key.substr(0, key.find('.'));
        if ((section == "system" || section == "raqr" || section == "rf" || section == "detection") &&
            !system_keys().contains(key) && key != "detection.p_fa") {
            throw ConfigError("unknown config key: " + key);
        }
    }
    SystemConfig cfg;
    auto read_int = [&](const char* key, int& field) {
        if (auto v = file.get(key)) {
            const auto parsed = parse_int(key, *v);
            if (parsed < std::numeric_limits<int>::min() || parsed > std::numeric_limits<int>::max()) {
                throw ConfigError(std::string("config key ") + key + " out of range");
            }
            field = static_cast<int>(parsed);
        }
    };
    auto read_double = [&](const char* key, double& field) {
        if (auto v = file.get(key)) field = parse_double(key, *v);
    };
    read_int("system.n_tx", cfg.n_tx);
    read_int("system.n_rx", cfg.n_rx);
    read_int("system.psk_order", cfg.psk_order);
    read_double("system.total_power", cfg.total_power);
    read_double("system.noise_var", cfg.noise_var);
    if (auto v = file.get("system.seed")) cfg.master_seed = parse_u64("system.seed", *v);
    read_int("raqr.shots", cfg.shots);
    read_double("raqr.rnr_db", cfg.rnr_db);
    read_int("rf.shots", cfg.rf_shots);
    read_double("rf.noise_penalty_db", cfg.rf_noise_penalty_db);
    read_double("detection.prior_eta", cfg.prior_eta);
    cfg.validate();
    return cfg;
}

void store_system_config(const SystemConfig& cfg, ConfigFile& file) {
    file.set("system.n_tx", std::to_string(cfg.n_tx));
    file.set("system.n_rx", std::to_string(cfg.n_rx));
    file.set("system.psk_order", std::to_string(cfg.psk_order));
    file.set("system.total_power", format_double(cfg.total_power));
    file.set("system.noise_var", format_double(cfg.noise_var));
    file.set("system.seed", std::to_string(cfg.master_seed));
    file.set("raqr.shots", std::to_string(cfg.shots));
    file.set("raqr.rnr_db", format_double(cfg.rnr_db));
    file.set("rf.shots", std::to_string(cfg.rf_shots));
    file.set("rf.noise_penalty_db", format_double(cfg.rf_noise_penalty_db));
    file.set("detection.prior_eta", format_double(cfg.prior_eta));
}

}  // namespace raqr
