#include "raqr/validation.hpp"
#include "raqr/detectors.hpp"
#include "raqr/rng.hpp"
#include "raqr/scene.hpp"
#include "raqr/specfn.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/ellint_2.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

namespace raqr::validation {
namespace {

using specfn::marcum_q;

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double to_double(const std::string& s) {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing characters in '" + s + "'");
    return v;
}

double evaluate(const std::string& fn, double x1, double x2, double x3) {
    if (fn == "log_bessel_i0") return specfn::log_bessel_i0(x1);
    if (fn == "log_bessel_i1") return specfn::log_bessel_i1(x1);
    if (fn == "laguerre_half") return specfn::laguerre_half(x1);
    if (fn == "rician_mean") return specfn::rician_mean(x1, x2);
    if (fn == "rician_log_pdf") return specfn::rician_log_pdf(x1, x2, x3);
    if (fn == "marcum_q") return marcum_q(static_cast<int>(x1), x2, x3).value();
    if (fn == "inverse_marcum_q_b") return specfn::inverse_marcum_q_b(static_cast<int>(x1), x2, Probability(x3));
    throw std::invalid_argument("unknown function '" + fn + "'");
}

// Kolmogorov-Smirnov distance of `sample` against `cdf`.
template <class Cdf>
double ks_distance(std::vector<double> sample, Cdf cdf) {
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        d = std::max({d, (i + 1) / n - f, f - i / n});
    }
    return d;
}

std::string fmt(const char* format, double a, double b = 0, double c = 0, double d = 0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, format, a, b, c, d);
    return buf;
}

}  // namespace

void Report::append(const Report& other) { checks.insert(checks.end(), other.checks.begin(), other.checks.end()); }

bool Report::all_passed() const { return failures() == 0; }

std::size_t Report::failures() const {
    return static_cast<std::size_t>(std::count_if(checks.begin(), checks.end(), [](const auto& c) { return !c.passed; }));
}

void Report::print(std::ostream& out) const {
    std::size_t width = 0;
    for (const auto& c : checks) width = std::max(width, c.name.size());
    for (const auto& c : checks) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "measured=%-12.6g tol=%-10.3g", c.measured, c.tolerance);
        out << (c.passed ? "PASS  " : "FAIL  ") << c.name << std::string(width - c.name.size() + 2, ' ') << buf;
        if (!c.detail.empty()) out << "  " << c.detail;
        out << '\n';
    }
}

std::string Report::json() const {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const auto& c : checks) {
        j.push_back({{"name", c.name},
                     {"passed", c.passed},
                     {"measured", c.measured},
                     {"tolerance", c.tolerance},
                     {"detail", c.detail}});
    }
    nlohmann::ordered_json root;
    root["passed"] = all_passed();
    root["failures"] = failures();
    root["checks"] = j;
    return root.dump(2) + "\n";
}

double ks_critical_1pct(std::size_t n) { return std::sqrt(-0.5 * std::log(0.005)) / std::sqrt(static_cast<double>(n)); }

Report reference_values(const std::filesystem::path& csv) {
    Report report;
    std::ifstream in(csv);
    if (!in) {
        report.add({"reference_values:open", false, 0, 0, "cannot open " + csv.string()});
        return report;
    }
    std::string line;
    std::getline(in, line);
    if (line.rfind("function,x1,x2,x3,expected,tolerance,tolerance_kind", 0) != 0) {
        report.add({"reference_values:header", false, 0, 0, "unexpected header in " + csv.string()});
        return report;
    }
    int row = 1;
    std::size_t replayed = 0;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        const auto cells = split_csv(line);
        const std::string name = "reference_values:row" + std::to_string(row);
        try {
            if (cells.size() < 7) throw std::invalid_argument("expected at least 7 columns");
            const auto opt = [](const std::string& s) { return s.empty() ? 0.0 : to_double(s); };
            const double expected = to_double(cells[4]);
            const double tol = to_double(cells[5]);
            const std::string& kind = cells[6];
            const double got = evaluate(cells[0], opt(cells[1]), opt(cells[2]), opt(cells[3]));
            const double abs_err = std::abs(got - expected);
            double err = abs_err;
            if (kind == "rel") {
                err = abs_err / std::abs(expected);
            } else if (kind == "rel_or_abs") {
                err = std::abs(expected) > 1.0 ? abs_err / std::abs(expected) : abs_err;
            } else if (kind != "abs") {
                throw std::invalid_argument("unknown tolerance kind '" + kind + "'");
            }
            const bool ok = std::isfinite(got) && err <= tol;
            ++replayed;
            if (!ok) {
                report.add({name, false, err, tol,
                            cells[0] + "(" + cells[1] + "," + cells[2] + "," + cells[3] + ") = " + fmt("%.17g", got) +
                                ", expected " + cells[4]});
            }
        } catch (const std::exception& e) {
            report.add({name, false, 0, 0, std::string("malformed or failing row: ") + e.what()});
        }
    }
    const bool ok = report.checks.empty() && replayed > 0;
    report.checks.insert(report.checks.begin(),
                         {"reference_values:replay", ok, static_cast<double>(replayed), 0,
                          std::to_string(replayed) + " rows from " + csv.filename().string()});
    return report;
}

Report specfn_properties(std::uint64_t seed) {
    Report report;
    RngStream rng(seed, 0xC0FFEE);
    auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * rng.next_uniform(); };

    {
        // 50 x 50 grid per order: decreasing in b, nondecreasing in a.
        std::size_t violations = 0;
        for (int order : {1, 4, 20}) {
            std::vector<double> prev_row(50, -1.0);
            for (int i = 0; i < 50; ++i) {
                const double a = 0.4 * i;
                double prev = 2.0;
                for (int j = 0; j < 50; ++j) {
                    const double b = 0.1 + 0.4 * j;
                    const double q = marcum_q(order, a, b).value();
                    if (q > prev || (q == prev && q > 0.0 && q < 1.0)) ++violations;
                    if (q < prev_row[j] - 1e-15) ++violations;
                    prev = q;
                    prev_row[j] = q;
                }
            }
        }
        report.add({"marcum_q:monotone_grid", violations == 0, static_cast<double>(violations), 0,
                    "50x50 grid, L in {1,4,20}"});
    }
    {
        double worst = 0.0;
        for (int i = 0; i < 200; ++i) {
            const int order = 1 + static_cast<int>(rng.next_index(30));
            const double a = uniform(0.2, 15.0);
            const double b = uniform(0.2, 15.0);
            const double lhs = marcum_q(order + 1, a, b).value() - marcum_q(order, a, b).value();
            const double rhs = std::exp(order * std::log(b / a) - 0.5 * (a * a + b * b)) *
                               boost::math::cyl_bessel_i(static_cast<double>(order), a * b);
            worst = std::max(worst, std::abs(lhs - rhs));
        }
        report.add({"marcum_q:recurrence", worst <= 1e-9, worst, 1e-9, "200 random (L, a, b)"});
    }
    {
        double worst = 0.0;
        for (int i = 0; i < 1000; ++i) {
            const int order = 1 + static_cast<int>(rng.next_index(50));
            const double a = uniform(0.0, 20.0);
            const double p = uniform(1e-4, 1.0 - 1e-4);
            const double b = specfn::inverse_marcum_q_b(order, a, Probability(p));
            worst = std::max(worst, std::abs(marcum_q(order, a, b).value() - p));
        }
        report.add({"inverse_marcum_q_b:round_trip", worst <= 1e-8, worst, 1e-8, "1000 random (L<=50, a<=20, p)"});
    }
    {
        double worst = 0.0;
        for (int i = 0; i < 20; ++i) {
            const double nu = uniform(0.0, 10.0);
            const double sigma2 = uniform(0.05, 4.0);
            const double s = std::sqrt(sigma2);
            auto pdf = [&](double y) { return y <= 0.0 ? 0.0 : std::exp(specfn::rician_log_pdf(y, nu, sigma2)); };
            // Piecewise over the bulk, each piece adaptively.
            const double hi = nu + 12.0 * s;
            double total = 0.0;
            const int pieces = 16;
            for (int k = 0; k < pieces; ++k) {
                total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
                    pdf, hi * k / pieces, hi * (k + 1) / pieces, 15, 1e-14);
            }
            worst = std::max(worst, std::abs(total - 1.0));
        }
        report.add({"rician_log_pdf:normalizes", worst <= 1e-8, worst, 1e-8, "20 random (nu, sigma2)"});
    }
    {
        double worst = 0.0;
        std::size_t bound_violations = 0;
        for (int i = 0; i < 12; ++i) {
            const double nu = uniform(0.0, 6.0);
            const double sigma2 = uniform(0.1, 3.0);
            const double s = std::sqrt(sigma2);
            // E|nu + w| in polar coordinates: Rayleigh radius, uniform phase.
            // The phase average of |nu + rho e^{j th}| is the complete
            // elliptic integral (2/pi)(nu + rho) E(2 sqrt(nu rho) / (nu + rho)).
            auto radial = [&](double rho) {
                const double sum = nu + rho;
                const double inner =
                    sum == 0.0 ? 0.0 : 2.0 / std::numbers::pi * sum * boost::math::ellint_2(2.0 * std::sqrt(nu * rho) / sum);
                return inner * (2.0 * rho / sigma2) * std::exp(-rho * rho / sigma2);
            };
            double quad = 0.0;
            const double hi = 10.0 * s;
            for (int k = 0; k < 8; ++k) {
                quad += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(radial, hi * k / 8,
                                                                                      hi * (k + 1) / 8, 15, 1e-13);
            }
            const double mean = specfn::rician_mean(nu, sigma2);
            worst = std::max(worst, std::abs(mean - quad));
            if (mean < nu || mean < std::sqrt(std::numbers::pi * sigma2) / 2.0 - 1e-15) ++bound_violations;
        }
        report.add({"rician_mean:quadrature", worst <= 1e-8, worst, 1e-8, "12 random (nu, sigma2), 2-D quadrature"});
        report.add({"rician_mean:lower_bounds", bound_violations == 0, static_cast<double>(bound_violations), 0,
                    ">= nu and >= sqrt(pi sigma2)/2"});
    }
    return report;
}

Report sampler_fidelity(std::uint64_t seed, int sets, std::size_t draws) {
    Report report;
    RngStream params(seed, 0x5A3B);
    const double crit = ks_critical_1pct(draws);
    for (int s = 0; s < sets; ++s) {
        // The first set is the (nu = 2, sigma2 = 1) anchor.
        const double nu = s == 0 ? 2.0 : 4.0 * params.next_uniform();
        const double sigma2 = s == 0 ? 1.0 : 0.2 + 2.0 * params.next_uniform();
        const double phase = 2.0 * std::numbers::pi * params.next_uniform();
        RngStream stream(seed, 1000 + static_cast<std::uint64_t>(s));
        std::vector<double> sample(draws);
        for (auto& y : sample) y = sample_rician(stream, std::polar(nu, phase), sigma2);
        const double scale = std::sqrt(2.0 / sigma2);
        const double d =
            ks_distance(std::move(sample), [&](double y) { return marcum_q(1, scale * nu, scale * y).complement(); });
        report.add({"sample_rician:ks[" + std::to_string(s) + "]", d < crit, d, crit,
                    fmt("nu=%.4g sigma2=%.4g n=%.0f", nu, sigma2, static_cast<double>(draws))});
    }
    return report;
}

Report ed_exactness(std::uint64_t seed, std::size_t trials, int ks_scenes, std::size_t ks_trials) {
    Report report;
    const Probability p_fa(0.1);
    struct Point {
        int cells;
        int shots;
        double ref;     // |r|
        double signal;  // |nu_1|
    };
    // L = cells * shots from 1 to 48, Lambda1 up to ~200.
    const Point grid[] = {{1, 1, 0.0, 1.5}, {1, 4, 1.0, 1.6}, {4, 1, 0.5, 1.0},
                          {4, 5, 1.0, 1.4}, {4, 12, 0.0, 1.0}, {2, 10, 1.5, 2.2}};
    std::uint64_t stream_id = 0;
    for (const auto& pt : grid) {
        const double sigma2 = 1.0;
        const int dof = pt.cells * pt.shots;
        std::vector<cplx> m0(static_cast<std::size_t>(pt.cells), cplx(pt.ref, 0.0));
        std::vector<cplx> m1(static_cast<std::size_t>(pt.cells), std::polar(pt.signal, 0.7));
        const double l0 = ed_noncentrality(m0, pt.shots, sigma2);
        const double l1 = ed_noncentrality(m1, pt.shots, sigma2);
        const double tau = ed_cfar_threshold(p_fa, dof, l0, sigma2);
        const double pd_closed = ed_pd_closed_form(p_fa, dof, l0, l1).value();
        RngStream s0(seed, 0xED00 + stream_id++);
        RngStream s1(seed, 0xED00 + stream_id++);
        std::size_t fa = 0;
        std::size_t det = 0;
        for (std::size_t t = 0; t < trials; ++t) {
            fa += ed_statistic(generate_shots(s0, m0, sigma2, pt.shots)) > tau;
            det += ed_statistic(generate_shots(s1, m1, sigma2, pt.shots)) > tau;
        }
        const double n = static_cast<double>(trials);
        const double pfa = fa / n;
        const double pd = det / n;
        const std::string tag = fmt("[L=%.0f,L0=%.3g,L1=%.3g]", dof, l0, l1);
        const double se_fa = std::sqrt(p_fa.value() * p_fa.complement() / n);
        const double se_d = std::sqrt(pd_closed * (1.0 - pd_closed) / n);
        report.add({"quantum_ed:pfa" + tag, std::abs(pfa - p_fa.value()) <= 3 * se_fa, std::abs(pfa - p_fa.value()),
                    3 * se_fa, fmt("empirical %.5f vs 0.1", pfa)});
        report.add({"quantum_ed:pd" + tag, std::abs(pd - pd_closed) <= 3 * std::max(se_d, 1.0 / n),
                    std::abs(pd - pd_closed), 3 * std::max(se_d, 1.0 / n),
                    fmt("empirical %.5f vs closed form %.5f", pd, pd_closed)});
    }

    // RF energy detector: central H0, noncentral H1.
    const Point rf_grid[] = {{1, 1, 0.0, 1.5}, {4, 5, 0.0, 0.8}, {4, 20, 0.0, 0.5}, {2, 24, 0.0, 0.6}};
    for (const auto& pt : rf_grid) {
        const double noise = 2.0;
        const int dof = pt.cells * pt.shots;
        std::vector<cplx> zero(static_cast<std::size_t>(pt.cells));
        std::vector<cplx> m1(static_cast<std::size_t>(pt.cells), std::polar(pt.signal, -1.1));
        const double lam = ed_noncentrality(m1, pt.shots, noise);
        const double tau = rf_cfar_threshold(p_fa, dof, noise);
        const double pd_closed = rf_pd_closed_form(p_fa, dof, lam).value();
        RngStream s0(seed, 0xEF00 + stream_id++);
        RngStream s1(seed, 0xEF00 + stream_id++);
        std::size_t fa = 0;
        std::size_t det = 0;
        for (std::size_t t = 0; t < trials; ++t) {
            fa += rf_ed_statistic(generate_rf_samples(s0, zero, noise, pt.shots)) > tau;
            det += rf_ed_statistic(generate_rf_samples(s1, m1, noise, pt.shots)) > tau;
        }
        const double n = static_cast<double>(trials);
        const double pfa = fa / n;
        const double pd = det / n;
        const std::string tag = fmt("[L=%.0f,L_RF=%.3g]", dof, lam);
        const double se_fa = std::sqrt(p_fa.value() * p_fa.complement() / n);
        const double se_d = std::sqrt(pd_closed * (1.0 - pd_closed) / n);
        report.add({"rf_ed:pfa" + tag, std::abs(pfa - p_fa.value()) <= 3 * se_fa, std::abs(pfa - p_fa.value()),
                    3 * se_fa, fmt("empirical %.5f vs 0.1", pfa)});
        report.add({"rf_ed:pd" + tag, std::abs(pd - pd_closed) <= 3 * std::max(se_d, 1.0 / n), std::abs(pd - pd_closed),
                    3 * std::max(se_d, 1.0 / n), fmt("empirical %.5f vs closed form %.5f", pd, pd_closed)});
    }

    // Law of 2T/sigma2 for random default-sized scenes.
    SystemConfig cfg;
    const double crit = ks_critical_1pct(ks_trials);
    for (int s = 0; s < ks_scenes; ++s) {
        RngStream ch(seed, 0xEE00 + 4 * static_cast<std::uint64_t>(s));
        RngStream sg(seed, 0xEE01 + 4 * static_cast<std::uint64_t>(s));
        const Scene scene = build_scene(draw_channel(ch, cfg), draw_signal(sg, cfg), make_reference(cfg), cfg);
        const int dof = cfg.n_rx * cfg.shots;
        for (int hyp = 0; hyp < 2; ++hyp) {
            const std::vector<cplx>& means = hyp == 0 ? scene.reference.values : scene.alpha;
            const double a = std::sqrt(ed_noncentrality(means, cfg.shots, cfg.noise_var));
            RngStream shots(seed, 0xEE02 + hyp + 4 * static_cast<std::uint64_t>(s));
            std::vector<double> z(ks_trials);
            for (auto& v : z) v = 2.0 * ed_statistic(generate_shots(shots, means, cfg.noise_var, cfg.shots)) / cfg.noise_var;
            const double d = ks_distance(std::move(z), [&](double x) { return marcum_q(dof, a, std::sqrt(x)).complement(); });
            report.add({fmt("quantum_ed:ks[scene=%.0f,H%.0f]", s, hyp), d < crit, d, crit,
                        fmt("sqrt(Lambda)=%.4g L=%.0f", a, dof)});
        }
    }
    return report;
}

}  // namespace raqr::validation
