#include "raqr/detectors.hpp"
#include "raqr/error.hpp"
#include "raqr/summation.hpp"

#include <cmath>
#include <string>

namespace raqr {
namespace {

void require_same(std::size_t got, std::size_t want, const char* what) {
    if (got != want) {
        throw DomainError(std::string(what) + ": expected " + std::to_string(want) + " cells, got " +
                          std::to_string(got));
    }
}

void require_positive(double sigma2, const char* what) {
    if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) throw DomainError(std::string(what) + ": sigma2 must be > 0");
}

std::vector<double> magnitudes(std::span<const cplx> v) {
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::abs(v[i]);
    return out;
}

// ln I0(2 y a / s) - ln I0(2 y r / s) for one cell, summed over its shots.
double cell_term(std::span<const double> ys, double a, double r, double sigma2) {
    const double ca = 2.0 * a / sigma2;
    const double cr = 2.0 * r / sigma2;
    if (a == r) return 0.0;
    CompensatedSum sum;
    for (double y : ys) sum += specfn::log_bessel_i0(ca * y) - specfn::log_bessel_i0(cr * y);
    return sum.value();
}

}  // namespace

std::string_view detector_name(DetectorKind kind) noexcept {
    switch (kind) {
        case DetectorKind::GenieLRT: return "genie_lrt";
        case DetectorKind::PhaseAvgLRT: return "phase_avg_lrt";
        case DetectorKind::QuantumED: return "quantum_ed";
        case DetectorKind::ClassicalRfED: return "rf_ed";
    }
    return "unknown";
}

DetectorKind detector_from_name(std::string_view name) {
    for (DetectorKind k : kAllDetectors) {
        if (detector_name(k) == name) return k;
    }
    throw ConfigError("unknown detector: " + std::string(name));
}

std::vector<double> lrt_cell_terms(const ShotMatrix& shots, std::span<const double> h1_magnitude,
                                   std::span<const double> h0_magnitude, double sigma2) {
    require_positive(sigma2, "lrt_statistic");
    require_same(h1_magnitude.size(), shots.cells(), "lrt_statistic (H1 magnitudes)");
    require_same(h0_magnitude.size(), shots.cells(), "lrt_statistic (H0 magnitudes)");
    std::vector<double> out(shots.cells());
    for (std::size_t m = 0; m < shots.cells(); ++m) {
        out[m] = cell_term(shots.cell(m), h1_magnitude[m], h0_magnitude[m], sigma2);
    }
    return out;
}

double lrt_statistic(const ShotMatrix& shots, std::span<const double> h1_magnitude,
                     std::span<const double> h0_magnitude, double sigma2) {
    CompensatedSum sum;
    for (double t : lrt_cell_terms(shots, h1_magnitude, h0_magnitude, sigma2)) sum += t;
    return sum.value();
}

double ga_statistic(const ShotMatrix& shots, std::span<const cplx> alpha, const ReferenceField& reference,
                    double sigma2) {
    return lrt_statistic(shots, magnitudes(alpha), magnitudes(reference.values), sigma2);
}

double pa_statistic(const ShotMatrix& shots, std::span<const double> alpha_bar, const ReferenceField& reference,
                    double sigma2) {
    return lrt_statistic(shots, alpha_bar, magnitudes(reference.values), sigma2);
}

double lrt_map_threshold(double eta, int shots, double sigma2, std::span<const double> h1_magnitude,
                         std::span<const double> h0_magnitude) {
    require_positive(sigma2, "lrt_map_threshold");
    if (!(eta > 0.0)) throw DomainError("lrt_map_threshold: eta must be > 0");
    require_same(h0_magnitude.size(), h1_magnitude.size(), "lrt_map_threshold");
    CompensatedSum diff;
    for (std::size_t m = 0; m < h1_magnitude.size(); ++m) {
        diff += h0_magnitude[m] * h0_magnitude[m] - h1_magnitude[m] * h1_magnitude[m];
    }
    return std::log(eta) - (shots / sigma2) * diff.value();
}

double ga_map_threshold(const SystemConfig& cfg, std::span<const cplx> alpha, const ReferenceField& reference) {
    return lrt_map_threshold(cfg.prior_eta, cfg.shots, cfg.noise_var, magnitudes(alpha),
                             magnitudes(reference.values));
}

double pa_map_threshold(const SystemConfig& cfg, std::span<const double> alpha_bar, const ReferenceField& reference) {
    return lrt_map_threshold(cfg.prior_eta, cfg.shots, cfg.noise_var, alpha_bar, magnitudes(reference.values));
}

double ed_statistic(const ShotMatrix& shots) {
    CompensatedSum sum;
    for (double y : shots.values().flat()) sum += y * y;
    return sum.value();
}

double ed_noncentrality(std::span<const cplx> means, int shots, double sigma2) {
    require_positive(sigma2, "ed_noncentrality");
    if (shots < 1) throw DomainError("ed_noncentrality: shots must be >= 1");
    CompensatedSum sum;
    for (const cplx& v : means) sum += std::norm(v);
    return 2.0 * shots / sigma2 * sum.value();
}

double ed_cfar_threshold(Probability p_fa, int dof_pairs, double lambda0, double sigma2) {
    require_positive(sigma2, "ed_cfar_threshold");
    if (!(lambda0 >= 0.0)) throw DomainError("ed_cfar_threshold: lambda0 must be >= 0");
    const double b = specfn::inverse_marcum_q_b(dof_pairs, std::sqrt(lambda0), p_fa);
    return 0.5 * sigma2 * b * b;
}

Probability ed_pd_closed_form(Probability p_fa, int dof_pairs, double lambda0, double lambda1) {
    if (!(lambda0 >= 0.0) || !(lambda1 >= 0.0)) throw DomainError("ed_pd_closed_form: noncentrality must be >= 0");
    if (lambda0 == lambda1) return p_fa;
    const double b = specfn::inverse_marcum_q_b(dof_pairs, std::sqrt(lambda0), p_fa);
    return specfn::marcum_q(dof_pairs, std::sqrt(lambda1), b);
}

double rf_ed_statistic(const ComplexMatrix& samples) {
    CompensatedSum sum;
    for (const cplx& v : samples.flat()) sum += std::norm(v);
    return sum.value();
}

double rf_cfar_threshold(Probability p_fa, int dof_pairs, double noise_var) {
    return ed_cfar_threshold(p_fa, dof_pairs, 0.0, noise_var);
}

double rf_noncentrality(const Channel& rf_channel, const TransmitSignal& signal, int rf_shots, double noise_var) {
    require_positive(noise_var, "rf_noncentrality");
    return ed_noncentrality(project(rf_channel, signal), rf_shots, noise_var);
}

Probability rf_pd_closed_form(Probability p_fa, int dof_pairs, double lambda_rf) {
    return ed_pd_closed_form(p_fa, dof_pairs, 0.0, lambda_rf);
}

}  // namespace raqr
