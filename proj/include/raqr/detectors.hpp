#pragma once

// The four decision statistics and their thresholds.

#include "raqr/scene.hpp"
#include "raqr/specfn.hpp"

#include <array>
#include <span>
#include <string_view>
#include <vector>

namespace raqr {

enum class DetectorKind { GenieLRT, PhaseAvgLRT, QuantumED, ClassicalRfED };

inline constexpr std::array<DetectorKind, 4> kAllDetectors = {DetectorKind::GenieLRT, DetectorKind::PhaseAvgLRT,
                                                              DetectorKind::QuantumED, DetectorKind::ClassicalRfED};
inline constexpr std::array<DetectorKind, 3> kRaqrDetectors = {DetectorKind::GenieLRT, DetectorKind::PhaseAvgLRT,
                                                               DetectorKind::QuantumED};

[[nodiscard]] std::string_view detector_name(DetectorKind kind) noexcept;
// Throws ConfigError on an unknown name.
[[nodiscard]] DetectorKind detector_from_name(std::string_view name);
[[nodiscard]] constexpr bool is_lrt(DetectorKind kind) noexcept {
    return kind == DetectorKind::GenieLRT || kind == DetectorKind::PhaseAvgLRT;
}

struct EdNoncentrality {
    double lambda0 = 0.0;
    double lambda1 = 0.0;
    int dof_pairs = 1;  // L = N_r K
};

// T = sum_{m,k} [ln I0(2 y |a_m| / sigma2) - ln I0(2 y |r_m| / sigma2)].
// Shared by both LRTs: the genie passes |alpha_m|, the phase-averaged test
// passes alpha_bar_m.
[[nodiscard]] double lrt_statistic(const ShotMatrix& shots, std::span<const double> h1_magnitude,
                                   std::span<const double> h0_magnitude, double sigma2);

// Per-cell terms of lrt_statistic, for diagnostics.
[[nodiscard]] std::vector<double> lrt_cell_terms(const ShotMatrix& shots, std::span<const double> h1_magnitude,
                                                 std::span<const double> h0_magnitude, double sigma2);

[[nodiscard]] double ga_statistic(const ShotMatrix& shots, std::span<const cplx> alpha, const ReferenceField& reference,
                                  double sigma2);
[[nodiscard]] double pa_statistic(const ShotMatrix& shots, std::span<const double> alpha_bar,
                                  const ReferenceField& reference, double sigma2);

// ln eta - (K / sigma2) sum_m (|r_m|^2 - |a_m|^2).
[[nodiscard]] double lrt_map_threshold(double eta, int shots, double sigma2, std::span<const double> h1_magnitude,
                                       std::span<const double> h0_magnitude);
[[nodiscard]] double ga_map_threshold(const SystemConfig& cfg, std::span<const cplx> alpha,
                                      const ReferenceField& reference);
[[nodiscard]] double pa_map_threshold(const SystemConfig& cfg, std::span<const double> alpha_bar,
                                      const ReferenceField& reference);

[[nodiscard]] double ed_statistic(const ShotMatrix& shots);
// (2K / sigma2) sum_m |nu_m|^2.
[[nodiscard]] double ed_noncentrality(std::span<const cplx> means, int shots, double sigma2);
// (sigma2 / 2) [Q_L^{-1}(p_fa; sqrt(lambda0))]^2.
[[nodiscard]] double ed_cfar_threshold(Probability p_fa, int dof_pairs, double lambda0, double sigma2);
// Q_L(sqrt(lambda1), Q_L^{-1}(p_fa; sqrt(lambda0))).
[[nodiscard]] Probability ed_pd_closed_form(Probability p_fa, int dof_pairs, double lambda0, double lambda1);

[[nodiscard]] double rf_ed_statistic(const ComplexMatrix& samples);
[[nodiscard]] double rf_cfar_threshold(Probability p_fa, int dof_pairs, double noise_var);
// (2 K_RF / noise_var) sum_m |g_m^T x|^2.
[[nodiscard]] double rf_noncentrality(const Channel& rf_channel, const TransmitSignal& signal, int rf_shots,
                                      double noise_var);
[[nodiscard]] Probability rf_pd_closed_form(Probability p_fa, int dof_pairs, double lambda_rf);

}  // namespace raqr
