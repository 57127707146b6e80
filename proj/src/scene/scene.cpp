#include "raqr/scene.hpp"
#include "raqr/error.hpp"
#include "raqr/specfn.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace raqr {

ShotMatrix::ShotMatrix(RealMatrix values) : values_(std::move(values)) {
    for (double v : values_.flat()) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("ShotMatrix: entries must be finite and >= 0");
    }
}

Channel draw_channel(RngStream& stream, const SystemConfig& cfg) {
    Channel channel{ComplexMatrix(static_cast<std::size_t>(cfg.n_rx), static_cast<std::size_t>(cfg.n_tx))};
    for (std::size_t m = 0; m < channel.gains.rows(); ++m) {
        for (std::size_t l = 0; l < channel.gains.cols(); ++l) {
            channel.gains(m, l) = sample_complex_gaussian(stream, {0.0, 0.0}, 1.0);
        }
    }
    return channel;
}

TransmitSignal draw_signal(RngStream& stream, const SystemConfig& cfg) {
    TransmitSignal signal;
    signal.per_antenna_power = cfg.per_antenna_power();
    const double amplitude = std::sqrt(signal.per_antenna_power);
    const auto order = static_cast<std::uint32_t>(cfg.psk_order);
    signal.symbols.reserve(static_cast<std::size_t>(cfg.n_tx));
    for (int l = 0; l < cfg.n_tx; ++l) {
        const double phase = 2.0 * std::numbers::pi * stream.next_index(order) / cfg.psk_order;
        signal.symbols.push_back(std::polar(amplitude, phase));
    }
    return signal;
}

ReferenceField make_reference(const SystemConfig& cfg) {
    return ReferenceField{std::vector<cplx>(static_cast<std::size_t>(cfg.n_rx), cplx(cfg.reference_amplitude(), 0.0))};
}

std::vector<cplx> project(const Channel& channel, const TransmitSignal& signal) {
    if (channel.gains.cols() != signal.symbols.size()) {
        throw DomainError("project: channel has " + std::to_string(channel.gains.cols()) + " columns but signal has " +
                          std::to_string(signal.symbols.size()) + " symbols");
    }
    std::vector<cplx> out(channel.gains.rows());
    for (std::size_t m = 0; m < out.size(); ++m) {
        cplx acc{0.0, 0.0};
        const auto row = channel.gains.row(m);
        for (std::size_t l = 0; l < row.size(); ++l) acc += row[l] * signal.symbols[l];
        out[m] = acc;
    }
    return out;
}

Scene build_scene(Channel channel, TransmitSignal signal, ReferenceField reference, const SystemConfig& cfg) {
    const auto n_rx = static_cast<std::size_t>(cfg.n_rx);
    const auto n_tx = static_cast<std::size_t>(cfg.n_tx);
    if (channel.gains.rows() != n_rx || channel.gains.cols() != n_tx) {
        throw DomainError("build_scene: channel shape does not match config");
    }
    if (signal.symbols.size() != n_tx) throw DomainError("build_scene: signal length does not match n_tx");
    if (reference.values.size() != n_rx) throw DomainError("build_scene: reference length does not match n_rx");

    Scene scene;
    scene.alpha = project(channel, signal);
    scene.sigma_v2.resize(n_rx);
    scene.alpha_bar.resize(n_rx);
    for (std::size_t m = 0; m < n_rx; ++m) {
        scene.alpha[m] += reference.values[m];
        double gain = 0.0;
        for (const cplx& h : channel.gains.row(m)) gain += std::norm(h);
        scene.sigma_v2[m] = signal.per_antenna_power * gain;
        const double r = std::abs(reference.values[m]);
        // sigma_v2 == 0: no signal component, the Rician mean degenerates to |r_m|.
        scene.alpha_bar[m] = scene.sigma_v2[m] > 0.0 ? specfn::rician_mean(r, scene.sigma_v2[m]) : r;
    }
    scene.channel = std::move(channel);
    scene.signal = std::move(signal);
    scene.reference = std::move(reference);
    return scene;
}

ShotMatrix generate_shots(RngStream& stream, std::span<const cplx> means, double sigma2, int shots) {
    if (shots < 1) throw DomainError("generate_shots: shots must be >= 1");
    RealMatrix values(means.size(), static_cast<std::size_t>(shots));
    for (std::size_t m = 0; m < means.size(); ++m) {
        for (std::size_t k = 0; k < values.cols(); ++k) values(m, k) = sample_rician(stream, means[m], sigma2);
    }
    return ShotMatrix(std::move(values));
}

ComplexMatrix generate_rf_samples(RngStream& stream, std::span<const cplx> means, double noise_var, int shots) {
    if (shots < 1) throw DomainError("generate_rf_samples: shots must be >= 1");
    ComplexMatrix samples(means.size(), static_cast<std::size_t>(shots));
    for (std::size_t m = 0; m < means.size(); ++m) {
        for (std::size_t k = 0; k < samples.cols(); ++k) {
            samples(m, k) = sample_complex_gaussian(stream, means[m], noise_var);
        }
    }
    return samples;
}

int max_shots(double t_sig, double t_r, double t_n) {
    for (double t : {t_sig, t_r, t_n}) {
        if (!std::isfinite(t) || t <= 0.0) throw DomainError("max_shots: durations must be finite and > 0");
    }
    const double ratio = t_sig / std::max(t_r, t_n);
    // Tolerate representation error so 100e-6 / 10e-6 counts as exactly 10.
    const auto k = static_cast<long long>(std::floor(ratio * (1.0 + 1e-12)));
    if (k < 1) throw DomainError("max_shots: signalling interval shorter than one shot");
    return static_cast<int>(std::min<long long>(k, std::numeric_limits<int>::max()));
}

}  // namespace raqr
