#pragma once

// One realization of the RF-quantum scenario and the magnitude-only shots
// it produces.

#include "raqr/config.hpp"
#include "raqr/rng.hpp"

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace raqr {

template <class T>
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, T fill = T{}) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<T> data) : rows_(rows), cols_(cols), data_(std::move(data)) {
        if (data_.size() != rows_ * cols_) throw std::invalid_argument("Matrix: data size does not match shape");
    }

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }

    T& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    const T& operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    [[nodiscard]] std::span<T> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
    [[nodiscard]] std::span<const T> row(std::size_t r) const noexcept { return {data_.data() + r * cols_, cols_}; }
    [[nodiscard]] std::span<const T> flat() const noexcept { return data_; }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

using ComplexMatrix = Matrix<cplx>;
using RealMatrix = Matrix<double>;

// N_r x N_t effective gains h_{m,l}.
struct Channel {
    ComplexMatrix gains;
};

// Constant-modulus M-PSK vector: |x_l|^2 == per_antenna_power for every l.
struct TransmitSignal {
    std::vector<cplx> symbols;
    double per_antenna_power = 0.0;
};

// Received LO reference r_m per cell.
struct ReferenceField {
    std::vector<cplx> values;
};

struct Scene {
    Channel channel;
    TransmitSignal signal;
    ReferenceField reference;
    std::vector<cplx> alpha;        // h_m^T x + r_m
    std::vector<double> sigma_v2;   // (P / N_t) sum_l |h_{m,l}|^2
    std::vector<double> alpha_bar;  // phase-averaged E|alpha_m|
};

// N_r x K nonnegative magnitudes.
class ShotMatrix {
public:
    explicit ShotMatrix(RealMatrix values);

    [[nodiscard]] std::size_t cells() const noexcept { return values_.rows(); }
    [[nodiscard]] std::size_t shots() const noexcept { return values_.cols(); }
    [[nodiscard]] double operator()(std::size_t m, std::size_t k) const noexcept { return values_(m, k); }
    [[nodiscard]] std::span<const double> cell(std::size_t m) const noexcept { return values_.row(m); }
    [[nodiscard]] const RealMatrix& values() const noexcept { return values_; }

private:
    RealMatrix values_;
};

// i.i.d. CN(0, 1) gains, row-major draw order.
Channel draw_channel(RngStream& stream, const SystemConfig& cfg);

// x_l = sqrt(P / N_t) e^{j 2 pi i_l / M}, i_l uniform on {0..M-1}.
TransmitSignal draw_signal(RngStream& stream, const SystemConfig& cfg);

// Equal-magnitude, zero-phase reference with |r_m|^2 = noise_var 10^{rnr_db/10}.
ReferenceField make_reference(const SystemConfig& cfg);

Scene build_scene(Channel channel, TransmitSignal signal, ReferenceField reference, const SystemConfig& cfg);

// values(m, k) = |means[m] + w_{m,k}|, w ~ CN(0, sigma2), drawn in row-major order.
ShotMatrix generate_shots(RngStream& stream, std::span<const cplx> means, double sigma2, int shots);

// Complex samples means[m] + n_{m,k}, n ~ CN(0, noise_var), for the RF baseline.
ComplexMatrix generate_rf_samples(RngStream& stream, std::span<const cplx> means, double noise_var, int shots);

// g_m^T x for every row of `gains`.
std::vector<cplx> project(const Channel& channel, const TransmitSignal& signal);

// floor(t_sig / max(t_r, t_n)): the number of approximately independent
// shots in one signalling interval. Throws DomainError when it is zero.
int max_shots(double t_sig, double t_r, double t_n);

}  // namespace raqr
