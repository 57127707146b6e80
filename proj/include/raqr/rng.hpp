#pragma once

// Counter-based random streams for order-independent parallel Monte Carlo.
//
// A stream is identified by (master_seed, stream_index). The generator is
// Philox4x32-10: the 64-bit master seed is the key, the 64-bit stream index
// fills the upper half of the 128-bit counter and the lower half counts
// blocks. Two streams with equal identity produce identical sequences; any
// two distinct indices address disjoint counter ranges.

#include "raqr/specfn.hpp"

#include <array>
#include <complex>
#include <cstdint>

namespace raqr {

using cplx = std::complex<double>;

// One Philox4x32-10 block: the keyed bijection of a 128-bit counter.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key) noexcept;

class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::uint64_t stream_index) noexcept;

    [[nodiscard]] std::uint64_t master_seed() const noexcept { return seed_; }
    [[nodiscard]] std::uint64_t stream_index() const noexcept { return index_; }

    std::uint32_t next_u32() noexcept;
    std::uint64_t next_u64() noexcept;
    // Uniform on the open interval (0, 1) with 53 random bits.
    double next_uniform() noexcept;
    // Uniform on {0, ..., n - 1}; exact (rejection sampling). n >= 1.
    std::uint32_t next_index(std::uint32_t n) noexcept;

private:
    void refill() noexcept;

    std::uint64_t seed_;
    std::uint64_t index_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    int used_ = 4;
};

// mean + w with w ~ CN(0, variance): each quadrature is Gaussian with
// variance / 2. Box-Muller on two uniforms.
cplx sample_complex_gaussian(RngStream& stream, cplx mean, double variance);

// |nu + w| with w ~ CN(0, sigma2).
double sample_rician(RngStream& stream, cplx nu, double sigma2);

}  // namespace raqr
