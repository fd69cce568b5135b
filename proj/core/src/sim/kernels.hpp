// SPDX-License-Identifier: Apache-2.0
//
// Dense kernels shared by the state-vector and density-matrix backends.
#pragma once

#include "qflow/gates/gate_library.hpp"

#include <algorithm>
#include <array>
#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace qflow::sim::detail {

using Complex = std::complex<double>;

/// Spreads the bits of `i` over the positions not listed in `sorted_targets`.
inline std::uint64_t deposit(std::uint64_t i, std::span<const std::uint32_t> sorted_targets) {
    for (std::uint32_t t : sorted_targets) {
        const std::uint64_t low = i & ((std::uint64_t{1} << t) - 1);
        i = ((i >> t) << (t + 1)) | low;
    }
    return i;
}

/// Offsets of the 2^k local basis states relative to a base index.
/// Local bit j maps to global bit targets[j].
inline std::vector<std::uint64_t> local_offsets(std::span<const std::uint32_t> targets) {
    const std::size_t sub = std::size_t{1} << targets.size();
    std::vector<std::uint64_t> off(sub, 0);
    for (std::size_t local = 0; local < sub; ++local) {
        for (std::size_t j = 0; j < targets.size(); ++j) {
            if ((local >> j) & 1u) off[local] |= std::uint64_t{1} << targets[j];
        }
    }
    return off;
}

inline std::vector<std::uint32_t> sorted(std::span<const std::uint32_t> targets) {
    std::vector<std::uint32_t> s(targets.begin(), targets.end());
    std::sort(s.begin(), s.end());
    return s;
}

/// Plain complex product; std::complex operator* takes a slow NaN-recovery
/// path under strict IEEE semantics.
inline Complex mul(Complex a, Complex b) {
    return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

/// data <- U data on the given bit positions of a 2^nbits array.
inline void apply_matrix(std::span<Complex> data, std::uint32_t nbits, const gates::Matrix& u,
                         std::span<const std::uint32_t> targets) {
    const auto order = sorted(targets);
    const std::uint64_t groups = std::uint64_t{1} << (nbits - targets.size());
    if (targets.size() == 1) {
        const std::uint64_t bit = std::uint64_t{1} << targets[0];
        const Complex a = u(0, 0), b = u(0, 1), c = u(1, 0), d = u(1, 1);
        for (std::uint64_t g = 0; g < groups; ++g) {
            const std::uint64_t i0 = deposit(g, order);
            const Complex x = data[i0];
            const Complex y = data[i0 | bit];
            data[i0] = mul(a, x) + mul(b, y);
            data[i0 | bit] = mul(c, x) + mul(d, y);
        }
        return;
    }
    const auto off = local_offsets(targets);
    const std::size_t sub = off.size();
    std::array<Complex, 64> m{};
    for (std::size_t r = 0; r < sub; ++r) {
        for (std::size_t l = 0; l < sub; ++l) m[r * sub + l] = u(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(l));
    }
    std::array<Complex, 8> in{};
    for (std::uint64_t g = 0; g < groups; ++g) {
        const std::uint64_t base = deposit(g, order);
        for (std::size_t l = 0; l < sub; ++l) in[l] = data[base | off[l]];
        for (std::size_t r = 0; r < sub; ++r) {
            Complex acc = 0.0;
            for (std::size_t l = 0; l < sub; ++l) acc += mul(m[r * sub + l], in[l]);
            data[base | off[r]] = acc;
        }
    }
}

}  // namespace qflow::sim::detail
