// SPDX-License-Identifier: Apache-2.0
#include "qflow/sim/stabilizer.hpp"

#include "qflow/error.hpp"

#include <bit>
#include <cmath>
#include <string>

namespace qflow::sim {
namespace {

constexpr std::uint32_t kToStateCap = 12;

}  // namespace

StabilizerTableau::StabilizerTableau(std::uint32_t n)
    : n_(n),
      words_((n + 63) / 64),
      xs_(std::size_t{2 * n + 1} * words_, 0),
      zs_(std::size_t{2 * n + 1} * words_, 0),
      signs_(2 * n + 1, 0) {
    for (std::uint32_t q = 0; q < n; ++q) {
        xrow(q)[q / 64] |= std::uint64_t{1} << (q % 64);
        zrow(q + n)[q / 64] |= std::uint64_t{1} << (q % 64);
    }
}

bool StabilizerTableau::bit(const std::vector<std::uint64_t>& m, std::uint32_t row, std::uint32_t q) const {
    return (m[std::size_t{row} * words_ + q / 64] >> (q % 64)) & 1u;
}

std::size_t StabilizerTableau::bytes() const noexcept {
    return (xs_.size() + zs_.size()) * sizeof(std::uint64_t) + signs_.size();
}

void StabilizerTableau::h(std::uint32_t q) {
    const std::size_t w = q / 64;
    const std::uint64_t m = std::uint64_t{1} << (q % 64);
    for (std::uint32_t r = 0; r < 2 * n_; ++r) {
        std::uint64_t& x = xrow(r)[w];
        std::uint64_t& z = zrow(r)[w];
        const bool xb = x & m;
        const bool zb = z & m;
        signs_[r] ^= static_cast<std::uint8_t>(xb && zb);
        if (xb != zb) {
            x ^= m;
            z ^= m;
        }
    }
}

void StabilizerTableau::s(std::uint32_t q) {
    const std::size_t w = q / 64;
    const std::uint64_t m = std::uint64_t{1} << (q % 64);
    for (std::uint32_t r = 0; r < 2 * n_; ++r) {
        const bool xb = xrow(r)[w] & m;
        const bool zb = zrow(r)[w] & m;
        signs_[r] ^= static_cast<std::uint8_t>(xb && zb);
        if (xb) zrow(r)[w] ^= m;
    }
}

void StabilizerTableau::sdg(std::uint32_t q) {
    const std::size_t w = q / 64;
    const std::uint64_t m = std::uint64_t{1} << (q % 64);
    for (std::uint32_t r = 0; r < 2 * n_; ++r) {
        const bool xb = xrow(r)[w] & m;
        const bool zb = zrow(r)[w] & m;
        signs_[r] ^= static_cast<std::uint8_t>(xb && !zb);
        if (xb) zrow(r)[w] ^= m;
    }
}

void StabilizerTableau::x_gate(std::uint32_t q) {
    for (std::uint32_t r = 0; r < 2 * n_; ++r) signs_[r] ^= static_cast<std::uint8_t>(z(r, q));
}

void StabilizerTableau::z_gate(std::uint32_t q) {
    for (std::uint32_t r = 0; r < 2 * n_; ++r) signs_[r] ^= static_cast<std::uint8_t>(x(r, q));
}

void StabilizerTableau::y_gate(std::uint32_t q) {
    for (std::uint32_t r = 0; r < 2 * n_; ++r) signs_[r] ^= static_cast<std::uint8_t>(x(r, q) != z(r, q));
}

void StabilizerTableau::cx(std::uint32_t a, std::uint32_t b) {
    const std::size_t wa = a / 64;
    const std::size_t wb = b / 64;
    const std::uint64_t ma = std::uint64_t{1} << (a % 64);
    const std::uint64_t mb = std::uint64_t{1} << (b % 64);
    for (std::uint32_t r = 0; r < 2 * n_; ++r) {
        std::uint64_t* xr = xrow(r);
        std::uint64_t* zr = zrow(r);
        const bool xa = xr[wa] & ma;
        const bool za = zr[wa] & ma;
        const bool xb = xr[wb] & mb;
        const bool zb = zr[wb] & mb;
        signs_[r] ^= static_cast<std::uint8_t>(xa && zb && (xb == za));
        if (xa) xr[wb] ^= mb;
        if (zb) zr[wa] ^= ma;
    }
}

void StabilizerTableau::cz(std::uint32_t a, std::uint32_t b) {
    h(b);
    cx(a, b);
    h(b);
}

void StabilizerTableau::swap(std::uint32_t a, std::uint32_t b) {
    cx(a, b);
    cx(b, a);
    cx(a, b);
}

void StabilizerTableau::rowcopy(std::uint32_t dst, std::uint32_t src) {
    std::copy_n(xrow(src), words_, xrow(dst));
    std::copy_n(zrow(src), words_, zrow(dst));
    signs_[dst] = signs_[src];
}

void StabilizerTableau::rowclear(std::uint32_t row) {
    std::fill_n(xrow(row), words_, 0);
    std::fill_n(zrow(row), words_, 0);
    signs_[row] = 0;
}

// Row h <- row i * row h, tracking the sign through the Pauli phases.
void StabilizerTableau::rowsum(std::uint32_t h, std::uint32_t i) {
    std::uint64_t* xh = xrow(h);
    std::uint64_t* zh = zrow(h);
    const std::uint64_t* xi = xrow(i);
    const std::uint64_t* zi = zrow(i);
    std::int64_t sum = 2 * signs_[h] + 2 * signs_[i];
    for (std::size_t w = 0; w < words_; ++w) {
        const std::uint64_t x1 = xi[w], z1 = zi[w], x2 = xh[w], z2 = zh[w];
        const std::uint64_t y1 = x1 & z1;
        const std::uint64_t xo = x1 & ~z1;
        const std::uint64_t zo = ~x1 & z1;
        const std::uint64_t plus = (y1 & z2 & ~x2) | (xo & z2 & x2) | (zo & x2 & ~z2);
        const std::uint64_t minus = (y1 & x2 & ~z2) | (xo & z2 & ~x2) | (zo & x2 & z2);
        sum += std::popcount(plus) - std::popcount(minus);
        xh[w] = x2 ^ x1;
        zh[w] = z2 ^ z1;
    }
    signs_[h] = static_cast<std::uint8_t>((((sum % 4) + 4) % 4) == 2);
}

bool StabilizerTableau::is_deterministic(std::uint32_t q) const {
    for (std::uint32_t r = n_; r < 2 * n_; ++r) {
        if (x(r, q)) return false;
    }
    return true;
}

bool StabilizerTableau::measure(std::uint32_t q, std::mt19937_64& rng) {
    std::uint32_t p = 2 * n_;
    for (std::uint32_t r = n_; r < 2 * n_; ++r) {
        if (x(r, q)) {
            p = r;
            break;
        }
    }
    if (p < 2 * n_) {
        for (std::uint32_t r = 0; r < 2 * n_; ++r) {
            if (r != p && x(r, q)) rowsum(r, p);
        }
        rowcopy(p - n_, p);
        rowclear(p);
        zrow(p)[q / 64] |= std::uint64_t{1} << (q % 64);
        signs_[p] = static_cast<std::uint8_t>(rng() >> 63);
        return signs_[p] != 0;
    }
    const std::uint32_t scratch = 2 * n_;
    rowclear(scratch);
    for (std::uint32_t r = 0; r < n_; ++r) {
        if (x(r, q)) rowsum(scratch, r + n_);
    }
    return signs_[scratch] != 0;
}

void StabilizerTableau::reset(std::uint32_t q, std::mt19937_64& rng) {
    if (measure(q, rng)) x_gate(q);
}

StateVector tableau_to_statevector(const StabilizerTableau& tab) {
    const std::uint32_t n = tab.num_qubits();
    if (n > kToStateCap) {
        throw BackendError("tableau_to_statevector supports at most " + std::to_string(kToStateCap) +
                           " qubits, got " + std::to_string(n));
    }
    const std::size_t dim = std::size_t{1} << n;
    std::vector<Complex> v(dim);
    std::mt19937_64 rng(0x5eed);
    for (auto& a : v) {
        const double re = static_cast<double>(rng() >> 11) * 0x1.0p-53 + 0.5;
        const double im = static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5;
        a = Complex(re, im);
    }
    std::vector<Complex> pv(dim);
    static const Complex kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    for (std::uint32_t r = n; r < 2 * n; ++r) {
        std::uint64_t xm = 0;
        std::uint64_t zm = 0;
        for (std::uint32_t q = 0; q < n; ++q) {
            if (tab.x(r, q)) xm |= std::uint64_t{1} << q;
            if (tab.z(r, q)) zm |= std::uint64_t{1} << q;
        }
        const int base = 2 * static_cast<int>(tab.sign(r)) + std::popcount(xm & zm);
        for (std::uint64_t b = 0; b < dim; ++b) {
            const int k = base + 2 * std::popcount(b & zm);
            pv[b ^ xm] = kIPow[k & 3] * v[b];
        }
        for (std::size_t b = 0; b < dim; ++b) v[b] = 0.5 * (v[b] + pv[b]);
    }
    double norm = 0.0;
    for (const auto& a : v) norm += std::norm(a);
    if (!(norm > 1e-20)) throw BackendError("tableau does not describe a state");
    StateVector out(n);
    const double inv = 1.0 / std::sqrt(norm);
    auto amps = out.amplitudes();
    for (std::size_t b = 0; b < dim; ++b) amps[b] = v[b] * inv;
    return out;
}

}  // namespace qflow::sim
