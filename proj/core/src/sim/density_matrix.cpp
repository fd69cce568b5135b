// SPDX-License-Identifier: Apache-2.0
#include "qflow/sim/density_matrix.hpp"

#include "qflow/error.hpp"

#include "kernels.hpp"

#include <algorithm>
#include <cmath>

namespace qflow::sim {
namespace {

using Block = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, 0, 8, 8>;

}  // namespace

DensityMatrix::DensityMatrix(std::uint32_t n) : n_(n), rho_(std::size_t{1} << (2 * n)) { rho_[0] = 1.0; }

DensityMatrix DensityMatrix::from_state(const StateVector& psi) {
    DensityMatrix d(psi.num_qubits());
    const auto a = psi.amplitudes();
    const std::uint64_t dim = d.dim();
    for (std::uint64_t r = 0; r < dim; ++r) {
        for (std::uint64_t c = 0; c < dim; ++c) d.rho_[r * dim + c] = a[r] * std::conj(a[c]);
    }
    return d;
}

template <typename Fn>
void DensityMatrix::for_each_block(std::span<const std::uint32_t> targets, Fn&& fn) {
    const auto order = detail::sorted(targets);
    const auto off = detail::local_offsets(targets);
    const auto sub = static_cast<Eigen::Index>(off.size());
    const std::uint64_t groups = std::uint64_t{1} << (n_ - targets.size());
    const std::uint64_t d = dim();
    Block b(sub, sub);
    for (std::uint64_t gr = 0; gr < groups; ++gr) {
        const std::uint64_t rbase = detail::deposit(gr, order);
        for (std::uint64_t gc = 0; gc < groups; ++gc) {
            const std::uint64_t cbase = detail::deposit(gc, order);
            for (Eigen::Index i = 0; i < sub; ++i) {
                for (Eigen::Index j = 0; j < sub; ++j) b(i, j) = rho_[(rbase | off[i]) * d + (cbase | off[j])];
            }
            fn(b);
            for (Eigen::Index i = 0; i < sub; ++i) {
                for (Eigen::Index j = 0; j < sub; ++j) rho_[(rbase | off[i]) * d + (cbase | off[j])] = b(i, j);
            }
        }
    }
}

void DensityMatrix::apply_unitary(const gates::Matrix& u, std::span<const std::uint32_t> targets) {
    const Block k = u;
    const Block kh = u.adjoint();
    for_each_block(targets, [&](Block& b) { b = (k * b * kh).eval(); });
}

void DensityMatrix::apply_kraus(const KrausSet& kraus, std::span<const std::uint32_t> targets) {
    std::vector<Block> ks;
    std::vector<Block> khs;
    for (const auto& k : kraus) {
        ks.emplace_back(k);
        khs.emplace_back(k.adjoint());
    }
    Block acc;
    for_each_block(targets, [&](Block& b) {
        acc = ks[0] * b * khs[0];
        for (std::size_t i = 1; i < ks.size(); ++i) acc += ks[i] * b * khs[i];
        b = acc;
    });
}

void DensityMatrix::depolarize(double p, std::span<const std::uint32_t> targets) {
    if (!(p >= 0.0 && p <= 1.0)) throw BackendError("depolarizing probability " + std::to_string(p) + " outside [0, 1]");
    if (p == 0.0) return;
    const double inv_dim = 1.0 / static_cast<double>(std::uint64_t{1} << targets.size());
    for_each_block(targets, [&](Block& b) {
        const Complex mixed = p * b.trace() * inv_dim;
        b *= (1.0 - p);
        for (Eigen::Index i = 0; i < b.rows(); ++i) b(i, i) += mixed;
    });
}

void DensityMatrix::reset(std::uint32_t q) {
    const std::uint32_t t[1] = {q};
    for_each_block(t, [](Block& b) {
        const Complex top = b(0, 0) + b(1, 1);
        b.setZero();
        b(0, 0) = top;
    });
}

double DensityMatrix::trace() const {
    double t = 0.0;
    for (std::uint64_t i = 0; i < dim(); ++i) t += rho_[i * dim() + i].real();
    return t;
}

std::vector<double> DensityMatrix::diagonal() const {
    std::vector<double> out(dim());
    for (std::uint64_t i = 0; i < dim(); ++i) out[i] = rho_[i * dim() + i].real();
    return out;
}

double DensityMatrix::probability_one(std::uint32_t q) const {
    const std::uint64_t bit = std::uint64_t{1} << q;
    double p = 0.0;
    for (std::uint64_t i = 0; i < dim(); ++i) {
        if (i & bit) p += rho_[i * dim() + i].real();
    }
    return p;
}

void DensityMatrix::collapse(std::uint32_t q, bool outcome, double p_outcome) {
    const std::uint64_t bit = std::uint64_t{1} << q;
    const double scale = 1.0 / p_outcome;
    const std::uint64_t d = dim();
    for (std::uint64_t r = 0; r < d; ++r) {
        const bool rk = ((r & bit) != 0) == outcome;
        for (std::uint64_t c = 0; c < d; ++c) {
            Complex& e = rho_[r * d + c];
            e = (rk && (((c & bit) != 0) == outcome)) ? e * scale : Complex{0.0};
        }
    }
}

double fidelity(const DensityMatrix& rho, const StateVector& psi) {
    if (rho.num_qubits() != psi.num_qubits()) {
        throw BackendError("fidelity: density matrix has " + std::to_string(rho.num_qubits()) +
                           " qubits, state has " + std::to_string(psi.num_qubits()));
    }
    const auto a = psi.amplitudes();
    const std::uint64_t d = rho.dim();
    Complex total = 0.0;
    for (std::uint64_t r = 0; r < d; ++r) {
        if (a[r] == Complex{0.0}) continue;
        Complex row = 0.0;
        for (std::uint64_t c = 0; c < d; ++c) row += rho(r, c) * a[c];
        total += std::conj(a[r]) * row;
    }
    return std::clamp(total.real(), 0.0, 1.0);
}

}  // namespace qflow::sim
