// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "qflow/sim/noise.hpp"
#include "qflow/sim/statevector.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace qflow::sim {

/// Mixed state of n qubits stored row-major as exactly 4^n entries.
/// Channels act block by block: for every pair of row and column indices
/// that agree off the targets, the 2^k x 2^k block B becomes sum K B K^dagger.
class DensityMatrix {
  public:
    /// |0...0><0...0|.
    explicit DensityMatrix(std::uint32_t n);
    /// |psi><psi|.
    static DensityMatrix from_state(const StateVector& psi);

    std::uint32_t num_qubits() const noexcept { return n_; }
    std::uint64_t dim() const noexcept { return std::uint64_t{1} << n_; }
    Complex operator()(std::uint64_t row, std::uint64_t col) const { return rho_[row * dim() + col]; }
    std::span<const Complex> data() const noexcept { return rho_; }

    void apply_unitary(const gates::Matrix& u, std::span<const std::uint32_t> targets);
    void apply_kraus(const KrausSet& kraus, std::span<const std::uint32_t> targets);
    /// rho -> (1 - p) rho + p Tr_targets(rho) (x) I/2^k.
    void depolarize(double p, std::span<const std::uint32_t> targets);
    /// |0><0| (x) Tr_q(rho).
    void reset(std::uint32_t q);

    double trace() const;
    std::vector<double> diagonal() const;
    double probability_one(std::uint32_t q) const;
    void collapse(std::uint32_t q, bool outcome, double p_outcome);

  private:
    template <typename Fn>
    void for_each_block(std::span<const std::uint32_t> targets, Fn&& fn);

    std::uint32_t n_;
    std::vector<Complex> rho_;
};

/// <psi| rho |psi>, clamped to [0, 1]. Throws BackendError on a size
/// mismatch.
double fidelity(const DensityMatrix& rho, const StateVector& psi);

}  // namespace qflow::sim
