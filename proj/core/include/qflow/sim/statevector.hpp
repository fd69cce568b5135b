// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "qflow/gates/gate_library.hpp"

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace qflow::sim {

using Complex = std::complex<double>;

/// Pure state of n qubits; qubit 0 is the least significant bit of the
/// amplitude index. Storage is exactly 2^n amplitudes.
class StateVector {
  public:
    /// |0...0>.
    explicit StateVector(std::uint32_t n);

    std::uint32_t num_qubits() const noexcept { return n_; }
    std::span<const Complex> amplitudes() const noexcept { return amps_; }
    std::span<Complex> amplitudes() noexcept { return amps_; }

    /// Applies a 2^k x 2^k unitary; operand j of the gate is bit j of its
    /// local index.
    void apply(const gates::Matrix& u, std::span<const std::uint32_t> targets);

    double norm_squared() const;
    double probability_one(std::uint32_t q) const;
    /// Projects qubit q onto `outcome` and renormalizes. `p_outcome` is the
    /// probability of that outcome before the projection.
    void collapse(std::uint32_t q, bool outcome, double p_outcome);
    std::vector<double> probabilities() const;

  private:
    std::uint32_t n_;
    std::vector<Complex> amps_;
};

}  // namespace qflow::sim
