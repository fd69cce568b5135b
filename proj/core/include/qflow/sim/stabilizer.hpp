// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "qflow/sim/statevector.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace qflow::sim {

/// Aaronson-Gottesman tableau: rows 0..n-1 are destabilizers, n..2n-1
/// stabilizers, row 2n is scratch. Each row holds packed x and z bits and a
/// sign bit.
class StabilizerTableau {
  public:
    /// Stabilizers Z_i, destabilizers X_i (the state |0...0>).
    explicit StabilizerTableau(std::uint32_t n);

    std::uint32_t num_qubits() const noexcept { return n_; }
    bool x(std::uint32_t row, std::uint32_t q) const { return bit(xs_, row, q); }
    bool z(std::uint32_t row, std::uint32_t q) const { return bit(zs_, row, q); }
    bool sign(std::uint32_t row) const { return signs_[row] != 0; }

    void h(std::uint32_t q);
    void s(std::uint32_t q);
    void sdg(std::uint32_t q);
    void x_gate(std::uint32_t q);
    void y_gate(std::uint32_t q);
    void z_gate(std::uint32_t q);
    void cx(std::uint32_t control, std::uint32_t target);
    void cz(std::uint32_t a, std::uint32_t b);
    void swap(std::uint32_t a, std::uint32_t b);

    /// Outcome of a Z measurement is forced when no stabilizer anticommutes.
    bool is_deterministic(std::uint32_t q) const;
    /// Measures in Z; random outcomes take one bit from `rng`.
    bool measure(std::uint32_t q, std::mt19937_64& rng);
    void reset(std::uint32_t q, std::mt19937_64& rng);

    std::size_t bytes() const noexcept;

  private:
    bool bit(const std::vector<std::uint64_t>& m, std::uint32_t row, std::uint32_t q) const;
    std::uint64_t* xrow(std::uint32_t row) { return xs_.data() + std::size_t{row} * words_; }
    std::uint64_t* zrow(std::uint32_t row) { return zs_.data() + std::size_t{row} * words_; }
    void rowsum(std::uint32_t h, std::uint32_t i);
    void rowcopy(std::uint32_t dst, std::uint32_t src);
    void rowclear(std::uint32_t row);

    std::uint32_t n_;
    std::size_t words_;
    std::vector<std::uint64_t> xs_;
    std::vector<std::uint64_t> zs_;
    std::vector<std::uint8_t> signs_;
};

/// The state fixed by every stabilizer row, by projecting a generic seed
/// vector with prod (I + S_i)/2 and normalizing. Throws BackendError for
/// n > 12.
StateVector tableau_to_statevector(const StabilizerTableau& tab);

}  // namespace qflow::sim
