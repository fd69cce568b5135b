// SPDX-License-Identifier: Apache-2.0
#include "qflow/sim/statevector.hpp"

#include "kernels.hpp"

#include <cmath>

namespace qflow::sim {

StateVector::StateVector(std::uint32_t n) : n_(n), amps_(std::size_t{1} << n) { amps_[0] = 1.0; }

void StateVector::apply(const gates::Matrix& u, std::span<const std::uint32_t> targets) {
    detail::apply_matrix(amps_, n_, u, targets);
}

double StateVector::norm_squared() const {
    double s = 0.0;
    for (const Complex& a : amps_) s += std::norm(a);
    return s;
}

double StateVector::probability_one(std::uint32_t q) const {
    const std::uint64_t bit = std::uint64_t{1} << q;
    double p = 0.0;
    for (std::uint64_t i = 0; i < amps_.size(); ++i) {
        if (i & bit) p += std::norm(amps_[i]);
    }
    return p;
}

void StateVector::collapse(std::uint32_t q, bool outcome, double p_outcome) {
    const std::uint64_t bit = std::uint64_t{1} << q;
    const double scale = 1.0 / std::sqrt(p_outcome);
    for (std::uint64_t i = 0; i < amps_.size(); ++i) {
        if (((i & bit) != 0) == outcome) {
            amps_[i] *= scale;
        } else {
            amps_[i] = 0.0;
        }
    }
}

std::vector<double> StateVector::probabilities() const {
    std::vector<double> p(amps_.size());
    for (std::size_t i = 0; i < amps_.size(); ++i) p[i] = std::norm(amps_[i]);
    return p;
}

}  // namespace qflow::sim
