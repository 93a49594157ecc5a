#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "qwire/lattice.hpp"

namespace qwire::testing {

inline SingleParticleState random_state(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> normal;
    ComplexVector v(n);
    for (int j = 0; j < n; ++j) v(j) = Complex(normal(rng), normal(rng));
    return SingleParticleState(v / v.norm());
}

// Independent reference: Padé matrix exponential of -itΔ.
inline ComplexVector dense_evolve(const Eigen::MatrixXd& delta, const ComplexVector& v, double t) {
    const Eigen::MatrixXcd gen = Complex(0.0, -t) * delta.cast<Complex>();
    return gen.exp() * v;
}

}  // namespace qwire::testing
