#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "helpers.hpp"
#include "qwire/lattice.hpp"

using namespace qwire;
using qwire::testing::dense_evolve;
using qwire::testing::random_state;

namespace {

std::vector<double> sorted_eigenvalues(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> s(m);
    std::vector<double> v(s.eigenvalues().data(), s.eigenvalues().data() + s.eigenvalues().size());
    std::sort(v.begin(), v.end());
    return v;
}

double max_diff(const ComplexVector& a, const ComplexVector& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("hopping matrix structure") {
    SUBCASE("four-site ring rows sum to two") {
        const HoppingMatrix h = build_hopping(Lattice(4));
        for (int i = 0; i < 4; ++i) CHECK(h.entries.row(i).sum() == 2.0);
    }
    SUBCASE("symmetric, zero diagonal, one or two neighbours") {
        for (Boundary b : {Boundary::Ring, Boundary::Chain}) {
            const HoppingMatrix h = build_hopping(Lattice(9, b));
            CHECK((h.entries - h.entries.transpose()).norm() == 0.0);
            CHECK(h.entries.diagonal().norm() == 0.0);
            for (int i = 0; i < 9; ++i) {
                const double row = h.entries.row(i).sum();
                const bool end = b == Boundary::Chain && (i == 0 || i == 8);
                CHECK(row == (end ? 1.0 : 2.0));
            }
        }
    }
    SUBCASE("ring wraps site N onto site 1") {
        const HoppingMatrix h = build_hopping(Lattice(6));
        CHECK(h.entries(5, 0) == 1.0);
        CHECK(h.entries(0, 5) == 1.0);
        CHECK(build_hopping(Lattice(6, Boundary::Chain)).entries(5, 0) == 0.0);
    }
    CHECK_THROWS_AS(Lattice(2), std::invalid_argument);
}

TEST_CASE("four-site ring spectrum is {2, 0, -2, 0}") {
    const Spectrum s = diagonalize(build_hopping(Lattice(4)));
    const std::vector<double> expected = {0.0, -2.0, 0.0, 2.0};  // k = 1..4
    for (int k = 1; k <= 4; ++k) CHECK(s.energy(k) == doctest::Approx(expected[k - 1]).epsilon(1e-12));
    const auto dense = sorted_eigenvalues(build_hopping(Lattice(4)).entries);
    CHECK(dense[0] == doctest::Approx(-2.0));
    CHECK(std::abs(dense[1]) < 1e-12);
    CHECK(std::abs(dense[2]) < 1e-12);
    CHECK(dense[3] == doctest::Approx(2.0));
}

TEST_CASE("three-site chain eigenvalues") {
    // λ³ - 2λ = 0 for the 3×3 path graph.
    const Spectrum s = diagonalize(build_hopping(Lattice(3, Boundary::Chain)));
    CHECK(s.energy(1) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK(std::abs(s.energy(2)) < 1e-12);
    CHECK(s.energy(3) == doctest::Approx(-std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("dispersion values") {
    CHECK(dispersion(1, 8) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    CHECK(dispersion(4, 8) == doctest::Approx(-2.0).epsilon(1e-14));
    CHECK(std::abs(dispersion(64, 256)) < 1e-14);
    CHECK(dispersion(256, 256) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(dispersion(2, 12) == doctest::Approx(1.0).epsilon(1e-14));
    const Spectrum s = Spectrum::ring(8);
    CHECK(std::abs(std::accumulate(s.energies().begin(), s.energies().end(), 0.0)) < 1e-12);
    CHECK_THROWS_AS(dispersion(0, 8), std::out_of_range);
    CHECK_THROWS_AS(dispersion(9, 8), std::out_of_range);
}

TEST_CASE("group velocity values") {
    CHECK(group_velocity(256, 1024) == doctest::Approx(-4.0 * kPi / 1024).epsilon(1e-12));
    CHECK(std::abs(group_velocity(512, 1024)) < 1e-15);
    CHECK(group_velocity(64, 256) == doctest::Approx(-0.0490874).epsilon(1e-6));
    CHECK(group_velocity(768, 1024) == doctest::Approx(4.0 * kPi / 1024).epsilon(1e-12));
    CHECK(group_velocity_sites(768, 1024) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK_THROWS_AS(group_velocity(0, 16), std::out_of_range);
}

TEST_CASE("transit time formula") {
    CHECK(transit_time(256) == doctest::Approx(10.18592).epsilon(1e-6));
    CHECK(transit_time(1024) == doctest::Approx(40.74366).epsilon(1e-6));
    // N = 8πq is never an integer; N = 8q gives q/π instead.
    for (int q : {1, 3, 7}) CHECK(transit_time(8 * q) * kPi == doctest::Approx(q));
    CHECK(angular_transit_time(768, 1024) == doctest::Approx(256.0));
}

TEST_CASE("spectrum eigenpairs are orthonormal and exact") {
    for (Boundary b : {Boundary::Ring, Boundary::Chain}) {
        for (int n : {5, 8, 13}) {
            const HoppingMatrix h = build_hopping(Lattice(n, b));
            const Spectrum s = diagonalize(h);
            Eigen::MatrixXcd v(n, n);
            for (int k = 1; k <= n; ++k) {
                v.col(k - 1) = s.eigenvector(k);
                const ComplexVector resid = h.entries.cast<Complex>() * v.col(k - 1) - s.energy(k) * v.col(k - 1);
                CHECK(resid.norm() < 1e-10);
            }
            CHECK((v.adjoint() * v - Eigen::MatrixXcd::Identity(n, n)).norm() < 1e-10);
        }
    }
}

TEST_CASE("ring eigenvalue multiset matches the closed form") {
    for (int n : {4, 7, 16, 33}) {
        std::vector<double> formula;
        for (int k = 1; k <= n; ++k) formula.push_back(2.0 * std::cos(2.0 * kPi * k / n));
        std::sort(formula.begin(), formula.end());
        const auto dense = sorted_eigenvalues(build_hopping(Lattice(n)).entries);
        for (int i = 0; i < n; ++i) CHECK(std::abs(dense[i] - formula[i]) < 1e-10);
    }
}

TEST_CASE("mode transforms are inverse") {
    std::mt19937_64 rng(7);
    for (int n : {6, 64, 100}) {
        const Spectrum s = Spectrum::ring(n);
        const SingleParticleState phi = random_state(n, rng);
        CHECK(max_diff(s.from_modes(s.to_modes(phi.amplitudes())), phi.amplitudes()) < 1e-12);
        // Mode coefficients agree with explicit inner products.
        const ComplexVector c = s.to_modes(phi.amplitudes());
        for (int k : {1, n / 2, n}) CHECK(std::abs(c(k - 1) - s.eigenvector(k).dot(phi.amplitudes())) < 1e-12);
    }
}

TEST_CASE("propagation examples") {
    const Spectrum s = Spectrum::ring(8);
    std::mt19937_64 rng(11);
    SUBCASE("t = 0 is the identity") {
        const SingleParticleState phi = random_state(8, rng);
        CHECK(max_diff(propagate(phi, 0.0, s).amplitudes(), phi.amplitudes()) == 0.0);
    }
    SUBCASE("eigenvectors pick up a phase") {
        for (int k = 1; k <= 8; ++k) {
            const SingleParticleState v(s.eigenvector(k));
            const ComplexVector out = propagate(v, 2.3, s).amplitudes();
            CHECK(max_diff(out, std::polar(1.0, -s.energy(k) * 2.3) * v.amplitudes()) < 1e-12);
        }
    }
    SUBCASE("basis state against the dense exponential") {
        const SingleParticleState e1 = SingleParticleState::basis(8, 1);
        const ComplexVector ref = dense_evolve(build_hopping(Lattice(8)).entries, e1.amplitudes(), 3.7);
        CHECK(max_diff(propagate(e1, 3.7, s).amplitudes(), ref) < 1e-8);
    }
    SUBCASE("unnormalised input is rejected") {
        CHECK_THROWS_AS(propagate(SingleParticleState(ComplexVector::Ones(8)), 1.0, s), std::invalid_argument);
    }
}

TEST_CASE("chain propagation against the dense exponential") {
    const HoppingMatrix h = build_hopping(Lattice(11, Boundary::Chain));
    const Spectrum s = diagonalize(h);
    std::mt19937_64 rng(5);
    const SingleParticleState phi = random_state(11, rng);
    CHECK(max_diff(propagate(phi, 4.2, s).amplitudes(), dense_evolve(h.entries, phi.amplitudes(), 4.2)) < 1e-8);
}

TEST_CASE("propagation properties on random states") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int n : {4, 9, 16, 64}) {
        const Spectrum s = Spectrum::ring(n);
        const Eigen::MatrixXd delta = build_hopping(Lattice(n)).entries;
        for (int trial = 0; trial < 5; ++trial) {
            const SingleParticleState phi = random_state(n, rng);
            const double t1 = uni(rng) * n, t2 = uni(rng) * n;
            const SingleParticleState a = propagate(phi, t1, s);
            CHECK(std::abs(a.norm() - 1.0) < 1e-10);
            CHECK(max_diff(propagate(a, t2, s).amplitudes(), propagate(phi, t1 + t2, s).amplitudes()) < 1e-9);
            CHECK(max_diff(propagate(a, -t1, s).amplitudes(), phi.amplitudes()) < 1e-9);
            if (n <= 16) CHECK(max_diff(a.amplitudes(), dense_evolve(delta, phi.amplitudes(), t1)) < 1e-8);
        }
    }
}
