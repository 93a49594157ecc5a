#include <doctest.h>

#include <cmath>
#include <vector>

#include <gsl/gsl_fit.h>

#include "helpers.hpp"
#include "qwire/wavepacket.hpp"

using namespace qwire;

namespace {

GaussianPacket budget_packet(int n, const PacketBudget& b = {}) {
    const int r = static_cast<int>(std::ceil(b.nu * std::cbrt(static_cast<double>(n)) - 1e-9));
    return gaussian_packet(default_packet(n, b, SiteInterval{1, r}), Lattice(n));
}

// Same envelope with its region widened to the whole ring.
SingleParticleState untruncated(int n, const PacketParams& p) {
    PacketParams q = p;
    q.region = {1, n};
    return gaussian_packet(q, Lattice(n)).state;
}

double r_squared(const std::vector<double>& x, const std::vector<double>& y) {
    double c0, c1, c00, c01, c11, ss_res;
    gsl_fit_linear(x.data(), 1, y.data(), 1, x.size(), &c0, &c1, &c00, &c01, &c11, &ss_res);
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= y.size();
    double ss_tot = 0.0;
    for (double v : y) ss_tot += (v - mean) * (v - mean);
    return 1.0 - ss_res / ss_tot;
}

}  // namespace

TEST_CASE("gaussian packet construction") {
    const Lattice lat(64);
    SUBCASE("single-site region gives a basis vector up to phase") {
        PacketParams p{2.0, 10.0, 16, {10, 10}};
        const GaussianPacket g = gaussian_packet(p, lat);
        CHECK(g.single_site);
        CHECK(std::abs(g.state(10)) == doctest::Approx(1.0));
        CHECK(g.state.amplitudes().norm() == doctest::Approx(1.0));
    }
    SUBCASE("normalised for any valid parameters") {
        for (double s : {0.3, 1.0, 4.0, 40.0}) {
            for (int k : {0, 5, 16, 63}) {
                const GaussianPacket g = gaussian_packet({s, 12.5, k, {3, 22}}, lat);
                CHECK(std::abs(g.state.amplitudes().squaredNorm() - 1.0) < 1e-14);
                CHECK_FALSE(g.single_site);
            }
        }
    }
    SUBCASE("envelope ratio one width from the centre") {
        const GaussianPacket g = gaussian_packet({4.0, 8.0, 16, {1, 16}}, lat);
        CHECK(std::abs(g.state(12)) / std::abs(g.state(8)) == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
    }
    SUBCASE("carrier phase e^{2πikj/N}") {
        const GaussianPacket g = gaussian_packet({4.0, 8.0, 16, {1, 16}}, lat);
        const Complex ratio = g.state(9) / g.state(8) * std::abs(g.state(8)) / std::abs(g.state(9));
        CHECK(std::abs(ratio - std::polar(1.0, 2.0 * kPi * 16 / 64)) < 1e-12);
    }
    SUBCASE("invalid parameters") {
        CHECK_THROWS_AS(gaussian_packet({0.0, 8.0, 1, {1, 16}}, lat), std::invalid_argument);
        CHECK_THROWS_AS(gaussian_packet({1.0, 20.0, 1, {1, 16}}, lat), std::invalid_argument);
        CHECK_THROWS_AS(gaussian_packet({1.0, 8.0, 1, {1, 65}}, lat), std::invalid_argument);
        CHECK_THROWS_AS(PacketBudget(0.0, 1.0, 1.0), std::invalid_argument);
    }
}

TEST_CASE("budget-derived packet parameters") {
    const PacketDefaults a = sigma_for_budget(512, PacketBudget(4.0, 1.0, 2.0));
    CHECK(a.sigma_sites == doctest::Approx(3.6013).epsilon(1e-4));
    CHECK(a.sigma_sites == doctest::Approx(2.0 / (std::sqrt(2.0) * kPi) * 8.0).epsilon(1e-12));
    const PacketDefaults b = sigma_for_budget(512, PacketBudget(4.0, 2.0, 2.0));
    CHECK(b.sigma_sites == doctest::Approx(a.sigma_sites / 2.0).epsilon(1e-12));
    CHECK(sigma_for_budget(4096, PacketBudget(9.0, 1.0, 2.0)).width_l0 == doctest::Approx(0.0018652).epsilon(1e-4));
    CHECK(sigma_for_budget(64, {}).wavenumber == 48);
    CHECK(sigma_for_budget(64, {}, Direction::DecreasingSite).wavenumber == 16);
    CHECK_THROWS_AS(sigma_for_budget(66, {}), std::invalid_argument);
}

TEST_CASE("overlap and region weight") {
    std::mt19937_64 rng(3);
    const SingleParticleState phi = qwire::testing::random_state(40, rng);
    CHECK(std::abs(overlap(phi, phi) - 1.0) < 1e-14);

    const Lattice lat(40);
    const auto a = gaussian_packet({1.5, 5.0, 10, {1, 10}}, lat).state;
    const auto b = gaussian_packet({1.5, 25.0, 10, {20, 30}}, lat).state;
    CHECK(std::abs(overlap(a, b)) == 0.0);
    CHECK_THROWS_AS(overlap(a, SingleParticleState::basis(8, 1)), std::invalid_argument);

    CHECK(region_weight(phi, {1, 40}) == doctest::Approx(1.0));
    CHECK(region_weight(phi, {5, 4}) == 0.0);

    SUBCASE("travelling packet leaves its own footprint") {
        const GaussianPacket g = budget_packet(1024);
        const auto gt = propagate(g.state, transit_time(1024), Spectrum::ring(1024));
        CHECK(std::abs(overlap(g.state, gt)) < 0.01);
    }
    SUBCASE("untruncated envelope keeps at least 1 - e^{-c} in its region") {
        const PacketBudget budget;
        const GaussianPacket g = budget_packet(1024, budget);
        CHECK(region_weight(g.state, {1, 81}) == doctest::Approx(1.0));
        const PacketParams p = default_packet(1024, budget, {1, 81});
        CHECK(region_weight(untruncated(1024, p), p.region) >= 1.0 - std::exp(-budget.c));
    }
}

TEST_CASE("measured width") {
    CHECK(measured_width(SingleParticleState::basis(32, 7)) == 0.0);

    SUBCASE("equal weight on two sites") {
        // Centroid lands midway; each site is d/2 sites from it.
        for (int d : {2, 4, 6}) {
            ComplexVector v = ComplexVector::Zero(16);
            v(2) = v(2 + d) = 1.0 / std::sqrt(2.0);
            CHECK(measured_width(SingleParticleState(v)) == doctest::Approx(0.5 * d / 16.0).epsilon(1e-12));
        }
    }
    SUBCASE("uniform state has no centroid") {
        // The phase sum cancels; any width reported is at least the N = 16 spread about a site.
        const SingleParticleState u(ComplexVector::Constant(16, 0.25));
        CHECK(measured_width(u) > 0.28);
    }
    SUBCASE("Gaussian of width s sites has RMS s/(√2 N)") {
        const int n = 1024;
        for (double s : {6.0, 10.0, 20.0}) {
            const auto g = gaussian_packet({s, 300.0, 5, {1, n}}, Lattice(n)).state;
            CHECK(measured_width(g) == doctest::Approx(s / (std::sqrt(2.0) * n)).epsilon(0.05));
        }
    }
    SUBCASE("wraparound is handled") {
        const int n = 128;
        const auto left = gaussian_packet({3.0, 2.0, 0, {1, 20}}, Lattice(n)).state;
        const auto mid = gaussian_packet({3.0, 64.0, 0, {45, 83}}, Lattice(n)).state;
        ComplexVector wrapped = ComplexVector::Zero(n);
        for (int j = 1; j <= n; ++j) wrapped(j - 1) = mid((j + 61) % n + 1);
        CHECK(measured_width(SingleParticleState(wrapped)) == doctest::Approx(measured_width(mid)).epsilon(1e-12));
        CHECK(measured_width(left) < 0.05);
    }
}

TEST_CASE("broadening prediction formula") {
    CHECK(broadening_prediction(0.01, 0.0, 5.0) == 1.0);
    // ω''' t / (√2 L³) = 1.
    const double l0 = 0.2, omega3 = 3.0;
    const double t = std::sqrt(2.0) * l0 * l0 * l0 / omega3;
    CHECK(broadening_prediction(l0, t, omega3) == doctest::Approx(std::sqrt(1.5)).epsilon(1e-12));
    CHECK(dispersion_third_derivative(64) == doctest::Approx(2.0 * std::pow(2.0 * kPi / 64, 3)));
    CHECK_THROWS_AS(broadening_prediction(0.0, 1.0, 1.0), std::invalid_argument);

    SUBCASE("bounded growth at the transit time across N") {
        std::vector<double> ratios;
        for (int n : {512, 1024, 2048}) {
            const double l0 = sigma_for_budget(n, {}).width_l0;
            ratios.push_back(broadening_prediction(2.0 * kPi * l0, transit_time(n), dispersion_third_derivative(n)));
        }
        for (double r : ratios) CHECK(r == doctest::Approx(ratios[0]).epsilon(0.10));
    }
}

TEST_CASE("measured broadening follows the prediction") {
    for (int n : {512, 2048}) {
        const GaussianPacket g = budget_packet(n);
        const double l0 = measured_width(g.state);
        const double t = transit_time(n);
        const double ratio = measured_width(propagate(g.state, t, Spectrum::ring(n))) / l0;
        const double pred = broadening_prediction(2.0 * kPi * l0, t, dispersion_third_derivative(n));
        CHECK(ratio == doctest::Approx(pred).epsilon(0.15));
        // The exact second-moment growth is much tighter.
        CHECK(ratio == doctest::Approx(rms_broadening_factor(l0, t, dispersion_third_derivative_physical(n)))
                           .epsilon(0.01));
    }
}

TEST_CASE("centroid advances with the group velocity") {
    for (int n : {512, 2048}) {
        const GaussianPacket g = budget_packet(n);
        const Spectrum s = Spectrum::ring(n);
        const double v = group_velocity(3 * n / 4, n);
        const double a0 = centroid_angle(g.state);
        for (double frac : {0.25, 0.5, 1.0}) {
            const double t = frac * transit_time(n);
            const double moved = std::remainder(centroid_angle(propagate(g.state, t, s)) - a0, 2.0 * kPi);
            CHECK(moved == doctest::Approx(v * t).epsilon(0.03));
        }
    }
}

TEST_CASE("overlap decay estimate") {
    const PacketBudget b;
    CHECK(overlap_decay_estimate(0.0, b) == 1.0);
    CHECK(overlap_decay_estimate(2.0, PacketBudget(9.0, 1.0, 8.0)) ==
          doctest::Approx(overlap_decay_estimate(4.0, PacketBudget(36.0, 1.0, 8.0))));
    CHECK(overlap_decay_estimate(1.0, PacketBudget(4.0, 2.0, 8.0)) ==
          doctest::Approx(overlap_decay_estimate(2.0, PacketBudget(4.0, 1.0, 8.0))));

    SUBCASE("-log|<g(0)|g(t)>| is linear in t² N^{-2/3}") {
        std::vector<double> x, y;
        for (int n : {512, 1024, 2048, 4096}) {
            const GaussianPacket g = budget_packet(n);
            const Spectrum s = Spectrum::ring(n);
            for (double u = 0.25; u <= 2.0 + 1e-9; u += 0.25) {
                const double t = u * std::cbrt(double(n));
                x.push_back(u * u);
                y.push_back(-std::log(std::abs(overlap(g.state, propagate(g.state, t, s)))));
            }
        }
        CHECK(r_squared(x, y) >= 0.95);
    }
}

TEST_CASE("Fourier-Airy overlap") {
    const PacketBudget b;
    CHECK(std::abs(fourier_airy_overlap(b, 1024, 0.0) - 1.0) < 1e-9);

    SUBCASE("without the cubic term it is the Gaussian pair") {
        for (double x1 : {0.5, 1.0, 3.0}) {
            const double t = 0.5 * x1 * std::cbrt(1024.0);
            const Complex v = fourier_airy_overlap(b, 1024, t, false);
            CHECK(std::abs(v) == doctest::Approx(overlap_decay_estimate(x1, b)).epsilon(1e-8));
        }
    }
    SUBCASE("matches the lattice overlap") {
        const int n = 1024;
        const GaussianPacket g = budget_packet(n, b);
        const double t = 0.5 * 2.0 * std::cbrt(double(n));
        const double lattice = std::abs(overlap(g.state, propagate(g.state, t, Spectrum::ring(n))));
        CHECK(std::abs(fourier_airy_overlap(b, n, t)) == doctest::Approx(lattice).epsilon(0.05));
    }
}

TEST_CASE("spectral leakage") {
    const int n = 256;
    const Spectrum s = Spectrum::ring(n);
    CHECK(spectral_leakage(SingleParticleState(s.eigenvector(192)), s, 192, 1.0) < 1e-20);
    std::mt19937_64 rng(9);
    CHECK(spectral_leakage(qwire::testing::random_state(n, rng), s, 10, n / 2.0) == 0.0);
    CHECK(mode_distance(1, 255, 256) == 2);

    SUBCASE("budget packet stays inside the cutoff") {
        for (int m : {512, 1024, 2048}) {
            const PacketBudget budget;
            const PacketDefaults d = sigma_for_budget(m, budget);
            const GaussianPacket g = budget_packet(m, budget);
            CHECK(spectral_leakage(g.state, Spectrum::ring(m), d.wavenumber, d.cutoff) <= 1.5 * std::exp(-budget.c));
        }
    }
    SUBCASE("leakage falls as c grows") {
        const int m = 1024;
        double prev = 2.0;
        for (double c : {1.0, 4.0, 9.0, 16.0}) {
            const PacketBudget budget(c, 1.0, 12.0);
            const PacketDefaults d = sigma_for_budget(m, budget);
            const double leak = spectral_leakage(budget_packet(m, budget).state, Spectrum::ring(m), d.wavenumber,
                                                 d.cutoff);
            CHECK(leak < prev);
            // The built packet carries all its weight in its own region.
            CHECK(region_weight(budget_packet(m, budget).state, {1, m}) == doctest::Approx(1.0));
            prev = leak;
        }
    }
}

TEST_CASE("unitary evolution preserves overlaps") {
    std::mt19937_64 rng(17);
    const Spectrum s = Spectrum::ring(50);
    for (int i = 0; i < 5; ++i) {
        const auto a = qwire::testing::random_state(50, rng);
        const auto b = qwire::testing::random_state(50, rng);
        const double t = 3.0 * i + 0.7;
        CHECK(std::abs(std::abs(overlap(propagate(a, t, s), propagate(b, t, s))) - std::abs(overlap(a, b))) < 1e-10);
    }
}
