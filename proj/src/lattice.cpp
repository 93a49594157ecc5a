#include "qwire/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/FFT>

#include "qwire/errors.hpp"

namespace qwire {

namespace {

void check_mode(int k, int n) {
    if (n < 1 || k < 1 || k > n) {
        throw std::out_of_range("mode index " + std::to_string(k) + " outside 1.." + std::to_string(n));
    }
}

}  // namespace

Lattice::Lattice(int n_sites, Boundary boundary) : n_(n_sites), boundary_(boundary) {
    if (n_sites < 3) {
        throw std::invalid_argument("lattice needs at least 3 sites, got " + std::to_string(n_sites));
    }
}

std::vector<std::pair<int, int>> Lattice::bonds() const {
    std::vector<std::pair<int, int>> out;
    out.reserve(n_);
    for (int j = 1; j < n_; ++j) out.emplace_back(j, j + 1);
    if (is_ring()) out.emplace_back(n_, 1);
    return out;
}

SingleParticleState SingleParticleState::basis(int n, int site) {
    if (site < 1 || site > n) throw std::out_of_range("site outside lattice");
    ComplexVector v = ComplexVector::Zero(n);
    v(site - 1) = 1.0;
    return SingleParticleState(std::move(v));
}

SingleParticleState SingleParticleState::normalized() const {
    const double nrm = amps_.norm();
    if (nrm == 0.0) throw std::invalid_argument("cannot normalise the zero state");
    return SingleParticleState(amps_ / nrm);
}

HoppingMatrix build_hopping(const Lattice& lattice) {
    const int n = lattice.size();
    HoppingMatrix h;
    h.boundary = lattice.boundary();
    h.entries = Eigen::MatrixXd::Zero(n, n);
    for (auto [a, b] : lattice.bonds()) {
        h.entries(a - 1, b - 1) = 1.0;
        h.entries(b - 1, a - 1) = 1.0;
    }
    return h;
}

double dispersion(int k, int n) {
    check_mode(k, n);
    return 2.0 * std::cos(2.0 * kPi * k / n);
}

double group_velocity(int k, int n) {
    check_mode(k, n);
    return -(4.0 * kPi / n) * std::sin(2.0 * kPi * k / n);
}

double group_velocity_sites(int k, int n) {
    return group_velocity(k, n) * n / (2.0 * kPi);
}

double transit_time(int n) {
    if (n < 1) throw std::invalid_argument("N must be positive");
    return n / (8.0 * kPi);
}

double angular_transit_time(int k, int n) {
    const double v = std::abs(group_velocity(k, n));
    if (v == 0.0) throw std::invalid_argument("mode has zero group velocity");
    return kPi / v;
}

Spectrum Spectrum::ring(int n) {
    return ring_with_dispersion(n, [n](int k) { return dispersion(k, n); });
}

Spectrum Spectrum::ring_with_dispersion(int n, const std::function<double(int)>& energy) {
    if (n < 1) throw std::invalid_argument("ring needs at least one site");
    Spectrum s;
    s.boundary_ = Boundary::Ring;
    s.energies_.resize(n);
    for (int k = 1; k <= n; ++k) s.energies_[k - 1] = energy(k);
    return s;
}

Spectrum Spectrum::chain(const Eigen::MatrixXd& hopping) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(hopping);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("symmetric eigensolver failed for chain of " + std::to_string(hopping.rows()) +
                             " sites");
    }
    const int n = static_cast<int>(hopping.rows());
    Spectrum s;
    s.boundary_ = Boundary::Chain;
    s.energies_.resize(n);
    s.chain_vectors_.resize(n, n);
    // Eigen sorts ascending; mode 1 is the highest energy.
    for (int k = 1; k <= n; ++k) {
        const int src = n - k;
        s.energies_[k - 1] = solver.eigenvalues()(src);
        Eigen::VectorXd v = solver.eigenvectors().col(src);
        // Fix the sign by the first non-negligible component.
        for (int j = 0; j < n; ++j) {
            if (std::abs(v(j)) > 1e-8) {
                if (v(j) < 0) v = -v;
                break;
            }
        }
        s.chain_vectors_.col(k - 1) = v;
    }
    return s;
}

double Spectrum::energy(int k) const {
    check_mode(k, size());
    return energies_[k - 1];
}

ComplexVector Spectrum::eigenvector(int k) const {
    const int n = size();
    check_mode(k, n);
    if (boundary_ == Boundary::Chain) return chain_vectors_.col(k - 1).cast<Complex>();
    ComplexVector v(n);
    const double norm = 1.0 / std::sqrt(static_cast<double>(n));
    for (int j = 1; j <= n; ++j) {
        // μ^{jk} with the exponent reduced mod N to keep the phase accurate.
        const long long e = (static_cast<long long>(j) * k) % n;
        v(j - 1) = std::polar(norm, 2.0 * kPi * static_cast<double>(e) / n);
    }
    return v;
}

ComplexVector Spectrum::to_modes(const ComplexVector& state) const {
    const int n = size();
    if (state.size() != n) throw std::invalid_argument("state length does not match spectrum");
    if (boundary_ == Boundary::Chain) return chain_vectors_.transpose().cast<Complex>() * state;

    // <W(k)|φ> = N^{-1/2} Σ_j e^{-2πijk/N} φ_j; with j = j'+1 this is
    // e^{-2πik/N} N^{-1/2} FFT(φ)[k mod N].
    Eigen::FFT<double> fft;
    std::vector<Complex> in(state.data(), state.data() + n), out;
    fft.fwd(out, in);
    ComplexVector coeffs(n);
    const double norm = 1.0 / std::sqrt(static_cast<double>(n));
    for (int k = 1; k <= n; ++k) {
        coeffs(k - 1) = out[k % n] * std::polar(norm, -2.0 * kPi * k / n);
    }
    return coeffs;
}

ComplexVector Spectrum::from_modes(const ComplexVector& coefficients) const {
    const int n = size();
    if (coefficients.size() != n) throw std::invalid_argument("coefficient length does not match spectrum");
    if (boundary_ == Boundary::Chain) return chain_vectors_.cast<Complex>() * coefficients;

    std::vector<Complex> in(n), out;
    for (int k = 1; k <= n; ++k) in[k % n] = coefficients(k - 1) * std::polar(1.0, 2.0 * kPi * k / n);
    Eigen::FFT<double> fft;
    fft.inv(out, in);  // scaled by 1/N
    ComplexVector state(n);
    const double scale = std::sqrt(static_cast<double>(n));
    for (int j = 0; j < n; ++j) state(j) = out[j] * scale;
    return state;
}

Spectrum diagonalize(const HoppingMatrix& hopping) {
    const Eigen::MatrixXd& h = hopping.entries;
    if (h.rows() != h.cols()) throw std::invalid_argument("hopping matrix must be square");
    if ((h - h.transpose()).cwiseAbs().maxCoeff() > 0.0) throw std::invalid_argument("hopping matrix must be symmetric");
    if (hopping.boundary == Boundary::Ring) return Spectrum::ring(hopping.size());
    return Spectrum::chain(h);
}

ComplexVector evolve_amplitudes(const ComplexVector& amplitudes, double t, const Spectrum& spectrum) {
    if (t == 0.0) return amplitudes;
    ComplexVector modes = spectrum.to_modes(amplitudes);
    for (int k = 0; k < modes.size(); ++k) modes(k) *= std::polar(1.0, -spectrum.energies()[k] * t);
    return spectrum.from_modes(modes);
}

SingleParticleState propagate(const SingleParticleState& state, double t, const Spectrum& spectrum) {
    if (!state.is_normalized()) {
        throw std::invalid_argument("propagate expects a normalised state (norm " + std::to_string(state.norm()) + ")");
    }
    return SingleParticleState(evolve_amplitudes(state.amplitudes(), t, spectrum));
}

}  // namespace qwire
