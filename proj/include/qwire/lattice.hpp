#pragma once

// Tight-binding lattice: hopping matrix, spectrum, and exact single-particle
// evolution. Sites and modes are 1-based throughout the public API (site j,
// mode k in 1..N); storage is 0-based.

#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace qwire {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;

inline constexpr double kPi = 3.14159265358979323846;

enum class Boundary { Ring, Chain };

class Lattice {
  public:
    explicit Lattice(int n_sites, Boundary boundary = Boundary::Ring);

    int size() const { return n_; }
    Boundary boundary() const { return boundary_; }
    bool is_ring() const { return boundary_ == Boundary::Ring; }

    /// Physical position x_j = j/N of site j (ring length 1).
    double position(int site) const { return static_cast<double>(site) / n_; }

    /// Nearest-neighbour bonds (j, j+1), including (N, 1) on a ring.
    std::vector<std::pair<int, int>> bonds() const;

  private:
    int n_;
    Boundary boundary_;
};

struct HoppingMatrix {
    Boundary boundary = Boundary::Ring;
    Eigen::MatrixXd entries;

    int size() const { return static_cast<int>(entries.rows()); }
};

/// Normalisable single-particle amplitudes over sites 1..N.
class SingleParticleState {
  public:
    SingleParticleState() = default;
    explicit SingleParticleState(ComplexVector amplitudes) : amps_(std::move(amplitudes)) {}

    static SingleParticleState basis(int n, int site);

    int size() const { return static_cast<int>(amps_.size()); }
    const ComplexVector& amplitudes() const { return amps_; }
    ComplexVector& amplitudes() { return amps_; }

    /// Amplitude on site j (1-based).
    Complex operator()(int site) const { return amps_(site - 1); }
    Complex& operator()(int site) { return amps_(site - 1); }

    double norm() const { return amps_.norm(); }
    bool is_normalized(double tol = 1e-10) const { return std::abs(amps_.squaredNorm() - 1.0) <= tol; }
    SingleParticleState normalized() const;

  private:
    ComplexVector amps_;
};

/// Eigen-decomposition of the hopping matrix.
///
/// Ring spectra keep the closed-form Fourier modes implicit and transform with
/// an FFT; chain spectra store a dense orthonormal eigenbasis. Modes are
/// indexed k = 1..N. On the ring mode k has energy 2cos(2πk/N) and eigenvector
/// components μ^{jk}/√N; on the chain modes are ordered by decreasing energy
/// (the sine-mode labelling).
class Spectrum {
  public:
    static Spectrum ring(int n);
    /// Ring Fourier modes with arbitrary energies; used for dispersion toys.
    static Spectrum ring_with_dispersion(int n, const std::function<double(int)>& energy);
    static Spectrum chain(const Eigen::MatrixXd& hopping);

    int size() const { return static_cast<int>(energies_.size()); }
    Boundary boundary() const { return boundary_; }
    double energy(int k) const;
    const std::vector<double>& energies() const { return energies_; }
    ComplexVector eigenvector(int k) const;

    /// Mode coefficients <W(k)|state>, stored at index k-1.
    ComplexVector to_modes(const ComplexVector& state) const;
    ComplexVector from_modes(const ComplexVector& coefficients) const;

  private:
    Spectrum() = default;

    Boundary boundary_ = Boundary::Ring;
    std::vector<double> energies_;
    Eigen::MatrixXd chain_vectors_;
};

HoppingMatrix build_hopping(const Lattice& lattice);

/// Ring hopping matrices use the closed-form Fourier modes; chains go through
/// a dense symmetric eigensolver. Throws NumericalError on non-convergence.
Spectrum diagonalize(const HoppingMatrix& hopping);

/// ω(k) = 2cos(2πk/N), k in 1..N.
double dispersion(int k, int n);

/// v(k) = dω/dk = -(4π/N) sin(2πk/N).
///
/// Mode index k is conjugate to the ring angle θ = 2πx, so this is a speed in
/// radians of ring per unit time. The speed in physical length is v/(2π).
double group_velocity(int k, int n);

/// Same velocity expressed in lattice sites per unit time: -2 sin(2πk/N).
double group_velocity_sites(int k, int n);

/// N/(8π): half the ring divided by |v(N/4)| with the half ring taken as
/// length 1/2. Because v is angular, the packet actually needs N/4 to cross
/// half the ring; see angular_transit_time.
double transit_time(int n);

/// Time for a k-packet to cover an angular distance of π (half the ring).
double angular_transit_time(int k, int n);

/// e^{-itΔ} applied through the spectral decomposition. The input must be
/// normalised (1e-10); throws std::invalid_argument otherwise.
SingleParticleState propagate(const SingleParticleState& state, double t, const Spectrum& spectrum);

/// As propagate, without the normalisation precondition.
ComplexVector evolve_amplitudes(const ComplexVector& amplitudes, double t, const Spectrum& spectrum);

}  // namespace qwire
