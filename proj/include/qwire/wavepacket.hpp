#pragma once

// Gaussian encoding modes and the single-particle dispersion analytics.

#include "qwire/lattice.hpp"

namespace qwire {

/// Contiguous block of sites [first, last], 1-based and inclusive.
struct SiteInterval {
    int first = 1;
    int last = 0;

    int size() const { return last >= first ? last - first + 1 : 0; }
    bool empty() const { return size() == 0; }
    bool contains(int site) const { return site >= first && site <= last; }
    double center() const { return 0.5 * (first + last); }
    bool overlaps(const SiteInterval& other) const {
        return !empty() && !other.empty() && first <= other.last && other.first <= last;
    }
};

struct PacketParams {
    double sigma_sites = 1.0;
    double center = 1.0;  // may be half-integer so the envelope sits symmetric in its region
    int wavenumber = 0;
    SiteInterval region;
};

/// Error-budget constants: e^{-c} truncation target, momentum cutoff
/// Λ = κN^{2/3}, and region size νN^{1/3}.
struct PacketBudget {
    double c = 9.0;
    double kappa = 1.0;
    double nu = 8.0;

    PacketBudget() = default;
    PacketBudget(double c_, double kappa_, double nu_);
};

enum class Direction { IncreasingSite, DecreasingSite };

struct PacketDefaults {
    double sigma_phys = 0.0;   // σ with σ² = c/(2π²κ²N^{4/3})
    double sigma_sites = 0.0;  // N·σ_phys
    double width_l0 = 0.0;     // L(0) = N^{-2/3}√c/(2πκ), the RMS width of |g|²
    int region_sites = 0;      // ⌈N·L(0)⌉
    int wavenumber = 0;        // 3N/4 moves toward increasing sites, N/4 the other way
    double cutoff = 0.0;       // Λ = κN^{2/3}
};

PacketDefaults sigma_for_budget(int n, const PacketBudget& budget, Direction direction = Direction::IncreasingSite);

/// Packet parameters from the budget, centred in the given region.
PacketParams default_packet(int n, const PacketBudget& budget, const SiteInterval& region,
                            Direction direction = Direction::IncreasingSite);

struct GaussianPacket {
    SingleParticleState state;
    double gamma = 0.0;        // normalisation constant
    bool single_site = false;  // region holds one site; the packet is a basis vector up to phase
};

/// g_j = γ exp(-(j-l)²/(2σ²)) exp(2πikj/N) on the region, zero elsewhere.
GaussianPacket gaussian_packet(const PacketParams& params, const Lattice& lattice);

/// Σ conj(a_j) b_j.
Complex overlap(const SingleParticleState& a, const SingleParticleState& b);

/// Squared amplitude on the region.
double region_weight(const SingleParticleState& state, const SiteInterval& region);

/// Circular centroid angle arg Σ|φ_j|² e^{2πi j/N}, in (-π, π].
double centroid_angle(const SingleParticleState& state);

/// Centroid as a physical position in [0, 1).
double centroid_position(const SingleParticleState& state);

/// RMS distance of |φ|² from the circular centroid, as a fraction of the ring.
double measured_width(const SingleParticleState& state);

/// Third-order broadening factor [1 + ½(ω''' t / (√2 L³))²]^{1/2}.
/// Pure formula; l0 and omega3 must use conjugate units.
double broadening_prediction(double l0, double t, double omega3);

/// ω'''(k0) = 2(2π/N)³ at k0 = N/4, with k the mode index.
double dispersion_third_derivative(int n);

/// ω'''(k0) with respect to the physical wavenumber q = 2πk: 2/N³.
double dispersion_third_derivative_physical(int n);

/// Exact RMS growth of an unchirped Gaussian under a purely cubic dispersion:
/// sqrt(1 + (ω3 t)² / (32 L⁶)), L the RMS width and ω3 = d³ω/dq³ in the same
/// length units.
double rms_broadening_factor(double l0, double t, double omega3);

/// exp(-π²κ²x1²/(2c)); the unspecified prefactor is left to fits.
double overlap_decay_estimate(double x1, const PacketBudget& budget);

/// 2σ√π ∫ e^{-4π²σ²k²} e^{(4πi/N)tk - (2i/3!)(2π/N)³tk³} dk over |k| ≤ 6/(2πσ),
/// σ the physical budget width. Adaptive quadrature, absolute tolerance
/// 1e-10. With include_cubic = false the closed-form Gaussian pair results.
Complex fourier_airy_overlap(const PacketBudget& budget, int n, double t, bool include_cubic = true);

/// Squared weight on modes whose ring distance from k0 exceeds the cutoff.
double spectral_leakage(const SingleParticleState& state, const Spectrum& spectrum, int k0, double cutoff);

/// Ring distance between mode indices.
int mode_distance(int k, int k0, int n);

}  // namespace qwire
