#pragma once

// Protocol planning and closed-form error accounting.

#include <optional>
#include <vector>

#include "qwire/lattice.hpp"
#include "qwire/wavepacket.hpp"

namespace qwire {

struct WaitSearchOptions {
    double t_min = 0.25;
    double growth = 1.1;        // geometric grid ratio
    double rel_tolerance = 0.01;
    std::optional<double> t_max;  // defaults to the ring recurrence guard N/4
};

struct PlanOptions {
    std::optional<int> wavenumber;    // required when N is not a multiple of 4
    std::optional<double> wait;       // skip the minimal-wait search
    std::optional<int> region_sites;  // override ⌈νN^{1/3}⌉
    std::optional<double> sigma_sites;
    WaitSearchOptions search;
};

struct ProtocolPlan {
    int n = 0;
    int m_signals = 1;
    double wait = 0.0;         // between successive encodings
    double decode_time = 0.0;  // from encoding a signal to decoding it
    SiteInterval region_a;
    SiteInterval region_b;
    PacketParams packet;
    PacketBudget budget;
    double epsilon = 0.01;
    double cooling_threshold = 0.1;  // 10ε unless set
};

/// ⌈νN^{1/3}⌉.
int region_size(int n, double nu);

/// R_A = {1..R}, R_B = {N/2..N/2+R-1}, packet centred in R_A, decode time
/// from centre-to-centre distance, wait from min_wait_time with target ε
/// unless given. Throws PlanningError when the regions cannot be disjoint.
ProtocolPlan plan_protocol(int n, int m, const PacketBudget& budget, double epsilon, const PlanOptions& options = {});

/// Angular centre-to-centre distance along the direction of motion divided by
/// the angular group speed of mode k.
double decode_time(int n, int wavenumber, const SiteInterval& from, const SiteInterval& to);

struct ErrorBudgetReport {
    double eps_e = 0.0;
    double eps_p = 0.0;
    double eps_d = 0.0;
    std::optional<double> eps_i;
    double fidelity_bound = 1.0;
    bool clamped = false;

    double total() const { return eps_e + eps_p + eps_d; }
};

/// Fills fidelity_bound = 1 - ε_E - ε_P - ε_D, clamped at zero.
ErrorBudgetReport make_report(double eps_e, double eps_p, double eps_d, std::optional<double> eps_i = std::nullopt);

/// t ↦ <g0|e^{-itΔ}|g0> from the mode weights of g0; O(N) per evaluation.
class Autocorrelation {
  public:
    Autocorrelation(const SingleParticleState& g0, const Spectrum& spectrum);
    Complex operator()(double t) const;

  private:
    std::vector<double> weights_;
    std::vector<double> energies_;
};

/// 3 Σ_{j=1}^{M-1} (M-j) |<g(0)|g(jt)>|.
double encoding_error_bound(const SingleParticleState& g0, double t, int m, const Spectrum& spectrum);
double encoding_error_bound(const Autocorrelation& overlaps, double t, int m);

struct DecodeResult {
    SingleParticleState h;  // g(T) restricted to R_B, renormalised
    double weight = 0.0;    // squared weight of g(T) on R_B
    double eps_d = 0.0;     // 1 - |<g(T)|h>|
};

/// Throws DegenerateDecode when g(T) has no weight on the region.
DecodeResult decode_mode(const SingleParticleState& gT, const SiteInterval& region_b);

/// Transport used to place the ideal packet: angular group velocity and the
/// third derivative of ω in physical wavenumber.
struct TransportModel {
    double velocity = 0.0;
    double omega3 = 0.0;
};

TransportModel tight_binding_transport(int n, int wavenumber);

/// The packet g0 ideally translated by v·T, envelope widened by the exact
/// cubic-dispersion RMS factor, on the whole ring.
SingleParticleState ideal_translated_packet(const PacketParams& packet, int n, double T, const TransportModel& model);

/// ε_P = 1 - |<ideal | g(T)>|.
double propagation_error(const SingleParticleState& g0, double T, const ProtocolPlan& plan, const Spectrum& spectrum,
                         const std::optional<TransportModel>& model = std::nullopt);

/// ε_E, ε_P, ε_D for a plan on the ring.
ErrorBudgetReport evaluate_error_budget(const ProtocolPlan& plan, const Spectrum& spectrum);

/// ε_E scaled by λ for M = λN^{2/3} signals.
ErrorBudgetReport accumulate_error(const ErrorBudgetReport& report, double lambda);

bool needs_cooling(const ErrorBudgetReport& report, const ProtocolPlan& plan);

/// Smallest wait on a geometric grid whose encoding bound meets the target,
/// bisection-refined against the bracketing grid point above. Throws
/// SearchFailure when no wait up to the recurrence guard works.
double min_wait_time(const SingleParticleState& g0, int m, double target, const Spectrum& spectrum,
                     const WaitSearchOptions& options = {});
double min_wait_time(int n, int m, const PacketBudget& budget, double target, const WaitSearchOptions& options = {});

struct ScalingSample {
    double n = 0.0;
    double t_star = 0.0;
};

struct ScalingFit {
    std::vector<ScalingSample> samples;
    double exponent = 0.0;
    double intercept = 0.0;  // log prefactor
    double r_squared = 0.0;
};

/// Least squares of log t* against log N. Needs ≥ 3 samples with distinct N.
ScalingFit fit_rate_scaling(const std::vector<ScalingSample>& samples);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace qwire
