#include "qwire/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

#include <gsl/gsl_fit.h>

#include "qwire/errors.hpp"

namespace qwire {

namespace {

double budget_sigma_sites(int n, const PacketBudget& budget) {
    const double nd = static_cast<double>(n);
    const double n23 = std::cbrt(nd * nd);
    return nd * std::sqrt(budget.c / (2.0 * kPi * kPi * budget.kappa * budget.kappa * n23 * n23));
}

}  // namespace

int region_size(int n, double nu) {
    if (!(nu > 0.0)) throw std::invalid_argument("region coefficient ν must be positive");
    return static_cast<int>(std::ceil(nu * std::cbrt(static_cast<double>(n)) - 1e-9));
}

double decode_time(int n, int wavenumber, const SiteInterval& from, const SiteInterval& to) {
    const double v = group_velocity_sites(wavenumber, n);
    if (std::abs(v) < 1e-12) throw PlanningError("wavenumber " + std::to_string(wavenumber) + " does not propagate");
    double distance = v > 0 ? to.center() - from.center() : from.center() - to.center();
    distance = std::fmod(distance, static_cast<double>(n));
    if (distance < 0) distance += n;
    return distance / std::abs(v);
}

ProtocolPlan plan_protocol(int n, int m, const PacketBudget& budget, double epsilon, const PlanOptions& options) {
    if (m < 1) throw std::invalid_argument("at least one signal is required");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("threshold ε must lie in (0, 1)");
    if (n < 4) throw std::invalid_argument("N must be at least 4");
    if (!options.wavenumber && n % 4 != 0) {
        throw std::invalid_argument("N=" + std::to_string(n) + " is not a multiple of 4; pass an explicit wavenumber");
    }

    ProtocolPlan plan;
    plan.n = n;
    plan.m_signals = m;
    plan.budget = budget;
    plan.epsilon = epsilon;
    plan.cooling_threshold = 10.0 * epsilon;

    const int r = options.region_sites.value_or(region_size(n, budget.nu));
    if (r < 1) throw PlanningError("region must hold at least one site");
    plan.region_a = {1, r};
    plan.region_b = {n / 2, n / 2 + r - 1};
    if (plan.region_b.last > n || plan.region_a.overlaps(plan.region_b)) {
        throw PlanningError("regions of " + std::to_string(r) + " sites overlap on N=" + std::to_string(n) +
                            " (ν=" + std::to_string(budget.nu) + " too large for this N)");
    }

    plan.packet.wavenumber = options.wavenumber.value_or(3 * n / 4);
    plan.packet.sigma_sites = options.sigma_sites.value_or(budget_sigma_sites(n, budget));
    plan.packet.region = plan.region_a;
    plan.packet.center = plan.region_a.center();
    plan.decode_time = decode_time(n, plan.packet.wavenumber, plan.region_a, plan.region_b);

    if (options.wait) {
        if (!(*options.wait > 0.0)) throw std::invalid_argument("wait must be positive");
        plan.wait = *options.wait;
    } else {
        const Lattice lattice(n);
        const SingleParticleState g0 = gaussian_packet(plan.packet, lattice).state;
        try {
            plan.wait = min_wait_time(g0, m, epsilon, Spectrum::ring(n), options.search);
        } catch (const SearchFailure& e) {
            throw PlanningError(std::string("no admissible wait: ") + e.what());
        }
    }
    return plan;
}

ErrorBudgetReport make_report(double eps_e, double eps_p, double eps_d, std::optional<double> eps_i) {
    if (eps_e < 0.0 || eps_p < 0.0 || eps_d < 0.0 || (eps_i && *eps_i < 0.0)) {
        throw std::invalid_argument("error components must be non-negative");
    }
    ErrorBudgetReport r;
    r.eps_e = eps_e;
    r.eps_p = eps_p;
    r.eps_d = eps_d;
    r.eps_i = eps_i;
    r.fidelity_bound = 1.0 - eps_e - eps_p - eps_d;
    if (r.fidelity_bound < 0.0) {
        r.fidelity_bound = 0.0;
        r.clamped = true;
    }
    return r;
}

Autocorrelation::Autocorrelation(const SingleParticleState& g0, const Spectrum& spectrum)
    : energies_(spectrum.energies()) {
    const ComplexVector modes = spectrum.to_modes(g0.amplitudes());
    weights_.resize(modes.size());
    for (int k = 0; k < modes.size(); ++k) weights_[k] = std::norm(modes(k));
}

Complex Autocorrelation::operator()(double t) const {
    Complex sum = 0.0;
    for (std::size_t k = 0; k < weights_.size(); ++k) sum += weights_[k] * std::polar(1.0, -energies_[k] * t);
    return sum;
}

double encoding_error_bound(const Autocorrelation& overlaps, double t, int m) {
    if (m < 1) throw std::invalid_argument("at least one signal is required");
    double sum = 0.0;
    for (int j = 1; j < m; ++j) sum += (m - j) * std::abs(overlaps(j * t));
    return 3.0 * sum;
}

double encoding_error_bound(const SingleParticleState& g0, double t, int m, const Spectrum& spectrum) {
    return encoding_error_bound(Autocorrelation(g0, spectrum), t, m);
}

DecodeResult decode_mode(const SingleParticleState& gT, const SiteInterval& region_b) {
    if (!gT.is_normalized()) throw std::invalid_argument("decode expects a normalised state");
    const double w = region_weight(gT, region_b);
    if (!(w > 0.0)) throw DegenerateDecode("arriving packet has no weight in the decoding region");

    ComplexVector h = ComplexVector::Zero(gT.size());
    for (int j = std::max(region_b.first, 1); j <= std::min(region_b.last, gT.size()); ++j) h(j - 1) = gT(j);
    DecodeResult out;
    out.h = SingleParticleState(h / std::sqrt(w));
    out.weight = w;
    out.eps_d = 1.0 - std::abs(overlap(gT, out.h));
    return out;
}

TransportModel tight_binding_transport(int n, int wavenumber) {
    const double nd = static_cast<double>(n);
    TransportModel m;
    m.velocity = group_velocity(wavenumber, n);
    m.omega3 = 2.0 * std::sin(2.0 * kPi * wavenumber / nd) / (nd * nd * nd);
    return m;
}

SingleParticleState ideal_translated_packet(const PacketParams& packet, int n, double T, const TransportModel& model) {
    const double shift = model.velocity * T * n / (2.0 * kPi);
    const double center = packet.center + shift;
    const double l0 = packet.sigma_sites / (std::sqrt(2.0) * n);
    const double sigma = packet.sigma_sites * rms_broadening_factor(l0, T, model.omega3);
    const long long k = ((packet.wavenumber % n) + n) % n;

    ComplexVector amps(n);
    for (int j = 1; j <= n; ++j) {
        const double d = std::remainder(j - center, static_cast<double>(n));
        const long long phase = (k * j) % n;
        amps(j - 1) = std::polar(std::exp(-d * d / (2.0 * sigma * sigma)), 2.0 * kPi * static_cast<double>(phase) / n);
    }
    return SingleParticleState(amps / amps.norm());
}

double propagation_error(const SingleParticleState& g0, double T, const ProtocolPlan& plan, const Spectrum& spectrum,
                         const std::optional<TransportModel>& model) {
    const TransportModel tm = model.value_or(tight_binding_transport(plan.n, plan.packet.wavenumber));
    const SingleParticleState gT = propagate(g0, T, spectrum);
    const SingleParticleState ideal = ideal_translated_packet(plan.packet, plan.n, T, tm);
    return std::max(0.0, 1.0 - std::abs(overlap(ideal, gT)));
}

ErrorBudgetReport evaluate_error_budget(const ProtocolPlan& plan, const Spectrum& spectrum) {
    const Lattice lattice(plan.n);
    const SingleParticleState g0 = gaussian_packet(plan.packet, lattice).state;
    const double eps_e = encoding_error_bound(g0, plan.wait, plan.m_signals, spectrum);
    const SingleParticleState gT = propagate(g0, plan.decode_time, spectrum);
    const double eps_d = decode_mode(gT, plan.region_b).eps_d;
    const double eps_p = propagation_error(g0, plan.decode_time, plan, spectrum);
    return make_report(eps_e, eps_p, eps_d);
}

ErrorBudgetReport accumulate_error(const ErrorBudgetReport& report, double lambda) {
    if (!(lambda >= 1.0)) throw std::invalid_argument("λ must be at least 1");
    return make_report(report.eps_e * lambda, report.eps_p, report.eps_d, report.eps_i);
}

bool needs_cooling(const ErrorBudgetReport& report, const ProtocolPlan& plan) {
    return report.total() > plan.cooling_threshold;
}

double min_wait_time(const SingleParticleState& g0, int m, double target, const Spectrum& spectrum,
                     const WaitSearchOptions& options) {
    if (!(target > 0.0 && target < 1.0)) throw std::invalid_argument("target must lie in (0, 1)");
    if (!(options.t_min > 0.0) || !(options.growth > 1.0) || !(options.rel_tolerance > 0.0)) {
        throw std::invalid_argument("invalid wait-search options");
    }
    const Autocorrelation overlaps(g0, spectrum);
    const double t_max = options.t_max.value_or(spectrum.size() / 4.0);
    auto bound = [&](double t) { return encoding_error_bound(overlaps, t, m); };

    double best_t = options.t_min, best_bound = bound(options.t_min);
    double prev = 0.0;
    for (int i = 0;; ++i) {
        const double t = options.t_min * std::pow(options.growth, i);
        if (t > t_max) break;
        const double b = bound(t);
        if (b < best_bound) {
            best_bound = b;
            best_t = t;
        }
        if (b <= target) {
            if (i == 0) return t;
            double lo = prev, hi = t;
            while (hi / lo > 1.0 + options.rel_tolerance) {
                const double mid = 0.5 * (lo + hi);
                (bound(mid) <= target ? hi : lo) = mid;
            }
            return hi;
        }
        prev = t;
    }
    throw SearchFailure("encoding bound never reaches " + std::to_string(target) + " for waits up to " +
                            std::to_string(t_max) + "; best " + std::to_string(best_bound) + " at t=" +
                            std::to_string(best_t),
                        best_t, best_bound);
}

double min_wait_time(int n, int m, const PacketBudget& budget, double target, const WaitSearchOptions& options) {
    const Lattice lattice(n);
    const int r = region_size(n, budget.nu);
    if (r > n) throw PlanningError("region larger than the lattice");
    const PacketParams p = default_packet(n, budget, SiteInterval{1, r});
    return min_wait_time(gaussian_packet(p, lattice).state, m, target, Spectrum::ring(n), options);
}

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw FitError("need at least two paired points");
    double c0 = 0.0, c1 = 0.0, cov00 = 0.0, cov01 = 0.0, cov11 = 0.0, ss_res = 0.0;
    const int status = gsl_fit_linear(x.data(), 1, y.data(), 1, x.size(), &c0, &c1, &cov00, &cov01, &cov11, &ss_res);
    if (status != 0 || !std::isfinite(c1)) throw FitError("degenerate abscissae");
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(y.size());
    double ss_tot = 0.0;
    for (double v : y) ss_tot += (v - mean) * (v - mean);
    LinearFit f;
    f.slope = c1;
    f.intercept = c0;
    f.r_squared = ss_tot > 0.0 ? std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0) : (ss_res <= 1e-24 ? 1.0 : 0.0);
    return f;
}

ScalingFit fit_rate_scaling(const std::vector<ScalingSample>& samples) {
    if (samples.size() < 3) throw FitError("scaling fit needs at least three samples");
    std::set<double> distinct;
    std::vector<double> lx, ly;
    for (const auto& s : samples) {
        if (!(s.n > 0.0) || !(s.t_star > 0.0)) throw FitError("scaling samples must be positive");
        distinct.insert(s.n);
        lx.push_back(std::log(s.n));
        ly.push_back(std::log(s.t_star));
    }
    if (distinct.size() != samples.size()) throw FitError("scaling samples need distinct N");
    const LinearFit lf = fit_line(lx, ly);
    ScalingFit fit;
    fit.samples = samples;
    fit.exponent = lf.slope;
    fit.intercept = lf.intercept;
    fit.r_squared = lf.r_squared;
    return fit;
}

}  // namespace qwire
