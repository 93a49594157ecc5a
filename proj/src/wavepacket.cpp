#include "qwire/wavepacket.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <string>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include "qwire/errors.hpp"

namespace qwire {

PacketBudget::PacketBudget(double c_, double kappa_, double nu_) : c(c_), kappa(kappa_), nu(nu_) {
    if (!(c > 0.0) || !(kappa > 0.0) || !(nu > 0.0)) {
        throw std::invalid_argument("packet budget constants must be strictly positive");
    }
}

PacketDefaults sigma_for_budget(int n, const PacketBudget& budget, Direction direction) {
    if (n < 4 || n % 4 != 0) throw std::invalid_argument("N must be a positive multiple of 4, got " + std::to_string(n));
    if (!(budget.c > 0.0) || !(budget.kappa > 0.0)) throw std::invalid_argument("budget constants must be positive");

    const double nd = static_cast<double>(n);
    const double n23 = std::cbrt(nd * nd);
    PacketDefaults d;
    d.sigma_phys = std::sqrt(budget.c / (2.0 * kPi * kPi * budget.kappa * budget.kappa * n23 * n23));
    d.sigma_sites = nd * d.sigma_phys;
    d.width_l0 = std::sqrt(budget.c) / (2.0 * kPi * budget.kappa * n23);
    d.region_sites = static_cast<int>(std::ceil(nd * d.width_l0 - 1e-9));
    d.wavenumber = direction == Direction::IncreasingSite ? 3 * n / 4 : n / 4;
    d.cutoff = budget.kappa * n23;
    return d;
}

PacketParams default_packet(int n, const PacketBudget& budget, const SiteInterval& region, Direction direction) {
    const PacketDefaults d = sigma_for_budget(n, budget, direction);
    PacketParams p;
    p.sigma_sites = d.sigma_sites;
    p.wavenumber = d.wavenumber;
    p.region = region;
    p.center = region.center();
    return p;
}

GaussianPacket gaussian_packet(const PacketParams& params, const Lattice& lattice) {
    const int n = lattice.size();
    if (!(params.sigma_sites > 0.0)) throw std::invalid_argument("packet width must be positive");
    if (params.region.empty() || params.region.first < 1 || params.region.last > n) {
        throw std::invalid_argument("packet region must be a non-empty interval inside 1..N");
    }
    if (params.center < params.region.first || params.center > params.region.last) {
        throw std::invalid_argument("packet centre must lie inside its region");
    }

    ComplexVector amps = ComplexVector::Zero(n);
    const double two_s2 = 2.0 * params.sigma_sites * params.sigma_sites;
    const long long k = ((params.wavenumber % n) + n) % n;
    for (int j = params.region.first; j <= params.region.last; ++j) {
        const double d = j - params.center;
        const long long phase = (k * j) % n;
        amps(j - 1) = std::polar(std::exp(-d * d / two_s2), 2.0 * kPi * static_cast<double>(phase) / n);
    }
    const double nrm = amps.norm();
    if (!(nrm > 0.0)) throw std::invalid_argument("packet envelope underflows on its region");

    GaussianPacket out;
    out.gamma = 1.0 / nrm;
    out.state = SingleParticleState(amps * out.gamma);
    out.single_site = params.region.size() == 1;
    return out;
}

Complex overlap(const SingleParticleState& a, const SingleParticleState& b) {
    if (a.size() != b.size()) throw std::invalid_argument("overlap of states with different lengths");
    return a.amplitudes().dot(b.amplitudes());  // Eigen's dot conjugates the left operand
}

double region_weight(const SingleParticleState& state, const SiteInterval& region) {
    double w = 0.0;
    const int first = std::max(region.first, 1);
    const int last = std::min(region.last, state.size());
    for (int j = first; j <= last; ++j) w += std::norm(state(j));
    return w;
}

double centroid_angle(const SingleParticleState& state) {
    const int n = state.size();
    Complex z = 0.0;
    for (int j = 1; j <= n; ++j) z += std::norm(state(j)) * std::polar(1.0, 2.0 * kPi * j / n);
    return std::arg(z);
}

double centroid_position(const SingleParticleState& state) {
    double x = centroid_angle(state) / (2.0 * kPi);
    if (x < 0.0) x += 1.0;
    return x;
}

double measured_width(const SingleParticleState& state) {
    const int n = state.size();
    const double total = state.amplitudes().squaredNorm();
    if (!(total > 0.0)) throw std::invalid_argument("width of the zero state");
    const double x0 = centroid_angle(state) / (2.0 * kPi);
    double var = 0.0;
    for (int j = 1; j <= n; ++j) {
        const double d = std::remainder(static_cast<double>(j) / n - x0, 1.0);
        var += std::norm(state(j)) * d * d;
    }
    return std::sqrt(var / total);
}

double broadening_prediction(double l0, double t, double omega3) {
    if (!(l0 > 0.0)) throw std::invalid_argument("initial width must be positive");
    const double a = omega3 * t / (std::sqrt(2.0) * l0 * l0 * l0);
    return std::sqrt(1.0 + 0.5 * a * a);
}

double dispersion_third_derivative(int n) {
    const double q = 2.0 * kPi / n;
    return 2.0 * q * q * q;
}

double dispersion_third_derivative_physical(int n) {
    const double nd = static_cast<double>(n);
    return 2.0 / (nd * nd * nd);
}

double rms_broadening_factor(double l0, double t, double omega3) {
    if (!(l0 > 0.0)) throw std::invalid_argument("initial width must be positive");
    const double l3 = l0 * l0 * l0;
    const double a = omega3 * t;
    return std::sqrt(1.0 + a * a / (32.0 * l3 * l3));
}

double overlap_decay_estimate(double x1, const PacketBudget& budget) {
    return std::exp(-kPi * kPi * budget.kappa * budget.kappa * x1 * x1 / (2.0 * budget.c));
}

namespace {

struct AiryIntegrand {
    double sigma2;  // 4π²σ²
    double linear;  // 4πt/N
    double cubic;   // (2/3!)(2π/N)³ t
    bool imaginary;
};

double airy_integrand(double k, void* raw) {
    const auto* p = static_cast<const AiryIntegrand*>(raw);
    const double env = std::exp(-p->sigma2 * k * k);
    const double phase = p->linear * k - p->cubic * k * k * k;
    return env * (p->imaginary ? std::sin(phase) : std::cos(phase));
}

void disable_gsl_abort() {
    static std::once_flag once;
    std::call_once(once, [] { gsl_set_error_handler_off(); });
}

}  // namespace

Complex fourier_airy_overlap(const PacketBudget& budget, int n, double t, bool include_cubic) {
    disable_gsl_abort();
    const PacketDefaults d = sigma_for_budget(n, budget);
    const double sigma = d.sigma_phys;
    const double q = 2.0 * kPi / n;
    AiryIntegrand params{4.0 * kPi * kPi * sigma * sigma, 4.0 * kPi * t / n,
                         include_cubic ? (2.0 / 6.0) * q * q * q * t : 0.0, false};
    const double k_max = 6.0 / (2.0 * kPi * sigma);

    constexpr std::size_t kLimit = 2000;
    gsl_integration_workspace* ws = gsl_integration_workspace_alloc(kLimit);
    auto integrate = [&](bool imaginary) {
        params.imaginary = imaginary;
        gsl_function f{&airy_integrand, &params};
        double result = 0.0, err = 0.0;
        const int status =
            gsl_integration_qag(&f, -k_max, k_max, 1e-10, 0.0, kLimit, GSL_INTEG_GAUSS61, ws, &result, &err);
        if (status != GSL_SUCCESS) {
            gsl_integration_workspace_free(ws);
            throw NumericalError(std::string("Fourier-Airy quadrature failed: ") + gsl_strerror(status) +
                                 " (t=" + std::to_string(t) + ", N=" + std::to_string(n) + ")");
        }
        return result;
    };
    const double re = integrate(false);
    const double im = integrate(true);
    gsl_integration_workspace_free(ws);
    return 2.0 * sigma * std::sqrt(kPi) * Complex(re, im);
}

int mode_distance(int k, int k0, int n) {
    int d = ((k - k0) % n + n) % n;
    return std::min(d, n - d);
}

double spectral_leakage(const SingleParticleState& state, const Spectrum& spectrum, int k0, double cutoff) {
    const ComplexVector modes = spectrum.to_modes(state.amplitudes());
    const int n = spectrum.size();
    double leak = 0.0;
    for (int k = 1; k <= n; ++k) {
        if (mode_distance(k, k0, n) > cutoff) leak += std::norm(modes(k - 1));
    }
    return leak;
}

}  // namespace qwire
