#include "qwire/experiments.hpp"

#include <chrono>
#include <cmath>
#include <future>
#include <random>
#include <stdexcept>

#include "qwire/errors.hpp"
#include "qwire/lattice.hpp"
#include "qwire/wavepacket.hpp"

namespace qwire {

namespace {

using Row = std::vector<Cell>;

PacketBudget budget_of(const RunConfig& cfg) { return PacketBudget(cfg.real("c"), cfg.real("kappa"), cfg.real("nu")); }

std::vector<int> sizes_of(const RunConfig& cfg) {
    std::vector<int> out;
    for (double n : cfg.list("N_list")) {
        if (n != std::floor(n) || n < 4) throw ConfigError("N_list", "sizes must be integers ≥ 4");
        out.push_back(static_cast<int>(n));
    }
    return out;
}

PlanOptions plan_options(const RunConfig& cfg) {
    PlanOptions o;
    if (cfg.has("k")) o.wavenumber = static_cast<int>(cfg.integer("k"));
    if (cfg.has("t")) o.wait = cfg.real("t");
    if (cfg.has("sigma")) o.sigma_sites = cfg.real("sigma");
    if (cfg.has("region")) o.region_sites = static_cast<int>(cfg.integer("region"));
    return o;
}

// Default packet for N in the region {1..⌈νN^{1/3}⌉}.
GaussianPacket budget_packet(int n, const PacketBudget& budget) {
    const int r = region_size(n, budget.nu);
    if (r > n) throw PlanningError("region of " + std::to_string(r) + " sites exceeds N=" + std::to_string(n));
    return gaussian_packet(default_packet(n, budget, SiteInterval{1, r}), Lattice(n));
}

// Weight of the untruncated discrete Gaussian that falls outside the region.
double truncation_loss(const PacketParams& p) {
    const int reach = static_cast<int>(std::ceil(40.0 * p.sigma_sites)) + 1;
    double inside = 0.0, total = 0.0;
    for (int j = p.region.first - reach; j <= p.region.last + reach; ++j) {
        const double d = j - p.center;
        const double w = std::exp(-d * d / (p.sigma_sites * p.sigma_sites));
        total += w;
        if (p.region.contains(j)) inside += w;
    }
    return 1.0 - inside / total;
}

ResultTable run_dispersion(const RunConfig& cfg) {
    const int n = static_cast<int>(cfg.integer("N"));
    ResultTable t({"k", "omega", "v", "v_sites"});
    for (int k = 1; k <= n; ++k) {
        t.add_row({Cell{std::int64_t{k}}, dispersion(k, n), group_velocity(k, n), group_velocity_sites(k, n)});
    }
    return t;
}

ResultTable run_packet(const RunConfig& cfg) {
    const int n = static_cast<int>(cfg.integer("N"));
    const PacketBudget budget = budget_of(cfg);
    const PacketDefaults d = sigma_for_budget(n, budget);
    const int r = cfg.has("region") ? static_cast<int>(cfg.integer("region")) : region_size(n, budget.nu);
    PacketParams p = default_packet(n, budget, SiteInterval{1, r});
    if (cfg.has("sigma")) p.sigma_sites = cfg.real("sigma");
    if (cfg.has("k")) p.wavenumber = static_cast<int>(cfg.integer("k"));
    const GaussianPacket g = gaussian_packet(p, Lattice(n));

    ResultTable t({"N", "sigma_sites", "sigma_phys", "width_l0", "region_sites", "wavenumber", "gamma",
                   "truncation_loss", "spectral_leakage", "cutoff", "exp_minus_c", "measured_width"});
    t.add_row({Cell{std::int64_t{n}}, p.sigma_sites, p.sigma_sites / n, d.width_l0, Cell{std::int64_t{r}},
               Cell{std::int64_t{p.wavenumber}}, g.gamma, truncation_loss(p),
               spectral_leakage(g.state, Spectrum::ring(n), p.wavenumber, d.cutoff), d.cutoff,
               std::exp(-budget.c), measured_width(g.state)});
    return t;
}

ResultTable run_transit(const RunConfig& cfg) {
    const int n = static_cast<int>(cfg.integer("N"));
    PlanOptions o = plan_options(cfg);
    if (!o.wait) o.wait = 1.0;  // the wait does not enter a single-packet transit
    const ProtocolPlan plan = plan_protocol(n, 1, budget_of(cfg), cfg.real("epsilon"), o);
    const Spectrum spectrum = Spectrum::ring(n);
    const SingleParticleState g0 = gaussian_packet(plan.packet, Lattice(n)).state;
    const double t_end = cfg.has("s") ? cfg.real("s") : plan.decode_time;
    const int steps = static_cast<int>(cfg.integer("steps"));
    const double v = group_velocity(plan.packet.wavenumber, n);
    const double x0 = centroid_position(g0);

    ResultTable t({"t", "centroid_x", "predicted_x", "width", "weight_b", "abs_overlap_initial"});
    for (int i = 0; i <= steps; ++i) {
        const double time = t_end * i / steps;
        const SingleParticleState gt = propagate(g0, time, spectrum);
        double pred = std::fmod(x0 + v * time / (2.0 * kPi), 1.0);
        if (pred < 0) pred += 1.0;
        t.add_row({time, centroid_position(gt), pred, measured_width(gt), region_weight(gt, plan.region_b),
                   std::abs(overlap(g0, gt))});
    }
    t.meta["transit_time_formula"] = transit_time(n);
    t.meta["decode_time"] = plan.decode_time;
    t.meta["region_b_center_x"] = plan.region_b.center() / n;
    return t;
}

ResultTable run_broadening(const RunConfig& cfg) {
    const PacketBudget budget = budget_of(cfg);
    ResultTable t({"N", "t", "l0", "measured_ratio", "predicted_ratio", "rms_ratio"});
    for (int n : sizes_of(cfg)) {
        const GaussianPacket g = budget_packet(n, budget);
        const Spectrum spectrum = Spectrum::ring(n);
        const double l0 = measured_width(g.state);
        const int r = region_size(n, budget.nu);
        const double decode = decode_time(n, 3 * n / 4, {1, r}, {n / 2, n / 2 + r - 1});
        for (double time : {transit_time(n), decode}) {
            const double lt = measured_width(propagate(g.state, time, spectrum));
            t.add_row({Cell{std::int64_t{n}}, time, l0, lt / l0,
                       broadening_prediction(2.0 * kPi * l0, time, dispersion_third_derivative(n)),
                       rms_broadening_factor(l0, time, dispersion_third_derivative_physical(n))});
        }
    }
    return t;
}

ResultTable run_overlap_decay(const RunConfig& cfg) {
    const PacketBudget budget = budget_of(cfg);
    ResultTable t({"N", "x", "t", "u", "abs_overlap", "neg_log_overlap", "fourier_airy", "decay_shape"});
    for (int n : sizes_of(cfg)) {
        const GaussianPacket g = budget_packet(n, budget);
        const Spectrum spectrum = Spectrum::ring(n);
        const double cbrt_n = std::cbrt(static_cast<double>(n));
        for (double x : cfg.list("x_list")) {
            const double time = x * cbrt_n;
            const double o = std::abs(overlap(g.state, propagate(g.state, time, spectrum)));
            t.add_row({Cell{std::int64_t{n}}, x, time, x * x, o, -std::log(o),
                       std::abs(fourier_airy_overlap(budget, n, time)), overlap_decay_estimate(2.0 * x, budget)});
        }
    }
    return t;
}

ResultTable run_error_budget(const RunConfig& cfg) {
    const int n = static_cast<int>(cfg.integer("N"));
    const int m = static_cast<int>(cfg.integer("M"));
    const ProtocolPlan plan = plan_protocol(n, m, budget_of(cfg), cfg.real("epsilon"), plan_options(cfg));
    const ErrorBudgetReport rep = evaluate_error_budget(plan, Spectrum::ring(n));
    const double lambda = cfg.real("lambda");
    const ErrorBudgetReport acc = accumulate_error(rep, lambda);

    ResultTable t({"N", "M", "wait", "decode_time", "eps_e", "eps_p", "eps_d", "fidelity_bound", "clamped",
                   "lambda", "eps_e_accumulated", "fidelity_bound_accumulated", "cooling_threshold",
                   "needs_cooling"});
    t.add_row({Cell{std::int64_t{n}}, Cell{std::int64_t{m}}, plan.wait, plan.decode_time, rep.eps_e, rep.eps_p,
               rep.eps_d, rep.fidelity_bound, Cell{std::int64_t{rep.clamped}}, lambda, acc.eps_e,
               acc.fidelity_bound, plan.cooling_threshold, Cell{std::int64_t{needs_cooling(acc, plan)}}});
    return t;
}

ResultTable run_min_wait(const RunConfig& cfg) {
    const int m = static_cast<int>(cfg.integer("M"));
    const double target = cfg.real("epsilon");
    ResultTable t({"N", "M", "target", "t_star", "bound", "t_star_over_cbrt_n", "status"});
    for (const auto& p : sweep_min_wait(sizes_of(cfg), m, budget_of(cfg), target)) {
        const bool ok = p.error.empty();
        t.add_row({Cell{std::int64_t{p.n}}, Cell{std::int64_t{m}}, target, ok ? p.t_star : NAN, ok ? p.bound : NAN,
                   ok ? p.t_star / std::cbrt(static_cast<double>(p.n)) : NAN, ok ? std::string("ok") : p.error});
    }
    return t;
}

ResultTable run_rate_fit(const RunConfig& cfg) {
    const int m = static_cast<int>(cfg.integer("M"));
    std::vector<ScalingSample> samples;
    std::int64_t failures = 0;
    for (const auto& p : sweep_min_wait(sizes_of(cfg), m, budget_of(cfg), cfg.real("epsilon"))) {
        if (p.error.empty()) {
            samples.push_back({static_cast<double>(p.n), p.t_star});
        } else {
            ++failures;
        }
    }
    ResultTable t({"exponent", "intercept", "r_squared", "samples", "failures", "status"});
    try {
        const ScalingFit fit = fit_rate_scaling(samples);
        t.add_row({fit.exponent, fit.intercept, fit.r_squared, Cell{std::int64_t(samples.size())}, failures,
                   std::string("ok")});
    } catch (const FitError& e) {
        t.add_row({NAN, NAN, NAN, Cell{std::int64_t(samples.size())}, failures, std::string(e.what())});
    }
    return t;
}

ResultTable run_oracle_protocol(const RunConfig& cfg) {
    const int n = static_cast<int>(cfg.integer("N"));
    const int m = static_cast<int>(cfg.integer("M"));
    const double sigma = cfg.has("sigma") ? cfg.real("sigma") : 1.0;
    std::optional<int> region, k;
    if (cfg.has("region")) region = static_cast<int>(cfg.integer("region"));
    if (cfg.has("k")) k = static_cast<int>(cfg.integer("k"));
    // Without an explicit wait the signals go one after another.
    ProtocolPlan plan = oracle_plan(n, m, sigma, 1.0, region, k);
    plan.wait = cfg.has("t") ? cfg.real("t") : plan.decode_time;

    const std::string bg = cfg.text("background");
    std::optional<Qubit> background;
    if (bg == "zero") background = Qubit(1.0, 0.0);
    if (bg == "one") background = Qubit(0.0, 1.0);

    const ErrorBudgetReport rep = evaluate_error_budget(plan, Spectrum::ring(n));
    const FockBasis basis(n, m);
    const std::vector<double> f = protocol_fidelities(plan, basis, {}, background);
    ResultTable t({"alpha", "fidelity", "eps_e", "eps_p", "eps_d", "fidelity_bound", "satisfied"});
    for (int a = 0; a < m; ++a) {
        t.add_row({Cell{std::int64_t{a + 1}}, f[a], rep.eps_e, rep.eps_p, rep.eps_d, rep.fidelity_bound,
                   Cell{std::int64_t{f[a] >= rep.fidelity_bound - 1e-6}}});
    }
    t.meta["wait"] = plan.wait;
    t.meta["decode_time"] = plan.decode_time;
    return t;
}

ResultTable run_oracle_bounds(const RunConfig& cfg) {
    const int n = static_cast<int>(cfg.integer("N"));
    const int m = static_cast<int>(cfg.integer("M"));
    const FockBasis basis(n, m);
    const Spectrum spectrum = Spectrum::ring(n);
    std::optional<int> region, k;
    if (cfg.has("region")) region = static_cast<int>(cfg.integer("region"));
    if (cfg.has("k")) k = static_cast<int>(cfg.integer("k"));

    ResultTable t({"t", "sigma", "gamma_norm", "bound", "satisfied"});
    std::uint64_t point = 0;
    for (double sigma : cfg.list("sigma_list")) {
        for (double wait : cfg.list("t_list")) {
            const ProtocolPlan plan = oracle_plan(n, m, sigma, wait, region, k);
            const SingleParticleState g0 = gaussian_packet(plan.packet, Lattice(n)).state;
            const auto msgs = random_messages(m, static_cast<std::uint64_t>(cfg.seed()) + point++);
            const double gamma = gamma_norm(run_encoding(msgs, plan, basis), msgs, g0, wait, basis);
            const double bound = encoding_error_bound(g0, wait, m, spectrum);
            t.add_row({wait, sigma, gamma, bound, Cell{std::int64_t{gamma <= bound + 1e-8}}});
        }
    }
    return t;
}

ResultTable run_tj_check(const RunConfig& cfg) {
    const int n = static_cast<int>(cfg.integer("N"));
    const double sigma = cfg.has("sigma") ? cfg.real("sigma") : 1.0;
    const FockBasis basis(n, 2);
    const Lattice lattice(n);
    std::vector<double> times = cfg.list("s_list");
    if (cfg.has("s")) times = {cfg.real("s")};

    ResultTable t({"separation", "s", "difference", "eps_i", "first_order_bound", "duhamel_bound", "satisfied"});
    for (double sep : cfg.list("separation_list")) {
        const FockVector psi = two_packet_state(n, static_cast<int>(sep), sigma, basis);
        for (double s : times) {
            const EvolutionDifference d =
                evolution_difference(psi, s, cfg.real("t_hop"), cfg.real("J"), lattice, basis);
            t.add_row({sep, s, d.difference, d.eps_i, d.first_order_bound, d.duhamel_bound,
                       Cell{std::int64_t{d.satisfied}}});
        }
    }
    return t;
}

ResultTable dispatch(const RunConfig& cfg) {
    switch (cfg.experiment) {
        case Experiment::Dispersion: return run_dispersion(cfg);
        case Experiment::Packet: return run_packet(cfg);
        case Experiment::Transit: return run_transit(cfg);
        case Experiment::Broadening: return run_broadening(cfg);
        case Experiment::OverlapDecay: return run_overlap_decay(cfg);
        case Experiment::ErrorBudget: return run_error_budget(cfg);
        case Experiment::MinWaitSweep: return run_min_wait(cfg);
        case Experiment::RateFit: return run_rate_fit(cfg);
        case Experiment::OracleProtocol: return run_oracle_protocol(cfg);
        case Experiment::OracleBounds: return run_oracle_bounds(cfg);
        case Experiment::TJCheck: return run_tj_check(cfg);
    }
    throw std::logic_error("unhandled experiment");
}

}  // namespace

int oracle_wavenumber(int n) { return static_cast<int>(std::lround(3.0 * n / 4.0)); }

int oracle_region(int n) { return (n + 1) / 3; }

ProtocolPlan oracle_plan(int n, int m, double sigma_sites, double wait, std::optional<int> region,
                         std::optional<int> wavenumber) {
    PlanOptions o;
    o.wavenumber = wavenumber.value_or(oracle_wavenumber(n));
    o.region_sites = region.value_or(oracle_region(n));
    o.sigma_sites = sigma_sites;
    o.wait = wait;
    return plan_protocol(n, m, PacketBudget{}, 0.01, o);
}

std::vector<Qubit> random_messages(int m, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::vector<Qubit> out;
    for (int i = 0; i < m; ++i) {
        Qubit q(Complex(normal(rng), normal(rng)), Complex(normal(rng), normal(rng)));
        out.push_back(q.normalized());
    }
    return out;
}

FockVector two_packet_state(int n, int separation, double sigma_sites, const FockBasis& basis) {
    const Lattice lattice(n);
    auto packet = [&](int center) {
        PacketParams p;
        p.sigma_sites = sigma_sites;
        p.center = center;
        p.wavenumber = oracle_wavenumber(n);
        p.region = {std::max(1, center - 2), std::min(n, center + 2)};
        return gaussian_packet(p, lattice).state;
    };
    const int first = 3;
    if (separation < 1 || first + separation > n) {
        throw std::invalid_argument("separation " + std::to_string(separation) + " does not fit on N=" +
                                    std::to_string(n));
    }
    return fermion_product({packet(first), packet(first + separation)}, basis);
}

std::vector<MinWaitPoint> sweep_min_wait(const std::vector<int>& sizes, int m, const PacketBudget& budget,
                                         double target) {
    std::vector<std::future<MinWaitPoint>> jobs;
    for (int n : sizes) {
        jobs.push_back(std::async(std::launch::async, [n, m, budget, target] {
            MinWaitPoint p;
            p.n = n;
            try {
                const GaussianPacket g = budget_packet(n, budget);
                const Spectrum spectrum = Spectrum::ring(n);
                p.t_star = min_wait_time(g.state, m, target, spectrum);
                p.bound = encoding_error_bound(g.state, p.t_star, m, spectrum);
            } catch (const std::exception& e) {
                p.error = e.what();
            }
            return p;
        }));
    }
    std::vector<MinWaitPoint> out;
    for (auto& j : jobs) out.push_back(j.get());
    return out;
}

ResultTable run(const RunConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    const std::string name = experiment_name(config.experiment);
    ResultTable table = [&] {
        try {
            return dispatch(config);
        } catch (const std::exception& e) {
            throw std::runtime_error("experiment " + name + ": " + e.what());
        }
    }();

    nlohmann::ordered_json meta;
    meta["artifact"] = "qwire";
    meta["version"] = kArtifactVersion;
    meta["experiment"] = name;
    meta["seed"] = config.seed();
    nlohmann::ordered_json echo = nlohmann::ordered_json::object();
    for (const auto& [key, value] : config.values) echo[key] = format_value(value);
    meta["config"] = std::move(echo);
    meta["defaults_applied"] = config.defaulted;
    for (auto& [key, value] : table.meta.items()) meta[key] = value;
    table.meta = std::move(meta);
    table.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return table;
}

}  // namespace qwire
