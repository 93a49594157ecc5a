#include "qwire/fock.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

#include "qwire/errors.hpp"
#include "qwire/wavepacket.hpp"

namespace qwire {

namespace {

constexpr double kGateTolerance = 1e-10;

int count_below(std::uint32_t occ, int site) {
    const std::uint32_t mask = (std::uint32_t{1} << (site - 1)) - 1u;
    return std::popcount(occ & mask);
}

SparseOp identity(int d) {
    SparseOp id(d, d);
    id.setIdentity();
    return id;
}

// Real and imaginary parts through a real sparse matrix.
Eigen::MatrixXcd apply_real(const Eigen::SparseMatrix<double>& h, const Eigen::MatrixXcd& x) {
    const Eigen::MatrixXd re = h * x.real();
    const Eigen::MatrixXd im = h * x.imag();
    Eigen::MatrixXcd out(re.rows(), re.cols());
    out.real() = re;
    out.imag() = im;
    return out;
}

void check_norm(double before, const FockVector& state, const std::string& what) {
    const double after = state.norm();
    if (std::abs(after - before) > kGateTolerance) {
        throw TruncationError(what + " lost " + std::to_string(before - after) +
                              " of norm to the truncated sector; raise m_max");
    }
}

Eigen::SparseMatrix<double> hopping_part(const Lattice& lattice, const FockBasis& basis) {
    std::vector<Eigen::Triplet<double>> entries;
    for (int x = 0; x < basis.dimension(); ++x) {
        const std::uint32_t occ = basis.occupation(x);
        for (auto [p, q] : lattice.bonds()) {
            for (auto [to, from] : {std::pair{p, q}, std::pair{q, p}}) {
                const std::uint32_t bf = std::uint32_t{1} << (from - 1);
                const std::uint32_t bt = std::uint32_t{1} << (to - 1);
                if (!(occ & bf) || (occ & bt)) continue;
                const std::uint32_t mid = occ ^ bf;
                const int parity = count_below(occ, from) + count_below(mid, to);
                const int y = basis.index_of(mid | bt);
                entries.emplace_back(y, x, parity % 2 ? -1.0 : 1.0);
            }
        }
    }
    Eigen::SparseMatrix<double> h(basis.dimension(), basis.dimension());
    h.setFromTriplets(entries.begin(), entries.end());
    return h;
}

Eigen::SparseMatrix<double> density_part(const Lattice& lattice, const FockBasis& basis) {
    std::vector<Eigen::Triplet<double>> entries;
    for (int x = 0; x < basis.dimension(); ++x) {
        const std::uint32_t occ = basis.occupation(x);
        double v = 0.0;
        for (auto [p, q] : lattice.bonds()) {
            if ((occ >> (p - 1) & 1u) && (occ >> (q - 1) & 1u)) v += 1.0;
        }
        if (v != 0.0) entries.emplace_back(x, x, v);
    }
    Eigen::SparseMatrix<double> h(basis.dimension(), basis.dimension());
    h.setFromTriplets(entries.begin(), entries.end());
    return h;
}

void check_plan_fits(const ProtocolPlan& plan, const FockBasis& basis, std::size_t messages) {
    if (static_cast<int>(messages) != plan.m_signals) {
        throw std::invalid_argument("expected " + std::to_string(plan.m_signals) + " messages, got " +
                                    std::to_string(messages));
    }
    if (basis.n_sites() != plan.n) throw std::invalid_argument("basis and plan disagree on N");
    if (plan.m_signals > basis.max_particles()) {
        throw std::invalid_argument("M=" + std::to_string(plan.m_signals) + " exceeds m_max=" +
                                    std::to_string(basis.max_particles()));
    }
}

FockVector initial_state(const std::vector<Qubit>& messages, const FockBasis& basis) {
    std::vector<Qubit> regs = messages;
    regs.resize(2 * messages.size(), Qubit(1.0, 0.0));
    return FockVector::vacuum_product(basis, regs);
}

void gate(const ModeSwap& u, FockVector& state, const std::string& name) {
    const double before = state.norm();
    u.apply(state);
    check_norm(before, state, name);
}

}  // namespace

// ---------------------------------------------------------------- basis

FockBasis::FockBasis(int n_sites, int m_max) : n_(n_sites), m_max_(m_max) {
    if (n_sites < 1 || n_sites > 24) throw std::invalid_argument("Fock basis supports 1..24 sites");
    if (m_max < 0 || m_max > n_sites) throw std::invalid_argument("m_max must lie in 0..N");

    const std::uint32_t count = std::uint32_t{1} << n_sites;
    for (std::uint32_t occ = 0; occ < count; ++occ) {
        if (std::popcount(occ) <= m_max) states_.push_back(occ);
    }
    // Lexicographic on (n_1..n_N) means site 1 is the most significant digit.
    auto lex_key = [n_sites](std::uint32_t occ) {
        std::uint32_t key = 0;
        for (int j = 0; j < n_sites; ++j) key = (key << 1) | ((occ >> j) & 1u);
        return key;
    };
    std::sort(states_.begin(), states_.end(), [&](std::uint32_t a, std::uint32_t b) {
        const int pa = std::popcount(a), pb = std::popcount(b);
        return pa != pb ? pa < pb : lex_key(a) < lex_key(b);
    });

    lookup_.assign(count, -1);
    sector_begin_.assign(m_max + 2, dimension());
    for (int i = dimension() - 1; i >= 0; --i) {
        lookup_[states_[i]] = i;
        sector_begin_[std::popcount(states_[i])] = i;
    }
}

int FockBasis::index_of(std::uint32_t occupation) const {
    if (occupation >= lookup_.size()) return -1;
    return lookup_[occupation];
}

int FockBasis::particles(int index) const { return std::popcount(occupation(index)); }

std::pair<int, int> FockBasis::sector(int p) const {
    if (p < 0 || p > m_max_) throw std::out_of_range("sector outside the truncation");
    return {sector_begin_[p], sector_begin_[p + 1]};
}

std::string FockBasis::label(int index) const {
    const std::uint32_t occ = occupation(index);
    std::string s(n_, '0');
    for (int j = 0; j < n_; ++j) {
        if (occ >> j & 1u) s[j] = '1';
    }
    return s;
}

// ---------------------------------------------------------------- operators

SparseOp site_annihilator(const FockBasis& basis, int site) {
    if (site < 1 || site > basis.n_sites()) throw std::out_of_range("site outside lattice");
    const std::uint32_t bit = std::uint32_t{1} << (site - 1);
    std::vector<Eigen::Triplet<Complex>> entries;
    for (int x = 0; x < basis.dimension(); ++x) {
        const std::uint32_t occ = basis.occupation(x);
        if (!(occ & bit)) continue;
        const double sign = count_below(occ, site) % 2 ? -1.0 : 1.0;
        entries.emplace_back(basis.index_of(occ ^ bit), x, sign);
    }
    SparseOp a(basis.dimension(), basis.dimension());
    a.setFromTriplets(entries.begin(), entries.end());
    return a;
}

SparseOp mode_annihilator(const ComplexVector& coeffs, const FockBasis& basis) {
    if (coeffs.size() != basis.n_sites()) {
        throw std::invalid_argument("mode has " + std::to_string(coeffs.size()) + " coefficients for " +
                                    std::to_string(basis.n_sites()) + " sites");
    }
    SparseOp out(basis.dimension(), basis.dimension());
    for (int j = 1; j <= basis.n_sites(); ++j) {
        if (coeffs(j - 1) != Complex(0.0)) out += coeffs(j - 1) * site_annihilator(basis, j);
    }
    out.prune(Complex(0.0));
    return out;
}

SparseOp annihilator_for(const SingleParticleState& f, const FockBasis& basis) {
    return mode_annihilator(f.amplitudes().conjugate(), basis);
}

// ---------------------------------------------------------------- states

FockVector::FockVector(int dimension, int registers) : registers_(registers) {
    if (registers < 0 || registers > 20) throw std::invalid_argument("register count out of range");
    amps_ = Eigen::MatrixXcd::Zero(dimension, Eigen::Index{1} << registers);
}

FockVector FockVector::vacuum_product(const FockBasis& basis, const std::vector<Qubit>& registers) {
    FockVector v(basis.dimension(), static_cast<int>(registers.size()));
    for (Eigen::Index c = 0; c < v.amps_.cols(); ++c) {
        Complex amp = 1.0;
        for (std::size_t r = 0; r < registers.size(); ++r) amp *= registers[r]((c >> r) & 1);
        v.amps_(0, c) = amp;
    }
    return v;
}

FockVector fermion_product(const std::vector<SingleParticleState>& modes, const FockBasis& basis) {
    if (static_cast<int>(modes.size()) > basis.max_particles()) {
        throw std::invalid_argument("more fermions than the truncation holds");
    }
    ComplexVector v = ComplexVector::Zero(basis.dimension());
    v(0) = 1.0;
    for (const auto& m : modes) v = SparseOp(annihilator_for(m, basis).adjoint()) * v;
    const double nrm = v.norm();
    if (!(nrm > 1e-12)) throw std::invalid_argument("modes are linearly dependent");
    FockVector out(basis.dimension(), 0);
    out.amplitudes().col(0) = v / nrm;
    return out;
}

// ---------------------------------------------------------------- gates

ModeSwap::ModeSwap(int target_register, const SingleParticleState& mode, const FockBasis& basis)
    : target_(target_register) {
    if (target_register < 0) throw std::invalid_argument("register index must be non-negative");
    f_ = annihilator_for(mode, basis);
    fdag_ = f_.adjoint();
    const SparseOp id = identity(basis.dimension());
    one_minus_fdag_f_ = id - SparseOp(fdag_ * f_);
    one_minus_f_fdag_ = id - SparseOp(f_ * fdag_);
    const double defect = unitarity_defect(basis);
    if (defect > kGateTolerance) {
        throw NumericalError("swap gate on register " + std::to_string(target_register) +
                             " is not unitary (defect " + std::to_string(defect) + "); is the mode normalised?");
    }
}

SparseOp ModeSwap::matrix() const {
    const Eigen::Index d = f_.rows();
    std::vector<Eigen::Triplet<Complex>> entries;
    auto add = [&](const SparseOp& block, Eigen::Index row0, Eigen::Index col0) {
        for (int k = 0; k < block.outerSize(); ++k) {
            for (SparseOp::InnerIterator it(block, k); it; ++it) {
                entries.emplace_back(row0 + it.row(), col0 + it.col(), it.value());
            }
        }
    };
    add(one_minus_fdag_f_, 0, 0);
    add(fdag_, 0, d);
    add(f_, d, 0);
    add(one_minus_f_fdag_, d, d);
    SparseOp u(2 * d, 2 * d);
    u.setFromTriplets(entries.begin(), entries.end());
    return u;
}

double ModeSwap::unitarity_defect(const FockBasis& basis) const {
    const int d = basis.dimension();
    std::vector<Eigen::Triplet<Complex>> sel;
    int cols = 0;
    for (int a = 0; a <= 1; ++a) {
        for (int i = 0; i < d; ++i) {
            if (a + basis.particles(i) <= basis.max_particles()) sel.emplace_back(a * d + i, cols++, 1.0);
        }
    }
    SparseOp p(2 * d, cols);
    p.setFromTriplets(sel.begin(), sel.end());
    const SparseOp w = matrix() * p;
    SparseOp gram = w.adjoint() * w;
    gram -= identity(cols);
    double worst = 0.0;
    for (int k = 0; k < gram.outerSize(); ++k) {
        for (SparseOp::InnerIterator it(gram, k); it; ++it) worst = std::max(worst, std::abs(it.value()));
    }
    return worst;
}

void ModeSwap::apply(FockVector& state) const {
    if (target_ >= state.registers()) throw std::invalid_argument("gate targets a missing register");
    if (state.amplitudes().rows() != f_.rows()) throw std::invalid_argument("state and gate bases differ");
    Eigen::MatrixXcd& amps = state.amplitudes();
    const Eigen::Index half = amps.cols() / 2;
    const Eigen::Index bit = Eigen::Index{1} << target_;
    Eigen::MatrixXcd x0(amps.rows(), half), x1(amps.rows(), half);
    std::vector<Eigen::Index> zero_cols;
    zero_cols.reserve(half);
    for (Eigen::Index c = 0; c < amps.cols(); ++c) {
        if (!(c & bit)) zero_cols.push_back(c);
    }
    for (Eigen::Index i = 0; i < half; ++i) {
        x0.col(i) = amps.col(zero_cols[i]);
        x1.col(i) = amps.col(zero_cols[i] | bit);
    }
    const Eigen::MatrixXcd y0 = one_minus_fdag_f_ * x0 + fdag_ * x1;
    const Eigen::MatrixXcd y1 = f_ * x0 + one_minus_f_fdag_ * x1;
    for (Eigen::Index i = 0; i < half; ++i) {
        amps.col(zero_cols[i]) = y0.col(i);
        amps.col(zero_cols[i] | bit) = y1.col(i);
    }
}

ModeSwap build_encoder(int alpha, const SingleParticleState& g, const FockBasis& basis, int m_signals) {
    if (alpha < 1 || alpha > m_signals) throw std::out_of_range("encoder index outside 1..M");
    if (!g.is_normalized()) throw std::invalid_argument("encoding mode must be normalised");
    return ModeSwap(alpha - 1, g, basis);
}

ModeSwap build_decoder(int beta, const SingleParticleState& h, const FockBasis& basis, int m_signals) {
    if (beta < 1 || beta > m_signals) throw std::out_of_range("decoder index outside 1..M");
    if (!h.is_normalized()) throw std::invalid_argument("decoding mode must be normalised");
    return ModeSwap(m_signals + beta - 1, h, basis);
}

// ---------------------------------------------------------------- dynamics

ManyBodyHamiltonian ManyBodyHamiltonian::tight_binding(const Lattice& lattice, const FockBasis& basis) {
    if (lattice.size() != basis.n_sites()) throw std::invalid_argument("lattice and basis disagree on N");
    ManyBodyHamiltonian h;
    h.kind_ = HamiltonianKind::TightBinding;
    h.h_ = hopping_part(lattice, basis);
    return h;
}

ManyBodyHamiltonian ManyBodyHamiltonian::t_j(const Lattice& lattice, const FockBasis& basis, double t_hop,
                                             double j_coupling) {
    if (lattice.size() != basis.n_sites()) throw std::invalid_argument("lattice and basis disagree on N");
    ManyBodyHamiltonian h;
    h.kind_ = HamiltonianKind::TJ;
    h.h_ = t_hop * hopping_part(lattice, basis) + j_coupling * density_part(lattice, basis);
    return h;
}

ManyBodyHamiltonian ManyBodyHamiltonian::interaction(const Lattice& lattice, const FockBasis& basis) {
    if (lattice.size() != basis.n_sites()) throw std::invalid_argument("lattice and basis disagree on N");
    ManyBodyHamiltonian h;
    h.kind_ = HamiltonianKind::Interaction;
    h.h_ = density_part(lattice, basis);
    return h;
}

FockVector ManyBodyHamiltonian::apply(const FockVector& state) const {
    FockVector out(static_cast<int>(state.amplitudes().rows()), state.registers());
    out.amplitudes() = apply_real(h_, state.amplitudes());
    return out;
}

SectorPropagator::SectorPropagator(const ManyBodyHamiltonian& h, const FockBasis& basis) {
    const auto& m = h.matrix();
    if (m.rows() != basis.dimension()) throw std::invalid_argument("Hamiltonian and basis sizes differ");
    for (int k = 0; k < m.outerSize(); ++k) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it) {
            if (basis.particles(static_cast<int>(it.row())) != basis.particles(static_cast<int>(it.col()))) {
                throw std::invalid_argument("Hamiltonian does not conserve particle number");
            }
        }
    }
    const Eigen::MatrixXd dense = Eigen::MatrixXd(m);
    for (int p = 0; p <= basis.max_particles(); ++p) {
        const auto [begin, end] = basis.sector(p);
        if (end <= begin) continue;
        const Eigen::MatrixXd block = dense.block(begin, begin, end - begin, end - begin);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(block);
        if (solver.info() != Eigen::Success) {
            throw NumericalError("eigensolver failed on the " + std::to_string(p) + "-particle sector");
        }
        blocks_.push_back({begin, solver.eigenvectors(), solver.eigenvalues()});
    }
}

FockVector SectorPropagator::evolve(const FockVector& state, double t) const {
    FockVector out = state;
    if (t == 0.0) return out;
    Eigen::MatrixXcd& amps = out.amplitudes();
    for (const auto& b : blocks_) {
        const Eigen::Index size = b.vectors.rows();
        const Eigen::MatrixXcd v = b.vectors.cast<Complex>();
        Eigen::MatrixXcd coeffs = v.transpose() * amps.middleRows(b.begin, size);
        for (Eigen::Index k = 0; k < size; ++k) coeffs.row(k) *= std::polar(1.0, -b.energies(k) * t);
        amps.middleRows(b.begin, size) = v * coeffs;
    }
    return out;
}

// ---------------------------------------------------------------- protocol

FockVector run_encoding(const std::vector<Qubit>& messages, const ProtocolPlan& plan, const FockBasis& basis) {
    check_plan_fits(plan, basis, messages.size());
    const Lattice lattice(plan.n);
    const SingleParticleState g0 = gaussian_packet(plan.packet, lattice).state;
    const SectorPropagator prop(ManyBodyHamiltonian::tight_binding(lattice, basis), basis);

    FockVector state = initial_state(messages, basis);
    for (int alpha = 1; alpha <= plan.m_signals; ++alpha) {
        if (alpha > 1) state = prop.evolve(state, plan.wait);
        gate(build_encoder(alpha, g0, basis, plan.m_signals), state, "encoder " + std::to_string(alpha));
    }
    return state;
}

FockVector run_protocol(const std::vector<Qubit>& messages, const ProtocolPlan& plan, const FockBasis& basis,
                        const OracleRunOptions& options) {
    check_plan_fits(plan, basis, messages.size());
    const int m = plan.m_signals;
    const Lattice lattice(plan.n);
    const SingleParticleState g0 = gaussian_packet(plan.packet, lattice).state;
    const SectorPropagator prop(ManyBodyHamiltonian::tight_binding(lattice, basis), basis);

    struct Event {
        double time;
        int kind;  // 0 encode, 1 decode
        int index;
    };
    std::vector<Event> events;
    for (int a = 1; a <= m; ++a) events.push_back({(a - 1) * plan.wait, 0, a});
    std::optional<SingleParticleState> h;
    if (options.decode) {
        h = options.decode_mode;
        if (!h) h = decode_mode(propagate(g0, plan.decode_time, Spectrum::ring(plan.n)), plan.region_b).h;
        for (int b = 1; b <= m; ++b) events.push_back({(b - 1) * plan.wait + plan.decode_time, 1, b});
    }
    std::stable_sort(events.begin(), events.end(), [](const Event& x, const Event& y) {
        return x.time != y.time ? x.time < y.time : x.kind < y.kind;
    });

    FockVector state = initial_state(messages, basis);
    double now = 0.0;
    for (const Event& e : events) {
        if (e.time > now) {
            state = prop.evolve(state, e.time - now);
            now = e.time;
        }
        if (e.kind == 0) {
            gate(build_encoder(e.index, g0, basis, m), state, "encoder " + std::to_string(e.index));
        } else {
            gate(build_decoder(e.index, *h, basis, m), state, "decoder " + std::to_string(e.index));
        }
    }
    return state;
}

QubitState reduced_qubit(const FockVector& state, int register_index) {
    if (register_index < 0 || register_index >= state.registers()) {
        throw std::out_of_range("register " + std::to_string(register_index) + " not present");
    }
    const Eigen::MatrixXcd& amps = state.amplitudes();
    const Eigen::Index bit = Eigen::Index{1} << register_index;
    QubitState q;
    for (Eigen::Index c = 0; c < amps.cols(); ++c) {
        if (c & bit) continue;
        const auto v0 = amps.col(c);
        const auto v1 = amps.col(c | bit);
        q.rho(0, 0) += v0.squaredNorm();
        q.rho(1, 1) += v1.squaredNorm();
        q.rho(0, 1) += v1.dot(v0);  // Σ ψ(i,0) conj(ψ(i,1))
    }
    q.rho(1, 0) = std::conj(q.rho(0, 1));
    return q;
}

Qubit axis_state(AxisState s) {
    const double r = 1.0 / std::sqrt(2.0);
    const Complex i(0.0, 1.0);
    switch (s) {
        case AxisState::PlusX: return Qubit(r, r);
        case AxisState::MinusX: return Qubit(r, -r);
        case AxisState::PlusY: return Qubit(r, r * i);
        case AxisState::MinusY: return Qubit(r, -r * i);
        case AxisState::PlusZ: return Qubit(1.0, 0.0);
        case AxisState::MinusZ: return Qubit(0.0, 1.0);
    }
    throw std::invalid_argument("unknown axis state");
}

std::string axis_name(AxisState s) {
    switch (s) {
        case AxisState::PlusX: return "+x";
        case AxisState::MinusX: return "-x";
        case AxisState::PlusY: return "+y";
        case AxisState::MinusY: return "-y";
        case AxisState::PlusZ: return "+z";
        case AxisState::MinusZ: return "-z";
    }
    return "?";
}

double average_fidelity(const std::map<AxisState, QubitState>& outputs) {
    double sum = 0.0;
    for (AxisState s : kAxisStates) {
        const auto it = outputs.find(s);
        if (it == outputs.end()) throw std::invalid_argument("missing channel output for " + axis_name(s));
        sum += it->second.fidelity(axis_state(s));
    }
    return sum / 6.0;
}

double design_fidelity(const QubitChannel& channel) {
    std::map<AxisState, QubitState> out;
    for (AxisState s : kAxisStates) out[s] = QubitState{channel(axis_state(s))};
    return average_fidelity(out);
}

MonteCarloEstimate haar_fidelity(const QubitChannel& channel, int samples, std::uint64_t seed) {
    if (samples < 2) throw std::invalid_argument("Monte Carlo needs at least two samples");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < samples; ++i) {
        Qubit psi(Complex(normal(rng), normal(rng)), Complex(normal(rng), normal(rng)));
        psi.normalize();
        const double f = QubitState{channel(psi)}.fidelity(psi);
        sum += f;
        sum_sq += f * f;
    }
    MonteCarloEstimate est;
    est.mean = sum / samples;
    const double var = std::max(0.0, (sum_sq - samples * est.mean * est.mean) / (samples - 1));
    est.std_error = std::sqrt(var / samples);
    return est;
}

std::vector<double> protocol_fidelities(const ProtocolPlan& plan, const FockBasis& basis,
                                        const OracleRunOptions& options, const std::optional<Qubit>& background) {
    const int m = plan.m_signals;
    std::vector<std::map<AxisState, QubitState>> outputs(m);
    if (!background) {
        for (AxisState s : kAxisStates) {
            const FockVector out = run_protocol(std::vector<Qubit>(m, axis_state(s)), plan, basis, options);
            for (int a = 0; a < m; ++a) outputs[a][s] = reduced_qubit(out, m + a);
        }
    } else {
        for (int a = 0; a < m; ++a) {
            for (AxisState s : kAxisStates) {
                std::vector<Qubit> msgs(m, *background);
                msgs[a] = axis_state(s);
                outputs[a][s] = reduced_qubit(run_protocol(msgs, plan, basis, options), m + a);
            }
        }
    }
    std::vector<double> f(m);
    for (int a = 0; a < m; ++a) f[a] = average_fidelity(outputs[a]);
    return f;
}

QubitChannel protocol_channel(int alpha, const std::vector<Qubit>& others, const ProtocolPlan& plan,
                              const FockBasis& basis, const OracleRunOptions& options) {
    const int m = plan.m_signals;
    if (alpha < 1 || alpha > m) throw std::out_of_range("signal index outside 1..M");
    std::vector<Qubit> msgs = others;
    if (static_cast<int>(msgs.size()) != m) throw std::invalid_argument("need one message slot per signal");
    msgs[alpha - 1] = Qubit(1.0, 0.0);
    const FockVector phi0 = run_protocol(msgs, plan, basis, options);
    msgs[alpha - 1] = Qubit(0.0, 1.0);
    const FockVector phi1 = run_protocol(msgs, plan, basis, options);
    const int reg = m + alpha - 1;
    return [phi0, phi1, reg](const Qubit& psi) {
        FockVector mix = phi0;
        mix.amplitudes() = psi(0) * phi0.amplitudes() + psi(1) * phi1.amplitudes();
        return reduced_qubit(mix, reg).rho;
    };
}

double gamma_norm(const FockVector& actual, const std::vector<Qubit>& messages, const SingleParticleState& g0,
                  double wait, const FockBasis& basis) {
    const int m = static_cast<int>(messages.size());
    if (m > basis.max_particles()) throw std::invalid_argument("truncation too small for the ideal state");
    if (actual.amplitudes().rows() != basis.dimension()) throw std::invalid_argument("state and basis differ");
    const Spectrum spectrum = Spectrum::ring(basis.n_sites());
    ComplexVector ideal = ComplexVector::Zero(basis.dimension());
    ideal(0) = 1.0;
    for (int a = 1; a <= m; ++a) {
        const SingleParticleState mode = propagate(g0, (m - a) * wait, spectrum);
        const SparseOp create = annihilator_for(mode, basis).adjoint();
        ideal = messages[a - 1](0) * ideal + messages[a - 1](1) * (create * ideal);
    }
    Eigen::MatrixXcd diff = actual.amplitudes();
    diff.col(0) -= ideal;
    return diff.norm();
}

double tj_interaction_error(const FockVector& state, const Lattice& lattice, const FockBasis& basis) {
    return ManyBodyHamiltonian::interaction(lattice, basis).apply(state).norm();
}

EvolutionDifference evolution_difference(const FockVector& state, double s, double t_hop, double j_coupling,
                                         const Lattice& lattice, const FockBasis& basis) {
    const ManyBodyHamiltonian h0 = ManyBodyHamiltonian::tight_binding(lattice, basis);
    const ManyBodyHamiltonian h1 = ManyBodyHamiltonian::t_j(lattice, basis, t_hop, j_coupling);
    const SectorPropagator p0(h0, basis), p1(h1, basis);

    EvolutionDifference r;
    r.difference = (p1.evolve(state, s).amplitudes() - p0.evolve(state, s).amplitudes()).norm();
    r.eps_i = tj_interaction_error(state, lattice, basis);
    r.first_order_bound = std::abs(s) * std::abs(j_coupling) * r.eps_i;

    // Composite Simpson on the Duhamel integrand; smooth in u.
    const Eigen::SparseMatrix<double> perturbation = h1.matrix() - h0.matrix();
    constexpr int kPanels = 256;
    const double hstep = s / kPanels;
    double integral = 0.0;
    for (int i = 0; i <= kPanels; ++i) {
        const double w = (i == 0 || i == kPanels) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        integral += w * apply_real(perturbation, p0.evolve(state, i * hstep).amplitudes()).norm();
    }
    r.duhamel_bound = std::abs(hstep) / 3.0 * integral;
    r.satisfied = r.difference <= r.first_order_bound + 1e-6;
    return r;
}

}  // namespace qwire
