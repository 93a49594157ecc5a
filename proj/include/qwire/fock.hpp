#pragma once

// Exact many-body oracle: truncated occupation-number basis tensored with
// distinguishable ancilla qubits.
//
// Occupations are stored as bitmasks with bit j-1 holding n_j. Operators act
// on the Fock factor only; the ancilla registers index the columns of a
// FockVector. Register r is bit r of the column index, with A_α at r = α-1
// and B_β at r = M+β-1.

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "qwire/lattice.hpp"
#include "qwire/protocol.hpp"

namespace qwire {

using SparseOp = Eigen::SparseMatrix<Complex>;
using Qubit = Eigen::Vector2cd;  // (c, d) for c|0> + d|1>

class FockBasis {
  public:
    /// All occupations of n sites with at most m_max particles, ordered by
    /// particle number and then lexicographically on (n_1, ..., n_N).
    FockBasis(int n_sites, int m_max);

    int n_sites() const { return n_; }
    int max_particles() const { return m_max_; }
    int dimension() const { return static_cast<int>(states_.size()); }

    std::uint32_t occupation(int index) const { return states_.at(index); }
    /// -1 when the occupation lies outside the truncation.
    int index_of(std::uint32_t occupation) const;
    int particles(int index) const;
    /// Half-open index range [begin, end) of the p-particle sector.
    std::pair<int, int> sector(int p) const;
    /// "n_1 n_2 ... n_N" as a 0/1 string.
    std::string label(int index) const;

  private:
    int n_;
    int m_max_;
    std::vector<std::uint32_t> states_;
    std::vector<int> lookup_;
    std::vector<int> sector_begin_;
};

/// a_j with the Jordan-Wigner sign (-1)^{occupied sites left of j}.
SparseOp site_annihilator(const FockBasis& basis, int site);

/// Σ_j c_j a_j, the coefficients taken literally.
SparseOp mode_annihilator(const ComplexVector& coeffs, const FockBasis& basis);

/// Σ_j conj(f_j) a_j, whose adjoint creates the single-particle state f.
SparseOp annihilator_for(const SingleParticleState& f, const FockBasis& basis);

/// Fock amplitudes times ancilla configurations: rows index the basis,
/// columns the 2^registers ancilla bitmasks.
class FockVector {
  public:
    FockVector(int dimension, int registers);

    /// |Ω> with each register in its given state.
    static FockVector vacuum_product(const FockBasis& basis, const std::vector<Qubit>& registers);

    int registers() const { return registers_; }
    Eigen::MatrixXcd& amplitudes() { return amps_; }
    const Eigen::MatrixXcd& amplitudes() const { return amps_; }
    double norm() const { return amps_.norm(); }

  private:
    int registers_;
    Eigen::MatrixXcd amps_;
};

/// The swap gate I - σ⁺σ⁻ff† - σ⁻σ⁺f†f + σ⁺f + σ⁻f† between one register
/// and the fermionic mode f, with σ⁺ = |1><0|.
class ModeSwap {
  public:
    /// Throws NumericalError if the assembled gate is not unitary to 1e-10
    /// on the subspace whose excitation count stays within the truncation.
    ModeSwap(int target_register, const SingleParticleState& mode, const FockBasis& basis);

    int target() const { return target_; }
    const SparseOp& annihilator() const { return f_; }

    /// Gate on one register ⊗ Fock, ancilla-major: index = a·D + i.
    SparseOp matrix() const;

    /// max |(U†U - I)_{xy}| over the excitation-bounded subspace.
    double unitarity_defect(const FockBasis& basis) const;

    void apply(FockVector& state) const;

  private:
    int target_;
    SparseOp f_;
    SparseOp fdag_;
    SparseOp one_minus_fdag_f_;
    SparseOp one_minus_f_fdag_;
};

/// U_α acting on register A_α.
ModeSwap build_encoder(int alpha, const SingleParticleState& g, const FockBasis& basis, int m_signals);

/// V_β acting on register B_β.
ModeSwap build_decoder(int beta, const SingleParticleState& h, const FockBasis& basis, int m_signals);

enum class HamiltonianKind { TightBinding, TJ, Interaction };

/// Particle-conserving Hamiltonian on the truncated basis. Real symmetric.
class ManyBodyHamiltonian {
  public:
    /// Σ_{bonds} (a_i†a_j + a_j†a_i); one-particle block equals Δ.
    static ManyBodyHamiltonian tight_binding(const Lattice& lattice, const FockBasis& basis);
    /// t_hop × hopping + J Σ_{bonds} n_i n_j.
    static ManyBodyHamiltonian t_j(const Lattice& lattice, const FockBasis& basis, double t_hop, double j_coupling);
    /// H_I = Σ_{bonds} n_i n_j.
    static ManyBodyHamiltonian interaction(const Lattice& lattice, const FockBasis& basis);

    HamiltonianKind kind() const { return kind_; }
    const Eigen::SparseMatrix<double>& matrix() const { return h_; }

    FockVector apply(const FockVector& state) const;

  private:
    HamiltonianKind kind_ = HamiltonianKind::TightBinding;
    Eigen::SparseMatrix<double> h_;
};

/// e^{-iHt} from a dense eigendecomposition of each particle-number block.
class SectorPropagator {
  public:
    SectorPropagator(const ManyBodyHamiltonian& h, const FockBasis& basis);

    FockVector evolve(const FockVector& state, double t) const;

  private:
    struct Block {
        int begin = 0;
        Eigen::MatrixXd vectors;
        Eigen::VectorXd energies;
    };
    std::vector<Block> blocks_;
};

struct OracleRunOptions {
    /// Decode into this mode instead of g(T) restricted to R_B.
    std::optional<SingleParticleState> decode_mode;
    bool decode = true;
};

/// U_M e^{-iHt} ... U_1 on |ψ_1>...|ψ_M>|Ω>, registers A then B all
/// starting in the messages and |0>. No decoding.
FockVector run_encoding(const std::vector<Qubit>& messages, const ProtocolPlan& plan, const FockBasis& basis);

/// Full schedule: U_α at (α-1)t, V_β at (β-1)t + T, encodes first on ties,
/// exact free evolution between events. Throws TruncationError if any gate
/// loses more than 1e-10 of norm to the truncation.
FockVector run_protocol(const std::vector<Qubit>& messages, const ProtocolPlan& plan, const FockBasis& basis,
                        const OracleRunOptions& options = {});

struct QubitState {
    Eigen::Matrix2cd rho = Eigen::Matrix2cd::Zero();

    double fidelity(const Qubit& psi) const { return (psi.adjoint() * rho * psi)(0, 0).real(); }
};

/// Partial trace onto one register.
QubitState reduced_qubit(const FockVector& state, int register_index);

enum class AxisState { PlusX, MinusX, PlusY, MinusY, PlusZ, MinusZ };

inline constexpr std::array<AxisState, 6> kAxisStates = {AxisState::PlusX, AxisState::MinusX, AxisState::PlusY,
                                                         AxisState::MinusY, AxisState::PlusZ, AxisState::MinusZ};

Qubit axis_state(AxisState s);
std::string axis_name(AxisState s);

/// (1/6) Σ <ψ_i|ρ_i|ψ_i> over the six axis states; throws
/// std::invalid_argument when any of them is missing.
double average_fidelity(const std::map<AxisState, QubitState>& outputs);

using QubitChannel = std::function<Eigen::Matrix2cd(const Qubit&)>;

double design_fidelity(const QubitChannel& channel);

struct MonteCarloEstimate {
    double mean = 0.0;
    double std_error = 0.0;
};

/// Mean of <ψ|Φ(ψ)|ψ> over Haar-random pure states.
MonteCarloEstimate haar_fidelity(const QubitChannel& channel, int samples, std::uint64_t seed);

/// Average fidelity F_α of every signal, from six full protocol runs per
/// signal. Signals other than α carry `background`, or the same axis state
/// as α when it is unset.
std::vector<double> protocol_fidelities(const ProtocolPlan& plan, const FockBasis& basis,
                                        const OracleRunOptions& options = {},
                                        const std::optional<Qubit>& background = std::nullopt);

/// Channel ψ ↦ ρ_{B_α} of the protocol, other messages fixed. Built from
/// two runs using linearity in the α-th message.
QubitChannel protocol_channel(int alpha, const std::vector<Qubit>& others, const ProtocolPlan& plan,
                              const FockBasis& basis, const OracleRunOptions& options = {});

/// ‖actual - Ψ_M‖ with Ψ_M = |0..0>(c_M + d_M g†(0))...(c_1 + d_1 g†((M-1)t))|Ω>.
double gamma_norm(const FockVector& actual, const std::vector<Qubit>& messages, const SingleParticleState& g0,
                  double wait, const FockBasis& basis);

/// ‖H_I ψ‖ with H_I = Σ_{bonds} n_i n_j.
double tj_interaction_error(const FockVector& state, const Lattice& lattice, const FockBasis& basis);

struct EvolutionDifference {
    double difference = 0.0;         // ‖e^{-iH_{tJ}s}ψ - e^{-iHs}ψ‖
    double eps_i = 0.0;              // ‖H_I ψ‖
    double first_order_bound = 0.0;  // |s| |J| ε_I
    double duhamel_bound = 0.0;      // ∫_0^{|s|} ‖(H_{tJ} - H) e^{-iHu} ψ‖ du
    bool satisfied = false;          // difference ≤ first_order_bound + 1e-6
};

EvolutionDifference evolution_difference(const FockVector& state, double s, double t_hop, double j_coupling,
                                         const Lattice& lattice, const FockBasis& basis);

/// Many-body state with one fermion in each given mode, ancillas trivial.
FockVector fermion_product(const std::vector<SingleParticleState>& modes, const FockBasis& basis);

}  // namespace qwire
