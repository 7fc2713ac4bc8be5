#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "epscan/errors.hpp"

namespace epscan {

using Complex    = std::complex<double>;
using Matrix     = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;

// ---------------------------------------------------------------------------
// Model family: L levels with even particle degeneracies omega_j, pairwise
// distinct single-particle energies epsilon_j, P pairs, and a mixing zeta
// interpolating between two integrable limits (zeta=1 pairing coupling,
// zeta=0 diagonal number-operator coupling).
// ---------------------------------------------------------------------------

struct ModelSpec {
    std::vector<int>    omega;
    std::vector<double> epsilon;
    int    pairs = 1;
    double zeta  = 1.0;

    int levels() const { return static_cast<int>(omega.size()); }
    int capacity(int level) const { return omega[level] / 2; }

    // Total pair capacity sum_j omega_j / 2.
    int total_capacity() const;

    // Throws InvalidSpec (or DegenerateEpsilon for coinciding energies).
    void validate() const;

    // The second parameter-dependent invariant Q is defined only for the
    // 3-level family with epsilon_1 = 0.
    bool q_available() const;
};

// The standard 3-level benchmark family: omega=(6,4,2), epsilon=(0,1,eps3), P=4.
ModelSpec benchmark_spec(double eps3, double zeta);

// Occupation vectors (p_1,...,p_L) with 0 <= p_j <= omega_j/2 and sum = P,
// in ascending lexicographic order.
struct PairBasis {
    std::vector<std::vector<int>> states;

    int dim() const { return static_cast<int>(states.size()); }
    int index_of(const std::vector<int>& state) const;  // -1 if absent
};

PairBasis enumerate_basis(const ModelSpec& spec);

// Operators of the family are affine in the coupling: O(g) = constant + g*slope.
struct OperatorPencil {
    RealMatrix constant;
    RealMatrix slope;

    Matrix at(Complex g) const {
        return constant.cast<Complex>() + g * slope.cast<Complex>();
    }
    int dim() const { return static_cast<int>(constant.rows()); }
};

// Per-level pair operators. A_dagger_j raises the pair count of level j, so
// individually these act on the full occupation space (every total pair
// number); only products conserving the total pair number restrict to the
// P-pair block. Matrix element <p_j+1| A†_j |p_j> = 2 sqrt((omega_j/2 - p_j)(p_j + 1)),
// fixed by the quasispin representation K0_j = N_j/2 - omega_j/4,
// K±_j = A†_j/2, A_j/2 with k_j = omega_j/4, m_j = p_j - omega_j/4.
struct PairOperators {
    std::vector<std::vector<int>> full_states;  // all occupation vectors, lex order
    std::vector<RealMatrix> raising;            // A†_j
    std::vector<RealMatrix> lowering;           // A_j = (A†_j)^T
    std::vector<RealMatrix> number;             // N_j, diagonal 2 p_j

    int full_dim() const { return static_cast<int>(full_states.size()); }
};

// Throws DimensionMismatch if basis does not match enumerate_basis(spec).
PairOperators build_pair_operators(const ModelSpec& spec, const PairBasis& basis);

// ---------------------------------------------------------------------------
// ModelOperators: all operators of the family restricted to the P-pair block,
// built once per spec. Construction is pure; instances are immutable and safe
// to share across threads.
// ---------------------------------------------------------------------------

class ModelOperators {
public:
    explicit ModelOperators(const ModelSpec& spec);

    const ModelSpec& spec() const { return spec_; }
    const PairBasis& basis() const { return basis_; }
    int dim() const { return basis_.dim(); }

    // H(g) = sum_i eps_i N_i + zeta g sum_ij A†_i A_j - (1-zeta) g sum_i N_i^2.
    Matrix hamiltonian(Complex g) const { return hamiltonian_.at(g); }
    const OperatorPencil& hamiltonian_pencil() const { return hamiltonian_; }

    // R_l(g) = K0_l + 4g sum_{l'!=l} [ (K+_l K-_l' + K-_l K+_l')/2 + K0_l K0_l' ] / (eps_l - eps_l').
    Matrix integral_of_motion(Complex g, int level) const;

    // Second parameter-dependent invariant; requires L = 3, eps_1 = 0.
    // Throws PreconditionViolated otherwise.
    Matrix q_invariant(Complex g) const;
    bool q_available() const { return q_.has_value(); }

    // Total particle number on the block: the constant diagonal 2P.
    Matrix number_operator() const;

private:
    ModelSpec spec_;
    PairBasis basis_;
    OperatorPencil hamiltonian_;
    std::vector<OperatorPencil> iom_;
    std::optional<OperatorPencil> q_;
};

// Convenience builders matching the per-operation contracts.
Matrix build_hamiltonian(const ModelSpec& spec, Complex g);
Matrix build_iom(const ModelSpec& spec, Complex g, int level);
Matrix build_q_invariant(const ModelSpec& spec, Complex g);

// ---------------------------------------------------------------------------
// Identity verification
// ---------------------------------------------------------------------------

struct IdentityCheck {
    std::string name;
    double max_rel_residual = 0.0;
    double tol = 0.0;
    bool pass = true;
};

struct IdentityReport {
    std::vector<IdentityCheck> checks;
    bool all_pass = true;
    int sample_count = 0;

    // C in H = 2 sum_i eps_i R_i + C, fitted as trace(H - 2 sum eps R)/n at the
    // last sample; affine in g.
    Complex fitted_constant{0.0, 0.0};
};

// Max relative residuals over the samples of: all pairwise [R_i, R_j];
// [H, R_l]; [H, Q] (when defined); H - 2 sum eps_i R_i - C I; and
// 2 sum R_l + (sum omega_l)/2 - N. Residuals are relative to the product of
// operand Frobenius norms (commutators) or to the operand norm (affine
// identities). The report carries failures; nothing throws here.
IdentityReport verify_identities(const ModelSpec& spec,
                                 const std::vector<Complex>& g_samples,
                                 double tol = 1e-10);

} // namespace epscan
