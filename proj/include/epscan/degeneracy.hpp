#pragma once

#include <vector>

#include "epscan/discriminant.hpp"
#include "epscan/model.hpp"

namespace epscan {

// ---------------------------------------------------------------------------
// Degeneracies of H(g): clustered discriminant roots with multiplicities,
// classified as exceptional points (eigenvector coalescence, square-root
// branch point) versus level crossings (orthogonal eigenvectors, permitted
// by integrability).
// ---------------------------------------------------------------------------

enum class DegeneracyKind {
    unclassified,
    ep,                     // single root, eigenvector coalescence
    crossing,               // double root, orthogonal eigenvectors
    higher_order_crossing,  // quadruple/sextuple coalescence of crossings
    ep_cluster,             // multiple root with branch-point monodromy (anomalous)
};

const char* to_string(DegeneracyKind kind);

struct MonodromyResult {
    std::vector<int> permutation;  // branch started at i ends at initial index permutation[i]
    bool is_identity() const;
    bool is_transposition() const;
};

struct QGapResult {
    double h_gap = 0.0;  // eigenvalue gap of H within the near-degenerate subspace
    double q_gap = 0.0;  // minimal eigenvalue gap of Q within that subspace
};

struct DegeneracyEvidence {
    double h_gap = -1.0;
    double q_gap = -1.0;               // -1 when Q is not applicable
    double eigenvector_overlap = -1.0; // |<v1|v2>| / (|v1||v2|) at a small offset
    std::vector<int> monodromy;        // empty if not computed
};

struct Degeneracy {
    Complex location;
    int multiplicity = 1;
    DegeneracyKind kind = DegeneracyKind::unclassified;
    DegeneracyEvidence evidence;
};

struct DegeneracySet {
    ModelSpec spec;
    int degree = 0;          // discriminant degree M
    int beyond_horizon = 0;  // roots beyond the tracking horizon: counted, not located
    std::vector<Degeneracy> degeneracies;

    int total_root_count() const;
};

// Single-linkage clustering; cluster location is the centroid, multiplicity
// the member count. Throws AmbiguousClustering if two cluster centroids are
// closer than 3*tol.
DegeneracySet cluster_roots(const std::vector<Complex>& roots, double tol);

// ---------------------------------------------------------------------------
// Root extraction with verification
// ---------------------------------------------------------------------------

struct RootSearchOptions {
    double escape_radius = 1e3;    // events boundary; tracking horizon is 10x this
    double horizon_factor = 10.0;
    FitOptions fit;
    double validate_ratio = 1e-3;  // |D(root)| / |D(root +- probe)| must fall below this
    int max_repair_depth = 48;

    double horizon() const { return horizon_factor * escape_radius; }
};

struct RootSet {
    std::vector<Complex> roots;  // refined roots with |g| <= horizon
    int degree = 0;              // trimmed fit degree
    int total_count = 0;         // winding count far outside all roots
    int beyond_horizon = 0;      // total_count minus roots inside the horizon
    DiscriminantFit fit;
};

// Polynomial route (reconstruction + companion matrix), followed by damped
// Newton polish directly on the eigenvalue-product discriminant, validation
// of every candidate, and an argument-principle count check; missing roots
// are recovered by winding-guided disc subdivision. Throws ConvergenceFailure
// if counts cannot be reconciled.
RootSet find_discriminant_roots(const ModelOperators& ops,
                                const RootSearchOptions& opt = {});

// ---------------------------------------------------------------------------
// Classification probes
// ---------------------------------------------------------------------------

// Simultaneous diagnosis of H(g0) and Q(g0) on the near-degenerate H
// eigenspace (all eigenvalues within `window` of the closest pair's mean).
// Requires zeta = 1 and epsilon_1 = 0; throws PreconditionViolated otherwise.
QGapResult q_independence_test(const ModelOperators& ops, Complex g0,
                               double window = 1e-4);
QGapResult q_independence_test(const ModelSpec& spec, Complex g0);

// Eigenvalue permutation induced by tracking around the closed loop
// g(t) = center + radius * exp(2 pi i t). Throws TrackingAmbiguity when a
// matching step cannot distinguish two candidates.
MonodromyResult monodromy(const ModelOperators& ops, Complex center,
                          double radius, int steps = 128);
MonodromyResult monodromy(const ModelSpec& spec, Complex center,
                          double radius, int steps = 128);

// Hermitian-normalized overlap of the two nearly-degenerate right eigenvectors
// at g0 + offset (offset taken along the real direction).
double eigenvector_overlap(const ModelOperators& ops, Complex g0, double offset);

struct ClassifyOptions {
    bool full_evidence = true;   // probe every cluster; false: multiplicity-1 -> EP directly
    double q_gap_threshold = 1e-3;
    double realness_tol = 1e-6;
    int monodromy_steps = 128;
    double monodromy_radius_factor = 0.2;
    double overlap_offset = 1e-4;
};

// Assign kinds using multiplicity, monodromy and (in the zeta=1 integrable
// limit with epsilon_1=0) the Q-gap criterion. The three classifiers must
// agree; throws ClassificationConflict on disagreement.
DegeneracySet classify(const ModelOperators& ops, DegeneracySet set,
                       const ClassifyOptions& opt = {});
DegeneracySet classify(const ModelSpec& spec, DegeneracySet set);

// ---------------------------------------------------------------------------
// Full pipeline
// ---------------------------------------------------------------------------

struct PipelineOptions {
    RootSearchOptions search;
    ClassifyOptions classify;
    double cluster_tol = 0.0;    // 0: use 1e-5 * (1 + max |root|)
    double min_cluster_tol = 1e-10;
    bool run_classification = true;
};

DegeneracySet compute_degeneracies(const ModelSpec& spec,
                                   const PipelineOptions& opt = {});

} // namespace epscan
