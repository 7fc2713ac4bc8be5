#include "epscan/degeneracy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "epscan/assignment.hpp"

namespace epscan {

namespace {
constexpr double kPi = std::numbers::pi;
}

const char* to_string(DegeneracyKind kind) {
    switch (kind) {
        case DegeneracyKind::unclassified: return "unclassified";
        case DegeneracyKind::ep: return "EP";
        case DegeneracyKind::crossing: return "crossing";
        case DegeneracyKind::higher_order_crossing: return "higher-order-crossing";
        case DegeneracyKind::ep_cluster: return "EP-cluster";
    }
    return "unclassified";
}

bool MonodromyResult::is_identity() const {
    for (std::size_t i = 0; i < permutation.size(); ++i)
        if (permutation[i] != static_cast<int>(i)) return false;
    return true;
}

bool MonodromyResult::is_transposition() const {
    int moved = 0;
    for (std::size_t i = 0; i < permutation.size(); ++i)
        if (permutation[i] != static_cast<int>(i)) ++moved;
    if (moved != 2) return false;
    for (std::size_t i = 0; i < permutation.size(); ++i)
        if (permutation[i] != static_cast<int>(i) &&
            permutation[permutation[i]] != static_cast<int>(i))
            return false;
    return true;
}

int DegeneracySet::total_root_count() const {
    int total = 0;
    for (const Degeneracy& d : degeneracies) total += d.multiplicity;
    return total;
}

DegeneracySet cluster_roots(const std::vector<Complex>& roots, double tol) {
    const int n = static_cast<int>(roots.size());
    std::vector<int> label(n, -1);
    int clusters = 0;
    for (int i = 0; i < n; ++i) {
        if (label[i] >= 0) continue;
        label[i] = clusters++;
        bool grew = true;
        while (grew) {
            grew = false;
            for (int a = 0; a < n; ++a) {
                if (label[a] != label[i]) continue;
                for (int b = 0; b < n; ++b) {
                    if (label[b] >= 0) continue;
                    if (std::abs(roots[a] - roots[b]) < tol) {
                        label[b] = label[i];
                        grew = true;
                    }
                }
            }
        }
    }

    DegeneracySet set;
    set.degeneracies.resize(clusters);
    std::vector<int> counts(clusters, 0);
    std::vector<Complex> sums(clusters, Complex(0.0, 0.0));
    for (int i = 0; i < n; ++i) {
        ++counts[label[i]];
        sums[label[i]] += roots[i];
    }
    for (int c = 0; c < clusters; ++c) {
        set.degeneracies[c].location = sums[c] / static_cast<double>(counts[c]);
        set.degeneracies[c].multiplicity = counts[c];
    }
    std::sort(set.degeneracies.begin(), set.degeneracies.end(),
              [](const Degeneracy& a, const Degeneracy& b) {
                  if (a.location.real() != b.location.real())
                      return a.location.real() < b.location.real();
                  return a.location.imag() < b.location.imag();
              });
    set.degree = n;

    for (int a = 0; a < clusters; ++a)
        for (int b = a + 1; b < clusters; ++b)
            if (std::abs(set.degeneracies[a].location - set.degeneracies[b].location) < 3.0 * tol)
                throw AmbiguousClustering("cluster_roots: inter-cluster gap below 3*tol");
    return set;
}

// ---------------------------------------------------------------------------
// Root extraction
// ---------------------------------------------------------------------------

namespace {

// One Newton step D/D' with a central-difference derivative, computed from
// locally normalized values so the global scale of D cancels.
Complex newton_step(const ModelOperators& ops, Complex g, double h) {
    const DiscriminantValue d0 = discriminant_at(ops, g);
    const DiscriminantValue dp = discriminant_at(ops, g + h);
    const DiscriminantValue dm = discriminant_at(ops, g - h);
    const double ref = std::max(dp.log_magnitude, dm.log_magnitude);
    if (!std::isfinite(ref)) return Complex(0.0, 0.0);
    const Complex vp = std::exp(Complex(dp.log_magnitude - ref, dp.phase));
    const Complex vm = std::exp(Complex(dm.log_magnitude - ref, dm.phase));
    const Complex v0 = std::exp(Complex(d0.log_magnitude - ref, d0.phase));
    const Complex der = (vp - vm) / (2.0 * h);
    if (der == Complex(0.0, 0.0)) return Complex(0.0, 0.0);
    return -v0 / der;
}

Complex refine_root(const ModelOperators& ops, Complex g, double step_cap) {
    Complex best = g;
    double best_log = discriminant_at(ops, g).log_magnitude;
    double h = 1e-7 * (1.0 + std::abs(g));
    for (int it = 0; it < 60; ++it) {
        Complex step = newton_step(ops, g, h);
        if (step == Complex(0.0, 0.0)) break;
        if (std::abs(step) > step_cap) step *= step_cap / std::abs(step);
        g += step;
        const double lg = discriminant_at(ops, g).log_magnitude;
        if (lg < best_log) {
            best_log = lg;
            best = g;
        }
        if (std::abs(step) < 1e-13 * (1.0 + std::abs(g))) break;
        // shrink the differencing step along with the Newton step
        h = std::clamp(0.3 * std::abs(step), 1e-12 * (1.0 + std::abs(g)),
                       1e-7 * (1.0 + std::abs(g)));
    }
    return best;
}

bool validated_root(const ModelOperators& ops, Complex g, double ratio) {
    const double h = 1e-3 * (1.0 + std::abs(g));
    const double at = discriminant_at(ops, g).log_magnitude;
    const double near = std::min(discriminant_at(ops, g + h).log_magnitude,
                                 discriminant_at(ops, g + Complex(0.0, h)).log_magnitude);
    return at < near + std::log(ratio);
}

// Winding-guided subdivision: recover roots of D inside a disc until the
// argument-principle count matches the known list.
void subdivision_search(const ModelOperators& ops, Complex center, double radius,
                        std::vector<Complex>& known, int depth, int max_depth,
                        double validate_ratio) {
    int inside = 0;
    for (const Complex& r : known)
        if (std::abs(r - center) < radius) ++inside;
    const int want = winding_count(ops, center, radius);
    int missing = want - inside;
    if (missing <= 0) return;

    if (radius < 1e-7 || depth >= max_depth) {
        // unresolvably tight cluster: report the center with the right count
        for (int k = 0; k < missing; ++k) known.push_back(center);
        return;
    }

    if (missing >= 1) {
        // try a direct polish from the disc center first
        const Complex candidate = refine_root(ops, center, 0.9 * radius);
        if (std::abs(candidate - center) < radius &&
            validated_root(ops, candidate, validate_ratio)) {
            bool duplicate = false;
            for (const Complex& r : known)
                if (std::abs(r - candidate) < 1e-9 * (1.0 + std::abs(candidate))) {
                    duplicate = true;
                    break;
                }
            if (!duplicate) {
                known.push_back(candidate);
                subdivision_search(ops, center, radius, known, depth, max_depth,
                                   validate_ratio);
                return;
            }
        }
    }

    // 7-disc cover: one central child plus a hex ring
    subdivision_search(ops, center, 0.53 * radius, known, depth + 1, max_depth,
                       validate_ratio);
    for (int m = 0; m < 6; ++m) {
        const double phi = 2.0 * kPi * (m + 0.5) / 6.0;
        const Complex child =
            center + 0.866 * radius * Complex(std::cos(phi), std::sin(phi));
        subdivision_search(ops, child, 0.53 * radius, known, depth + 1, max_depth,
                           validate_ratio);
        int have = 0;
        for (const Complex& r : known)
            if (std::abs(r - center) < radius) ++have;
        if (have >= want) break;
    }
}

} // namespace

RootSet find_discriminant_roots(const ModelOperators& ops,
                                const RootSearchOptions& opt) {
    RootSet out;
    out.fit = discriminant_polynomial(ops, opt.fit);
    out.degree = out.fit.poly.degree();
    out.total_count = total_root_count(ops);

    std::vector<Complex> raw;
    if (out.degree >= 1) raw = polynomial_roots(out.fit.poly);

    // damped polish on the product-formula discriminant; the cap keeps every
    // candidate inside its own basin
    std::vector<Complex> refined;
    refined.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        double nearest = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < raw.size(); ++j)
            if (j != i) nearest = std::min(nearest, std::abs(raw[i] - raw[j]));
        double cap = std::isfinite(nearest) ? 0.4 * nearest : 0.1 * (1.0 + std::abs(raw[i]));
        cap = std::max(cap, 1e-9 * (1.0 + std::abs(raw[i])));
        const Complex g = refine_root(ops, raw[i], cap);
        if (std::abs(g) <= opt.horizon() && validated_root(ops, g, opt.validate_ratio))
            refined.push_back(g);
    }

    const int inside_expected =
        (out.total_count == 0) ? 0
                               : winding_count(ops, Complex(0.0, 0.0), opt.horizon());
    out.beyond_horizon = out.total_count - inside_expected;

    if (static_cast<int>(refined.size()) != inside_expected) {
        if (static_cast<int>(refined.size()) > inside_expected)
            throw ConvergenceFailure(
                "find_discriminant_roots: validated more roots than the winding count");
        subdivision_search(ops, Complex(0.0, 0.0), opt.horizon(), refined, 0,
                           opt.max_repair_depth, opt.validate_ratio);
        if (static_cast<int>(refined.size()) != inside_expected)
            throw ConvergenceFailure(
                "find_discriminant_roots: root count does not match winding count");
    }

    out.roots = std::move(refined);
    return out;
}

// ---------------------------------------------------------------------------
// Classification probes
// ---------------------------------------------------------------------------

QGapResult q_independence_test(const ModelOperators& ops, Complex g0, double window) {
    if (ops.spec().zeta != 1.0)
        throw PreconditionViolated("q_independence_test: Q is an invariant only at zeta = 1");
    if (!ops.q_available())
        throw PreconditionViolated("q_independence_test: requires 3 levels with epsilon_1 = 0");

    const Matrix h = ops.hamiltonian(g0);
    const EigenSet eig = eigenvalues(h);
    const int n = static_cast<int>(eig.values.size());
    if (n < 2) throw PreconditionViolated("q_independence_test: need dimension >= 2");

    int bi = 0, bj = 1;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double gap = std::abs(eig.values[i] - eig.values[j]);
            if (gap < best) {
                best = gap;
                bi = i;
                bj = j;
            }
        }
    const Complex mu = 0.5 * (eig.values[bi] + eig.values[bj]);

    std::vector<int> subspace;
    for (int k = 0; k < n; ++k)
        if (std::abs(eig.values[k] - mu) <= window || k == bi || k == bj)
            subspace.push_back(k);

    QGapResult result;
    for (std::size_t a = 0; a < subspace.size(); ++a)
        for (std::size_t b = a + 1; b < subspace.size(); ++b)
            result.h_gap = std::max(
                result.h_gap,
                std::abs(eig.values[subspace[a]] - eig.values[subspace[b]]));

    // Spectral projector onto the near-degenerate invariant subspace via the
    // product filter; robust even when the eigenvectors coalesce.
    Matrix proj = Matrix::Identity(n, n);
    for (int k = 0; k < n; ++k) {
        if (std::find(subspace.begin(), subspace.end(), k) != subspace.end()) continue;
        proj = proj * (h - eig.values[k] * Matrix::Identity(n, n)) / (mu - eig.values[k]);
    }
    Eigen::JacobiSVD<Matrix> svd(proj, Eigen::ComputeThinU);
    const int m = static_cast<int>(subspace.size());
    const Matrix basis = svd.matrixU().leftCols(m);
    const Matrix q_sub = basis.adjoint() * ops.q_invariant(g0) * basis;
    const EigenSet q_eig = eigenvalues(q_sub);

    double min_gap = std::numeric_limits<double>::infinity();
    for (int a = 0; a < m; ++a)
        for (int b = a + 1; b < m; ++b)
            min_gap = std::min(min_gap, std::abs(q_eig.values[a] - q_eig.values[b]));
    result.q_gap = std::isfinite(min_gap) ? min_gap : 0.0;
    return result;
}

QGapResult q_independence_test(const ModelSpec& spec, Complex g0) {
    return q_independence_test(ModelOperators(spec), g0);
}

MonodromyResult monodromy(const ModelOperators& ops, Complex center,
                          double radius, int steps) {
    if (steps < 64) steps = 64;
    if (radius <= 0.0)
        throw PreconditionViolated("monodromy: radius must be positive");

    // Far from the origin H(g) ~ g H1, so every branch drifts by ~ lambda dg
    // per step while a coalescing pair stays tightly spaced. Dividing by g
    // removes the common drift; the loop never encircles g = 0 there.
    const bool normalize = std::abs(center) > std::max(1.0, 10.0 * radius);
    auto spectrum = [&](double theta) {
        const Complex g = center + radius * Complex(std::cos(theta), std::sin(theta));
        EigenSet eig = eigenvalues(ops.hamiltonian(g));
        if (normalize)
            for (Complex& e : eig.values) e /= g;
        return eig.values;
    };

    const std::vector<Complex> start = spectrum(0.0);
    const int n = static_cast<int>(start.size());
    std::vector<Complex> current = start;

    // advance with adaptive angle subdivision where the matching is uncertain
    const double full = 2.0 * kPi;
    double theta = 0.0;
    double dtheta = full / steps;
    const double min_dtheta = full / (1 << 20);
    long evals = 0;

    while (theta < full - 1e-15) {
        const double target = std::min(theta + dtheta, full);
        const std::vector<Complex> next = spectrum(target);
        if (++evals > (1 << 16))
            throw TrackingAmbiguity("monodromy: step budget exhausted");

        RealMatrix cost(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                cost(i, j) = std::abs(current[i] - next[j]);
        const std::vector<int> match = min_cost_assignment(cost);

        bool confident = true;
        for (int i = 0; i < n && confident; ++i) {
            double second = std::numeric_limits<double>::infinity();
            for (int j = 0; j < n; ++j)
                if (j != match[i]) second = std::min(second, cost(i, j));
            if (second - cost(i, match[i]) < 1e-10)
                throw TrackingAmbiguity("monodromy: two matching candidates within 1e-10");
            if (cost(i, match[i]) > 0.5 * second) confident = false;
        }
        if (!confident && target - theta > min_dtheta) {
            dtheta = 0.5 * (target - theta);
            continue;
        }

        std::vector<Complex> reordered(n);
        for (int i = 0; i < n; ++i) reordered[i] = next[match[i]];
        current = std::move(reordered);
        theta = target;
        dtheta = std::min(2.0 * dtheta, full / steps);
    }

    RealMatrix cost(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            cost(i, j) = std::abs(current[i] - start[j]);
    MonodromyResult result;
    result.permutation = min_cost_assignment(cost);
    return result;
}

MonodromyResult monodromy(const ModelSpec& spec, Complex center, double radius,
                          int steps) {
    return monodromy(ModelOperators(spec), center, radius, steps);
}

double eigenvector_overlap(const ModelOperators& ops, Complex g0, double offset) {
    const EigenSystem sys = eigensystem(ops.hamiltonian(g0 + offset));
    const int n = static_cast<int>(sys.values.size());
    int bi = 0, bj = 1;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double gap = std::abs(sys.values[i] - sys.values[j]);
            if (gap < best) {
                best = gap;
                bi = i;
                bj = j;
            }
        }
    const Eigen::VectorXcd v1 = sys.vectors.col(bi);
    const Eigen::VectorXcd v2 = sys.vectors.col(bj);
    return std::abs(v1.dot(v2)) / (v1.norm() * v2.norm());
}

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

namespace {

std::string cluster_tag(const Degeneracy& d) {
    return "g=(" + std::to_string(d.location.real()) + "," +
           std::to_string(d.location.imag()) + ") mult=" +
           std::to_string(d.multiplicity);
}

} // namespace

DegeneracySet classify(const ModelOperators& ops, DegeneracySet set,
                       const ClassifyOptions& opt) {
    const bool q_usable = ops.spec().zeta == 1.0 && ops.q_available();
    const std::size_t n_clusters = set.degeneracies.size();

    for (std::size_t c = 0; c < n_clusters; ++c) {
        Degeneracy& deg = set.degeneracies[c];
        const bool probe = opt.full_evidence || deg.multiplicity >= 2;

        if (!probe) {
            deg.kind = DegeneracyKind::ep;
            continue;
        }

        double nearest = std::numeric_limits<double>::infinity();
        for (std::size_t o = 0; o < n_clusters; ++o)
            if (o != c)
                nearest = std::min(nearest,
                                   std::abs(set.degeneracies[o].location - deg.location));
        double radius = std::isfinite(nearest)
                            ? opt.monodromy_radius_factor * nearest
                            : 0.01 * (1.0 + std::abs(deg.location));
        radius = std::clamp(radius, 1e-9, 0.05 * (1.0 + std::abs(deg.location)));

        const MonodromyResult mono = monodromy(ops, deg.location, radius, opt.monodromy_steps);
        deg.evidence.monodromy = mono.permutation;
        deg.evidence.eigenvector_overlap =
            eigenvector_overlap(ops, deg.location, opt.overlap_offset);

        bool q_coalesced = false, q_separated = false;
        if (q_usable) {
            const QGapResult q = q_independence_test(ops, deg.location);
            deg.evidence.h_gap = q.h_gap;
            deg.evidence.q_gap = q.q_gap;
            q_coalesced = q.q_gap < opt.q_gap_threshold;
            q_separated = !q_coalesced;
        }

        if (deg.multiplicity == 1) {
            deg.kind = DegeneracyKind::ep;
            if (!mono.is_transposition())
                throw ClassificationConflict(
                    "classify: single root without branch-point monodromy at " + cluster_tag(deg));
            if (q_usable && q_separated)
                throw ClassificationConflict(
                    "classify: single root but Q eigenvalues stay separated at " + cluster_tag(deg));
        } else if (mono.is_identity()) {
            deg.kind = deg.multiplicity >= 4 ? DegeneracyKind::higher_order_crossing
                                             : DegeneracyKind::crossing;
            if (q_usable && q_coalesced)
                throw ClassificationConflict(
                    "classify: crossing-like root but Q eigenvalues coalesce at " + cluster_tag(deg));
        } else {
            deg.kind = DegeneracyKind::ep_cluster;  // flagged, not resolved
        }
    }
    return set;
}

DegeneracySet classify(const ModelSpec& spec, DegeneracySet set) {
    return classify(ModelOperators(spec), std::move(set), ClassifyOptions{});
}

// ---------------------------------------------------------------------------
// Pipeline
// ---------------------------------------------------------------------------

DegeneracySet compute_degeneracies(const ModelSpec& spec, const PipelineOptions& opt) {
    spec.validate();
    const ModelOperators ops(spec);
    const RootSet roots = find_discriminant_roots(ops, opt.search);

    double max_mag = 0.0;
    for (const Complex& r : roots.roots) max_mag = std::max(max_mag, std::abs(r));
    double tol = opt.cluster_tol > 0.0 ? opt.cluster_tol : 1e-5 * (1.0 + max_mag);

    DegeneracySet set;
    while (true) {
        try {
            set = cluster_roots(roots.roots, tol);
            break;
        } catch (const AmbiguousClustering&) {
            tol *= 0.1;
            if (tol < opt.min_cluster_tol) throw;
        }
    }
    set.spec = spec;
    set.degree = roots.total_count;
    set.beyond_horizon = roots.beyond_horizon;

    if (opt.run_classification) set = classify(ops, std::move(set), opt.classify);
    return set;
}

} // namespace epscan
