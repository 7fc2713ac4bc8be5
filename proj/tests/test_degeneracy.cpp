#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>

#include "epscan/degeneracy.hpp"

using namespace epscan;

namespace {

// multiset of (location rounded, multiplicity)
std::multimap<double, int> real_census(const DegeneracySet& set) {
    std::multimap<double, int> out;
    for (const Degeneracy& d : set.degeneracies)
        out.emplace(std::round(d.location.real() * 1e6) / 1e6, d.multiplicity);
    return out;
}

const Degeneracy* find_near(const DegeneracySet& set, Complex g, double tol = 1e-4) {
    for (const Degeneracy& d : set.degeneracies)
        if (std::abs(d.location - g) < tol) return &d;
    return nullptr;
}

} // namespace

TEST_CASE("cluster_roots basics") {
    std::vector<Complex> roots = {Complex(2.0 + 1e-7, 0.0), Complex(2.0 - 1e-7, 0.0),
                                  Complex(5.0, 0.0)};
    const DegeneracySet set = cluster_roots(roots, 1e-5);
    REQUIRE(set.degeneracies.size() == 2);
    CHECK(set.degeneracies[0].multiplicity == 2);
    CHECK(std::abs(set.degeneracies[0].location - 2.0) < 1e-7);
    CHECK(set.degeneracies[1].multiplicity == 1);
    CHECK(set.total_root_count() == 3);

    // two clusters closer than 3 tol are ambiguous
    std::vector<Complex> tight = {Complex(0.0, 0.0), Complex(2.5e-5, 0.0)};
    CHECK_THROWS_AS(cluster_roots(tight, 1e-5), AmbiguousClustering);
}

TEST_CASE("diagonal-limit root census is exact") {
    // zeta = 0: eigenvalues are lines b_i - c_i g, all roots rational
    PipelineOptions opt;
    opt.classify.full_evidence = false;

    SUBCASE("eps3 = 7/3") {
        const DegeneracySet set =
            compute_degeneracies(benchmark_spec(7.0 / 3.0, 0.0), opt);
        CHECK(set.degree == 16);
        CHECK(set.total_root_count() == 16);
        const std::vector<std::pair<double, int>> expected = {
            {-7.0 / 12.0, 2}, {-5.0 / 12.0, 2}, {-1.0 / 3.0, 2}, {-7.0 / 24.0, 2},
            {-1.0 / 4.0, 4},  {-1.0 / 8.0, 2},  {1.0 / 12.0, 2}};
        REQUIRE(set.degeneracies.size() == expected.size());
        for (const auto& [g, mult] : expected) {
            const Degeneracy* d = find_near(set, Complex(g, 0.0), 1e-6);
            REQUIRE(d != nullptr);
            CHECK(d->multiplicity == mult);
            CHECK(std::abs(d->location.imag()) < 1e-8);
        }
    }

    SUBCASE("eps3 = 3/2 has the sextuple root at -1/8") {
        const DegeneracySet set =
            compute_degeneracies(benchmark_spec(1.5, 0.0), opt);
        CHECK(set.degree == 16);
        const std::vector<std::pair<double, int>> expected = {
            {-3.0 / 8.0, 2}, {-5.0 / 16.0, 2}, {-1.0 / 4.0, 4},
            {-3.0 / 16.0, 2}, {-1.0 / 8.0, 6}};
        REQUIRE(set.degeneracies.size() == expected.size());
        for (const auto& [g, mult] : expected) {
            const Degeneracy* d = find_near(set, Complex(g, 0.0), 1e-6);
            REQUIRE(d != nullptr);
            CHECK(d->multiplicity == mult);
        }
    }
}

TEST_CASE("pairing-limit census: 2 real crossings + 12 EPs") {
    const DegeneracySet set = compute_degeneracies(benchmark_spec(7.0 / 3.0, 1.0));
    CHECK(set.degree == 16);
    CHECK(set.total_root_count() == 16);

    int crossings = 0, eps = 0;
    for (const Degeneracy& d : set.degeneracies) {
        if (d.kind == DegeneracyKind::crossing) {
            ++crossings;
            CHECK(std::abs(d.location.imag()) < 1e-6);
            CHECK(d.multiplicity == 2);
        } else if (d.kind == DegeneracyKind::ep) {
            ++eps;
            CHECK(d.multiplicity == 1);
        }
    }
    CHECK(crossings == 2);
    CHECK(eps == 12);

    // frozen locations of the two crossings
    CHECK(find_near(set, Complex(-0.2211393753, 0.0), 1e-5) != nullptr);
    CHECK(find_near(set, Complex(0.0628060420, 0.0), 1e-5) != nullptr);

    // conjugate pairing of the off-axis roots
    for (const Degeneracy& d : set.degeneracies) {
        if (std::abs(d.location.imag()) < 1e-6) continue;
        const Degeneracy* partner = find_near(set, std::conj(d.location), 1e-6);
        REQUIRE(partner != nullptr);
        CHECK(partner->multiplicity == d.multiplicity);
        CHECK(partner->kind == d.kind);
    }
}

TEST_CASE("q independence test separates crossings from EPs") {
    const ModelOperators ops(benchmark_spec(7.0 / 3.0, 1.0));
    const DegeneracySet set = compute_degeneracies(benchmark_spec(7.0 / 3.0, 1.0));

    for (const Degeneracy& d : set.degeneracies) {
        const QGapResult q = q_independence_test(ops, d.location);
        CHECK(q.h_gap < 1e-6);
        if (d.kind == DegeneracyKind::crossing)
            CHECK(q.q_gap > 1e-3);
        else
            CHECK(q.q_gap < 1e-3);
    }

    // generic point: no degeneracy at all
    const QGapResult generic = q_independence_test(ops, Complex(1.0, 1.0));
    CHECK(generic.h_gap > 1e-2);

    // preconditions
    const ModelOperators mixed(benchmark_spec(7.0 / 3.0, 0.5));
    CHECK_THROWS_AS(q_independence_test(mixed, Complex(0.0, 0.0)),
                    PreconditionViolated);
}

TEST_CASE("monodromy distinguishes branch points from crossings") {
    const ModelOperators ops(benchmark_spec(7.0 / 3.0, 1.0));
    const DegeneracySet set = compute_degeneracies(benchmark_spec(7.0 / 3.0, 1.0));

    for (const Degeneracy& d : set.degeneracies) {
        double nearest = 1e9;
        for (const Degeneracy& o : set.degeneracies)
            if (&o != &d)
                nearest = std::min(nearest, std::abs(o.location - d.location));
        const MonodromyResult m = monodromy(ops, d.location, 0.2 * nearest);
        if (d.kind == DegeneracyKind::ep)
            CHECK(m.is_transposition());
        else
            CHECK(m.is_identity());
    }

    const MonodromyResult empty = monodromy(ops, Complex(1.0, 1.0), 0.05);
    CHECK(empty.is_identity());
}

TEST_CASE("eigenvector overlap: coalescence vs orthogonality") {
    const ModelOperators ops(benchmark_spec(7.0 / 3.0, 1.0));
    const DegeneracySet set = compute_degeneracies(benchmark_spec(7.0 / 3.0, 1.0));

    for (const Degeneracy& d : set.degeneracies) {
        double prev = (d.kind == DegeneracyKind::ep) ? 0.0 : 1.0;
        for (double offset : {1e-2, 1e-3, 1e-4}) {
            const double ov = eigenvector_overlap(ops, d.location, offset);
            if (d.kind == DegeneracyKind::ep) {
                CHECK(ov >= prev);  // approaching coalescence
            } else {
                CHECK(ov <= prev + 1e-6);
            }
            prev = ov;
        }
        if (d.kind == DegeneracyKind::ep)
            CHECK(prev > 0.99);
        else
            CHECK(prev < 0.01);
    }
}

TEST_CASE("classification stores evidence and flags disagreement") {
    const DegeneracySet set = compute_degeneracies(benchmark_spec(7.0 / 3.0, 1.0));
    for (const Degeneracy& d : set.degeneracies) {
        CHECK_FALSE(d.evidence.monodromy.empty());
        CHECK(d.evidence.h_gap >= 0.0);
        CHECK(d.evidence.q_gap >= 0.0);
    }

    // a genuine EP forced into a fake multiplicity-2 cluster must conflict:
    // its monodromy is a transposition -> EP-cluster, kind stays flagged
    const ModelOperators ops(benchmark_spec(7.0 / 3.0, 1.0));
    const Degeneracy* ep = nullptr;
    for (const Degeneracy& d : set.degeneracies)
        if (d.kind == DegeneracyKind::ep) ep = &d;
    REQUIRE(ep != nullptr);
    DegeneracySet fake;
    fake.spec = set.spec;
    fake.degeneracies = {{ep->location, 2, DegeneracyKind::unclassified, {}}};
    const DegeneracySet out = classify(ops, fake, ClassifyOptions{});
    CHECK(out.degeneracies[0].kind == DegeneracyKind::ep_cluster);
}

TEST_CASE("no EPs anywhere on the diagonal integrable line") {
    const DegeneracySet set = compute_degeneracies(benchmark_spec(7.0 / 3.0, 0.0));
    for (const Degeneracy& d : set.degeneracies) {
        CHECK(std::abs(d.location.imag()) < 1e-8);
        CHECK(d.multiplicity >= 2);
        CHECK((d.kind == DegeneracyKind::crossing ||
               d.kind == DegeneracyKind::higher_order_crossing));
    }
}
