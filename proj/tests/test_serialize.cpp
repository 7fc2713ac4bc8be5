#include <doctest.h>

#include <cstdio>

#include "epscan/serialize.hpp"

using namespace epscan;

TEST_CASE("model spec round trip and schema") {
    const ModelSpec spec = benchmark_spec(7.0 / 3.0, 1.0);
    const Json j = spec_to_json(spec);
    CHECK(j.at("omega") == Json::array({6, 4, 2}));
    CHECK(j.at("pairs") == 4);
    CHECK(j.at("zeta") == 1.0);

    const ModelSpec back = spec_from_json(j);
    CHECK(back.omega == spec.omega);
    CHECK(back.epsilon == spec.epsilon);
    CHECK(back.pairs == spec.pairs);
    CHECK(back.zeta == spec.zeta);
}

TEST_CASE("malformed spec json") {
    CHECK_THROWS_AS(spec_from_json(Json{{"omega", {6, 4, 2}}}), InvalidSpec);
    CHECK_THROWS_AS(spec_from_json(Json{{"omega", {6, 4, 2}},
                                        {"epsilon", {0.0, 1.0, 2.0}},
                                        {"pairs", 99}}),
                    InvalidSpec);
    CHECK_THROWS_AS(load_spec_file("/nonexistent/spec.json"), InvalidSpec);
}

TEST_CASE("polynomial json schema") {
    ComplexPolynomial poly;
    poly.coeffs = {Complex(1.0, 0.0), Complex(0.0, -2.0), Complex(3.5, 0.25)};
    const Json j = polynomial_to_json(poly);
    CHECK(j.at("degree") == 2);
    CHECK(j.at("coeffs").size() == 3);
    CHECK(j.at("coeffs")[1] == Json::array({0.0, -2.0}));

    const ComplexPolynomial back = polynomial_from_json(j);
    REQUIRE(back.coeffs.size() == poly.coeffs.size());
    for (std::size_t k = 0; k < poly.coeffs.size(); ++k)
        CHECK(back.coeffs[k] == poly.coeffs[k]);
}

TEST_CASE("matrix export is row-major [re, im]") {
    Matrix m(2, 2);
    m << Complex(1, 2), Complex(3, 4), Complex(5, 6), Complex(7, 8);
    const Json j = matrix_to_json(m, "H");
    CHECK(j.at("label") == "H");
    CHECK(j.at("dim") == 2);
    CHECK(j.at("entries")[1] == Json::array({3.0, 4.0}));
    CHECK(j.at("entries")[2] == Json::array({5.0, 6.0}));
}

TEST_CASE("degeneracy set round trip") {
    DegeneracySet set;
    set.spec = benchmark_spec(7.0 / 3.0, 1.0);
    set.degree = 16;
    Degeneracy a;
    a.location = Complex(-0.22, 0.0);
    a.multiplicity = 2;
    a.kind = DegeneracyKind::crossing;
    a.evidence.h_gap = 1e-9;
    a.evidence.q_gap = 1.5;
    a.evidence.eigenvector_overlap = 0.002;
    a.evidence.monodromy = {0, 1, 2, 3, 4};
    Degeneracy b;
    b.location = Complex(0.03, 0.085);
    b.kind = DegeneracyKind::ep;
    b.evidence.monodromy = {1, 0, 2, 3, 4};
    set.degeneracies = {a, b};

    const DegeneracySet back = degeneracy_set_from_json(degeneracy_set_to_json(set));
    CHECK(back.degree == 16);
    REQUIRE(back.degeneracies.size() == 2);
    CHECK(back.degeneracies[0].kind == DegeneracyKind::crossing);
    CHECK(back.degeneracies[0].multiplicity == 2);
    CHECK(back.degeneracies[0].evidence.q_gap == 1.5);
    CHECK(back.degeneracies[1].kind == DegeneracyKind::ep);
    CHECK(back.degeneracies[1].evidence.monodromy == std::vector<int>{1, 0, 2, 3, 4});
    CHECK(back.spec.omega == set.spec.omega);
}

TEST_CASE("deterministic serialization") {
    const DegeneracySet set = [] {
        DegeneracySet s;
        s.spec = benchmark_spec(1.5, 0.0);
        s.degree = 16;
        Degeneracy d;
        d.location = Complex(-0.125, 0.0);
        d.multiplicity = 6;
        d.kind = DegeneracyKind::higher_order_crossing;
        s.degeneracies = {d};
        return s;
    }();
    CHECK(degeneracy_set_to_json(set).dump() == degeneracy_set_to_json(set).dump());
}

TEST_CASE("sweep csv header and layout") {
    SweepResult result;
    result.plan = preset_plan("fig2a");
    Trajectory t;
    t.id = 0;
    t.points = {{1.0, Complex(-0.22, 0.0), 2, DegeneracyKind::crossing},
                {0.99, Complex(-0.22, 0.01), 1, DegeneracyKind::ep}};
    result.trajectories.push_back(t);
    result.events.push_back({EventType::split, 0.99, Complex(-0.22, 0.01), 0});

    const std::string csv = sweep_result_to_csv(result);
    CHECK(csv.rfind("parameter,trajectory_id,re_g,im_g,multiplicity,kind,event\n", 0) == 0);
    CHECK(csv.find("split") != std::string::npos);
    CHECK(csv.find("crossing") != std::string::npos);
}
