#include <doctest.h>

#include <algorithm>
#include <complex>
#include <random>

#include "epscan/discriminant.hpp"

using namespace epscan;

namespace {

ModelSpec two_level_spec() {
    ModelSpec spec;
    spec.omega = {2, 2};
    spec.epsilon = {0.0, 1.0};
    spec.pairs = 1;
    spec.zeta = 1.0;
    return spec;
}

} // namespace

TEST_CASE("eigenvalues of a diagonal hamiltonian") {
    const ModelOperators ops(benchmark_spec(7.0 / 3.0, 1.0));
    const Matrix h = ops.hamiltonian(0.0);
    EigenSet eig = eigenvalues(h);
    std::vector<double> got;
    for (const Complex& e : eig.values) {
        CHECK(std::abs(e.imag()) < 1e-12);
        got.push_back(e.real());
    }
    std::sort(got.begin(), got.end());
    std::vector<double> expected;
    for (int a = 0; a < 5; ++a) expected.push_back(h(a, a).real());
    std::sort(expected.begin(), expected.end());
    for (int a = 0; a < 5; ++a) CHECK(got[a] == doctest::Approx(expected[a]));
}

TEST_CASE("hermitian case has real spectrum") {
    const ModelOperators ops(benchmark_spec(7.0 / 3.0, 1.0));
    const EigenSet eig = eigenvalues(ops.hamiltonian(Complex(0.8, 0.0)));
    for (const Complex& e : eig.values) CHECK(std::abs(e.imag()) < 1e-10);
}

TEST_CASE("discriminant closed form on the 2x2 family") {
    const ModelOperators ops(two_level_spec());
    const Complex g(0.3, -0.6);
    const Matrix h = ops.hamiltonian(g);
    const Complex expected =
        (h(0, 0) - h(1, 1)) * (h(0, 0) - h(1, 1)) + 4.0 * h(0, 1) * h(0, 1);
    const DiscriminantValue d = discriminant_at(ops, g);
    CHECK(std::abs(d.value - expected) < 1e-10 * std::abs(expected));
}

TEST_CASE("discriminant conjugate symmetry for real parameters") {
    const ModelOperators ops(benchmark_spec(7.0 / 3.0, 0.7));
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 20; ++i) {
        const Complex g(u(rng), u(rng));
        const DiscriminantValue a = discriminant_at(ops, g);
        const DiscriminantValue b = discriminant_at(ops, std::conj(g));
        CHECK(std::abs(b.value - std::conj(a.value)) <
              1e-8 * std::max(1.0, std::abs(a.value)));
    }
}

TEST_CASE("log form matches the plain value away from overflow") {
    const ModelOperators ops(benchmark_spec(7.0 / 3.0, 1.0));
    const DiscriminantValue d = discriminant_at(ops, Complex(0.21, 0.13));
    CHECK(std::abs(std::exp(Complex(d.log_magnitude, d.phase)) - d.value) <
          1e-10 * std::abs(d.value));
}

TEST_CASE("discriminant degree law") {
    // the pairing line and the diagonal line lose four units of degree
    for (double eps3 : {1.5, 1.8499, 7.0 / 3.0}) {
        CHECK(discriminant_polynomial(benchmark_spec(eps3, 1.0)).degree() == 16);
        CHECK(discriminant_polynomial(benchmark_spec(eps3, 0.0)).degree() == 16);
        CHECK(discriminant_polynomial(benchmark_spec(eps3, 0.5)).degree() == 20);
    }
}

TEST_CASE("degree law agrees with the argument-principle count") {
    for (double zeta : {0.0, 0.5, 1.0}) {
        const ModelOperators ops(benchmark_spec(7.0 / 3.0, zeta));
        const DiscriminantFit fit = discriminant_polynomial(ops);
        CHECK(fit.poly.degree() == total_root_count(ops));
    }
}

TEST_CASE("single basis state: empty product") {
    ModelSpec spec;
    spec.omega = {2, 2};
    spec.epsilon = {0.0, 1.0};
    spec.pairs = 2;  // completely filled, dimension 1
    const ModelOperators ops(spec);
    const DiscriminantFit fit = discriminant_polynomial(ops);
    CHECK(fit.poly.degree() == 0);
    CHECK(std::abs(fit.poly.coeffs[0] - Complex(1.0, 0.0)) < 1e-12);
    const DiscriminantValue d = discriminant_at(ops, Complex(0.4, 0.2));
    CHECK(std::abs(d.value - Complex(1.0, 0.0)) < 1e-12);
}

TEST_CASE("reconstruction matches the product formula at random points") {
    const ModelOperators ops(benchmark_spec(7.0 / 3.0, 1.0));
    const DiscriminantFit fit = discriminant_polynomial(ops);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 50; ++i) {
        const Complex g = 0.8 * fit.radius * Complex(u(rng), u(rng));
        const DiscriminantValue d = discriminant_at(ops, g);
        const Complex p = fit.poly.eval(g);
        CHECK(std::abs(p - d.value) <=
              1e-8 * std::max(std::abs(p), fit.sample_scale));
    }
}

TEST_CASE("polynomial roots: exact quadratic") {
    ComplexPolynomial poly;
    poly.coeffs = {Complex(4.0, 0.0), Complex(-4.0, 0.0), Complex(1.0, 0.0)};  // (g-2)^2
    const auto roots = polynomial_roots(poly);
    REQUIRE(roots.size() == 2);
    for (const Complex& r : roots) CHECK(std::abs(r - 2.0) < 1e-6);
}

TEST_CASE("polynomial roots: random degree-8 polynomial recovered") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Complex> chosen;
    for (int i = 0; i < 8; ++i) chosen.emplace_back(u(rng), u(rng));

    ComplexPolynomial poly;
    poly.coeffs = {Complex(1.0, 0.0)};
    for (const Complex& r : chosen) {
        std::vector<Complex> next(poly.coeffs.size() + 1, Complex(0.0, 0.0));
        for (std::size_t k = 0; k < poly.coeffs.size(); ++k) {
            next[k] -= r * poly.coeffs[k];
            next[k + 1] += poly.coeffs[k];
        }
        poly.coeffs = std::move(next);
    }

    auto roots = polynomial_roots(poly);
    REQUIRE(roots.size() == 8);
    for (const Complex& r : chosen) {
        double best = 1e9;
        for (const Complex& z : roots) best = std::min(best, std::abs(z - r));
        CHECK(best < 1e-8);
    }
}

TEST_CASE("polynomial roots precondition") {
    ComplexPolynomial constant;
    constant.coeffs = {Complex(1.0, 0.0)};
    CHECK_THROWS_AS(polynomial_roots(constant), PreconditionViolated);
}

TEST_CASE("winding counts around known structure") {
    const ModelOperators ops(benchmark_spec(7.0 / 3.0, 0.0));
    // zeta = 0 roots all real in [-7/12, 1/12]; quadruple root at -1/4
    CHECK(winding_count(ops, Complex(0.0, 0.0), 1e3) == 16);
    CHECK(winding_count(ops, Complex(-0.25, 0.0), 0.02) == 4);
    CHECK(winding_count(ops, Complex(-0.125, 0.0), 0.02) == 2);
    CHECK(winding_count(ops, Complex(5.0, 5.0), 0.5) == 0);
}
