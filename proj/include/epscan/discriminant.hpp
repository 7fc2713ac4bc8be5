#pragma once

#include <vector>

#include "epscan/model.hpp"

namespace epscan {

// ---------------------------------------------------------------------------
// Discriminant of det[H(g) - E I] over the complex coupling plane:
// D(g) = prod_{m<m'} [E_m(g) - E_{m'}(g)]^2, a polynomial in g of degree at
// most n(n-1). Its roots are all eigenvalue degeneracies.
// ---------------------------------------------------------------------------

struct EigenSet {
    std::vector<Complex> values;  // unordered
};

// General complex (non-hermitian) dense eigensolver. Throws ConvergenceFailure.
EigenSet eigenvalues(const Matrix& h);

struct EigenSystem {
    Eigen::VectorXcd values;
    Matrix vectors;  // right eigenvectors, columns
};

EigenSystem eigensystem(const Matrix& h);

// Products of squared differences overflow quickly for |g| >> 1, so the value
// is carried in log-magnitude/phase form; `value` is exp(log_magnitude + i*phase)
// and may round to 0 or inf at extreme arguments.
struct DiscriminantValue {
    Complex value;
    double log_magnitude;
    double phase;  // in (-pi, pi]
};

DiscriminantValue discriminant_at(const ModelOperators& ops, Complex g);
DiscriminantValue discriminant_at(const ModelSpec& spec, Complex g);

struct ComplexPolynomial {
    std::vector<Complex> coeffs;  // ascending, trailing near-zeros trimmed

    int degree() const { return static_cast<int>(coeffs.size()) - 1; }
    Complex eval(Complex g) const;
    Complex derivative(Complex g) const;
    // Sum |c_k| |g|^k, the natural evaluation scale at g.
    double eval_scale(Complex g) const;
};

struct DiscriminantFit {
    ComplexPolynomial poly;
    double radius = 0.0;        // final sampling radius
    double sample_scale = 0.0;  // geometric mean of |D| on the sampling circle
};

struct FitOptions {
    int samples = 128;            // per circle; must exceed n(n-1)
    double initial_radius = 10.0;
    double trim_rel = 1e-9;       // degree trim threshold, scaled domain
    int max_radius_iters = 8;
    double max_radius = 1e5;
    double min_radius = 0.05;
};

// Reconstructs D(g) by sampling on circles (roots of unity scaled to an
// adaptively chosen radius) and inverting the discrete Fourier relation.
// The radius is iterated toward 2x the largest root magnitude of the current
// fit. Throws IllConditioned if the returned polynomial does not reproduce
// off-grid samples to 1e-6 relative.
DiscriminantFit discriminant_polynomial(const ModelOperators& ops,
                                        const FitOptions& opt = {});
ComplexPolynomial discriminant_polynomial(const ModelSpec& spec);

// All roots with numerical multiplicity via companion-matrix eigenvalues,
// each polished by Newton iterations on the polynomial.
std::vector<Complex> polynomial_roots(const ComplexPolynomial& poly);

// Number of discriminant roots strictly inside |g - center| < radius, by
// tracking the phase of D around the circle (argument principle). Exact
// integer output; works at any radius thanks to the log-form evaluation.
int winding_count(const ModelOperators& ops, Complex center, double radius);

// Winding count on a circle far outside every root: the true polynomial degree,
// independent of the interpolation route.
int total_root_count(const ModelOperators& ops);

} // namespace epscan
