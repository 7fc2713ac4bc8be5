#include "epscan/discriminant.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

namespace epscan {

namespace {
constexpr double kPi = std::numbers::pi;
}

EigenSet eigenvalues(const Matrix& h) {
    if (h.rows() != h.cols())
        throw DimensionMismatch("eigenvalues: matrix must be square");
    const int n = static_cast<int>(h.rows());
    Eigen::ComplexSchur<Matrix> schur;
    schur.setMaxIterations(120 * n);
    schur.compute(h, /*computeU=*/false);
    if (schur.info() != Eigen::Success) {
        // a uniform diagonal shift leaves all eigenvalue differences intact
        // but restarts the QR iteration from a different sequence
        const double scale = std::max(h.norm(), 1.0);
        for (int attempt = 1; attempt <= 3 && schur.info() != Eigen::Success; ++attempt) {
            const Complex shift = scale * 1e-13 * Complex(0.618 * attempt, 1.0);
            schur.compute(h + shift * Matrix::Identity(n, n), false);
            if (schur.info() == Eigen::Success) {
                EigenSet out;
                for (int i = 0; i < n; ++i)
                    out.values.push_back(schur.matrixT()(i, i) - shift);
                return out;
            }
        }
        throw ConvergenceFailure("eigenvalues: complex eigensolver did not converge");
    }
    EigenSet out;
    for (int i = 0; i < n; ++i) out.values.push_back(schur.matrixT()(i, i));
    return out;
}

EigenSystem eigensystem(const Matrix& h) {
    if (h.rows() != h.cols())
        throw DimensionMismatch("eigensystem: matrix must be square");
    Eigen::ComplexEigenSolver<Matrix> solver(h, /*computeEigenvectors=*/true);
    if (solver.info() != Eigen::Success)
        throw ConvergenceFailure("eigensystem: complex eigensolver did not converge");
    return {solver.eigenvalues(), solver.eigenvectors()};
}

DiscriminantValue discriminant_at(const ModelOperators& ops, Complex g) {
    const EigenSet eig = eigenvalues(ops.hamiltonian(g));
    const int n = static_cast<int>(eig.values.size());
    double log_mag = 0.0;
    double phase = 0.0;
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) {
            const Complex d = eig.values[a] - eig.values[b];
            if (d == Complex(0.0, 0.0)) {
                return {Complex(0.0, 0.0),
                        -std::numeric_limits<double>::infinity(), 0.0};
            }
            log_mag += 2.0 * std::log(std::abs(d));
            phase += 2.0 * std::arg(d);
        }
    phase = std::remainder(phase, 2.0 * kPi);
    const Complex value = std::exp(Complex(log_mag, phase));
    return {value, log_mag, phase};
}

DiscriminantValue discriminant_at(const ModelSpec& spec, Complex g) {
    return discriminant_at(ModelOperators(spec), g);
}

Complex ComplexPolynomial::eval(Complex g) const {
    Complex acc(0.0, 0.0);
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it)
        acc = acc * g + *it;
    return acc;
}

Complex ComplexPolynomial::derivative(Complex g) const {
    Complex acc(0.0, 0.0);
    for (int k = degree(); k >= 1; --k)
        acc = acc * g + static_cast<double>(k) * coeffs[k];
    return acc;
}

double ComplexPolynomial::eval_scale(Complex g) const {
    double acc = 0.0;
    double p = 1.0;
    const double a = std::abs(g);
    for (const Complex& c : coeffs) {
        acc += std::abs(c) * p;
        p *= a;
    }
    return acc;
}

namespace {

// One circle fit in the scaled variable w = g/radius. Returns coefficients of
// w^k in units of the circle's geometric-mean magnitude (uniform noise floor).
struct CircleFit {
    std::vector<Complex> scaled_coeffs;  // c_k * radius^k / scale
    double scale;
};

CircleFit fit_circle(const ModelOperators& ops, double radius, int samples) {
    std::vector<Complex> phases(samples);
    std::vector<double> logs(samples);
    double mean_log = 0.0;
    for (int s = 0; s < samples; ++s) {
        const double theta = 2.0 * kPi * s / samples;
        const DiscriminantValue d =
            discriminant_at(ops, radius * Complex(std::cos(theta), std::sin(theta)));
        logs[s] = d.log_magnitude;
        phases[s] = Complex(std::cos(d.phase), std::sin(d.phase));
        mean_log += d.log_magnitude;
    }
    mean_log /= samples;

    CircleFit fit;
    fit.scale = mean_log;  // log of the geometric mean
    fit.scaled_coeffs.assign(samples, Complex(0.0, 0.0));
    for (int k = 0; k < samples; ++k) {
        Complex acc(0.0, 0.0);
        for (int s = 0; s < samples; ++s) {
            const double theta = -2.0 * kPi * k * s / samples;
            acc += std::exp(logs[s] - mean_log) * phases[s] *
                   Complex(std::cos(theta), std::sin(theta));
        }
        fit.scaled_coeffs[k] = acc / static_cast<double>(samples);
    }
    return fit;
}

int trim_degree(const std::vector<Complex>& scaled_coeffs, int nmax, double rel) {
    double mx = 0.0;
    for (int k = 0; k <= nmax; ++k) mx = std::max(mx, std::abs(scaled_coeffs[k]));
    for (int k = nmax; k >= 0; --k)
        if (std::abs(scaled_coeffs[k]) > rel * mx) return k;
    return 0;
}

ComplexPolynomial to_natural_units(const CircleFit& fit, double radius, int degree) {
    ComplexPolynomial poly;
    poly.coeffs.resize(degree + 1);
    const double s = fit.scale;
    for (int k = 0; k <= degree; ++k)
        poly.coeffs[k] = fit.scaled_coeffs[k] *
                         std::exp(s - k * std::log(radius));
    return poly;
}

std::vector<Complex> companion_roots(const std::vector<Complex>& coeffs) {
    const int deg = static_cast<int>(coeffs.size()) - 1;
    if (deg < 1) return {};
    if (deg == 1) return {-coeffs[0] / coeffs[1]};

    // rescale the variable by the Cauchy-style root bound so the companion
    // entries stay O(1) regardless of the coefficient span
    const double log_lead = std::log(std::abs(coeffs[deg]));
    double log_scale = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < deg; ++k) {
        if (coeffs[k] == Complex(0.0, 0.0)) continue;
        log_scale = std::max(log_scale,
                             (std::log(std::abs(coeffs[k])) - log_lead) / (deg - k));
    }
    if (!std::isfinite(log_scale)) return std::vector<Complex>(deg, Complex(0.0, 0.0));

    Matrix companion = Matrix::Zero(deg, deg);
    for (int i = 1; i < deg; ++i) companion(i, i - 1) = 1.0;
    for (int k = 0; k < deg; ++k) {
        if (coeffs[k] == Complex(0.0, 0.0)) continue;
        const double mag = std::log(std::abs(coeffs[k])) - log_lead +
                           (k - deg) * log_scale;
        companion(k, deg - 1) =
            -(coeffs[k] / std::abs(coeffs[k])) * std::exp(mag) /
            (coeffs[deg] / std::abs(coeffs[deg]));
    }
    EigenSet eig = eigenvalues(companion);
    const double scale = std::exp(log_scale);
    for (Complex& r : eig.values) r *= scale;
    return eig.values;
}

} // namespace

DiscriminantFit discriminant_polynomial(const ModelOperators& ops, const FitOptions& opt) {
    const int n = ops.dim();
    const int nmax = n * (n - 1);
    if (nmax == 0) {
        // single basis state: empty product, D == 1
        DiscriminantFit fit;
        fit.poly.coeffs = {Complex(1.0, 0.0)};
        fit.radius = opt.initial_radius;
        fit.sample_scale = 1.0;
        return fit;
    }
    if (opt.samples <= nmax)
        throw InvalidSpec("discriminant_polynomial: need more samples than n(n-1)");

    double radius = opt.initial_radius;
    CircleFit fit = fit_circle(ops, radius, opt.samples);
    int deg = trim_degree(fit.scaled_coeffs, nmax, opt.trim_rel);

    for (int it = 0; it < opt.max_radius_iters; ++it) {
        if (deg < 1) break;
        const ComplexPolynomial poly = to_natural_units(fit, radius, deg);
        double max_root = 0.0;
        for (const Complex& r : companion_roots(poly.coeffs))
            max_root = std::max(max_root, std::abs(r));
        const double next =
            std::clamp(2.0 * max_root, opt.min_radius, opt.max_radius);
        if (next >= 0.6 * radius && next <= 1.6 * radius) break;
        radius = next;
        fit = fit_circle(ops, radius, opt.samples);
        deg = trim_degree(fit.scaled_coeffs, nmax, opt.trim_rel);
    }

    DiscriminantFit out;
    out.poly = to_natural_units(fit, radius, deg);
    out.radius = radius;
    out.sample_scale = std::exp(fit.scale);

    // Self-check on off-grid points of the sample circle.
    const int probes = 7;
    for (int s = 0; s < probes; ++s) {
        const double theta = 2.0 * kPi * (s + 0.391) / probes;
        const Complex g = radius * Complex(std::cos(theta), std::sin(theta));
        const DiscriminantValue d = discriminant_at(ops, g);
        const double err = std::abs(out.poly.eval(g) - d.value);
        if (err > 1e-6 * std::max(std::abs(d.value), out.sample_scale))
            throw IllConditioned("discriminant_polynomial: coefficient solve residual above 1e-6");
    }
    return out;
}

ComplexPolynomial discriminant_polynomial(const ModelSpec& spec) {
    return discriminant_polynomial(ModelOperators(spec)).poly;
}

std::vector<Complex> polynomial_roots(const ComplexPolynomial& poly) {
    if (poly.degree() < 1)
        throw PreconditionViolated("polynomial_roots: degree must be >= 1");
    std::vector<Complex> roots = companion_roots(poly.coeffs);
    for (Complex& g : roots) {
        for (int it = 0; it < 50; ++it) {
            const Complex value = poly.eval(g);
            if (std::abs(value) < 1e-12 * poly.eval_scale(g)) break;
            const Complex der = poly.derivative(g);
            if (der == Complex(0.0, 0.0)) break;
            g -= value / der;
        }
    }
    return roots;
}

int winding_count(const ModelOperators& ops, Complex center, double radius) {
    // Track the phase of D along the circle, subdividing until each step's
    // change is below pi/2; the accumulated change is 2 pi * (root count).
    struct Node {
        double theta;
        double phase;
        double log_mag;
    };

    for (int attempt = 0; attempt < 3; ++attempt) {
        const double r = radius * (1.0 + attempt * 0.013);
        std::vector<Node> nodes;
        const int base = 64;
        nodes.reserve(base + 1);
        for (int s = 0; s <= base; ++s) {
            const double theta = 2.0 * kPi * s / base;
            const Complex g =
                center + r * Complex(std::cos(theta), std::sin(theta));
            const DiscriminantValue d = discriminant_at(ops, g);
            nodes.push_back({theta, d.phase, d.log_magnitude});
        }
        bool ok = true;
        std::size_t budget = 1 << 16;
        for (std::size_t i = 0; i + 1 < nodes.size() && ok;) {
            const double dphi =
                std::remainder(nodes[i + 1].phase - nodes[i].phase, 2.0 * kPi);
            if (std::abs(dphi) <= 0.5 * kPi) {
                ++i;
                continue;
            }
            if (nodes.size() >= budget || nodes[i + 1].theta - nodes[i].theta < 1e-12) {
                ok = false;  // likely a root on (or hugging) the contour
                break;
            }
            const double mid = 0.5 * (nodes[i].theta + nodes[i + 1].theta);
            const Complex g = center + r * Complex(std::cos(mid), std::sin(mid));
            const DiscriminantValue d = discriminant_at(ops, g);
            nodes.insert(nodes.begin() + i + 1, {mid, d.phase, d.log_magnitude});
        }
        if (!ok) continue;
        double total = 0.0;
        for (std::size_t i = 0; i + 1 < nodes.size(); ++i)
            total += std::remainder(nodes[i + 1].phase - nodes[i].phase, 2.0 * kPi);
        const double count = total / (2.0 * kPi);
        const long rounded = std::lround(count);
        if (std::abs(count - rounded) < 0.05 && rounded >= 0)
            return static_cast<int>(rounded);
    }
    throw ConvergenceFailure("winding_count: phase tracking did not settle");
}

int total_root_count(const ModelOperators& ops) {
    return winding_count(ops, Complex(0.0, 0.0), 1e8);
}

} // namespace epscan
