#include "epscan/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace epscan {

int ModelSpec::total_capacity() const {
    int cap = 0;
    for (int w : omega) cap += w / 2;
    return cap;
}

void ModelSpec::validate() const {
    if (levels() < 2)
        throw InvalidSpec("ModelSpec: need at least 2 levels");
    if (epsilon.size() != omega.size())
        throw InvalidSpec("ModelSpec: omega/epsilon length mismatch");
    for (int w : omega)
        if (w <= 0 || w % 2 != 0)
            throw InvalidSpec("ModelSpec: every omega_j must be a positive even integer");
    if (pairs < 1)
        throw InvalidSpec("ModelSpec: pair number must be >= 1");
    if (pairs > total_capacity())
        throw InvalidSpec("ModelSpec: pair number exceeds total capacity");
    if (zeta < 0.0 || zeta > 1.0)
        throw InvalidSpec("ModelSpec: zeta must lie in [0, 1]");
    for (std::size_t i = 0; i < epsilon.size(); ++i)
        for (std::size_t j = i + 1; j < epsilon.size(); ++j)
            if (epsilon[i] == epsilon[j])
                throw DegenerateEpsilon("ModelSpec: single-particle energies must be pairwise distinct");
}

bool ModelSpec::q_available() const {
    return levels() == 3 && epsilon[0] == 0.0 && epsilon[1] != 0.0 && epsilon[2] != 0.0;
}

ModelSpec benchmark_spec(double eps3, double zeta) {
    ModelSpec spec;
    spec.omega = {6, 4, 2};
    spec.epsilon = {0.0, 1.0, eps3};
    spec.pairs = 4;
    spec.zeta = zeta;
    return spec;
}

int PairBasis::index_of(const std::vector<int>& state) const {
    auto it = std::lower_bound(states.begin(), states.end(), state);
    if (it == states.end() || *it != state) return -1;
    return static_cast<int>(it - states.begin());
}

namespace {

// All occupation vectors with per-level caps, ascending lexicographic order.
std::vector<std::vector<int>> enumerate_occupations(const std::vector<int>& caps,
                                                    int fixed_total /* -1 = all */) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur(caps.size(), 0);
    const int L = static_cast<int>(caps.size());
    while (true) {
        if (fixed_total < 0 ||
            std::accumulate(cur.begin(), cur.end(), 0) == fixed_total)
            out.push_back(cur);
        int j = L - 1;
        while (j >= 0 && cur[j] == caps[j]) cur[j--] = 0;
        if (j < 0) break;
        ++cur[j];
    }
    return out;
}

} // namespace

PairBasis enumerate_basis(const ModelSpec& spec) {
    spec.validate();
    std::vector<int> caps(spec.levels());
    for (int j = 0; j < spec.levels(); ++j) caps[j] = spec.capacity(j);
    PairBasis basis;
    basis.states = enumerate_occupations(caps, spec.pairs);
    return basis;
}

PairOperators build_pair_operators(const ModelSpec& spec, const PairBasis& basis) {
    spec.validate();
    const PairBasis expected = enumerate_basis(spec);
    if (basis.states != expected.states)
        throw DimensionMismatch("build_pair_operators: basis inconsistent with spec");

    std::vector<int> caps(spec.levels());
    for (int j = 0; j < spec.levels(); ++j) caps[j] = spec.capacity(j);

    PairOperators ops;
    ops.full_states = enumerate_occupations(caps, -1);
    const int n = ops.full_dim();
    const int L = spec.levels();

    // Mixed-radix index: lexicographic order is plain counting.
    std::vector<long> stride(L, 1);
    for (int j = L - 2; j >= 0; --j) stride[j] = stride[j + 1] * (caps[j + 1] + 1);
    auto index = [&](const std::vector<int>& s) {
        long idx = 0;
        for (int j = 0; j < L; ++j) idx += s[j] * stride[j];
        return static_cast<int>(idx);
    };

    ops.raising.assign(L, RealMatrix::Zero(n, n));
    ops.lowering.assign(L, RealMatrix::Zero(n, n));
    ops.number.assign(L, RealMatrix::Zero(n, n));

    for (int i = 0; i < n; ++i) {
        const auto& s = ops.full_states[i];
        for (int j = 0; j < L; ++j) {
            ops.number[j](i, i) = 2.0 * s[j];
            if (s[j] < caps[j]) {
                std::vector<int> t = s;
                ++t[j];
                const double amp = 2.0 * std::sqrt((caps[j] - s[j]) * (s[j] + 1.0));
                ops.raising[j](index(t), i) = amp;
            }
        }
    }
    for (int j = 0; j < L; ++j) ops.lowering[j] = ops.raising[j].transpose();
    return ops;
}

namespace {

RealMatrix restrict_to_block(const RealMatrix& full,
                             const std::vector<int>& block_indices) {
    const int n = static_cast<int>(block_indices.size());
    RealMatrix out(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            out(a, b) = full(block_indices[a], block_indices[b]);
    return out;
}

} // namespace

ModelOperators::ModelOperators(const ModelSpec& spec)
    : spec_(spec), basis_(enumerate_basis(spec)) {
    const PairOperators ops = build_pair_operators(spec_, basis_);
    const int L = spec_.levels();
    const int nf = ops.full_dim();

    // Indices of the P-pair block inside the full occupation space.
    std::vector<int> block;
    block.reserve(basis_.dim());
    for (int i = 0; i < nf; ++i) {
        int total = std::accumulate(ops.full_states[i].begin(), ops.full_states[i].end(), 0);
        if (total == spec_.pairs) block.push_back(i);
    }

    // Hamiltonian pencil: H0 = sum eps_j N_j, H1 = zeta sum_ij A†_i A_j - (1-zeta) sum N_j^2.
    RealMatrix h0 = RealMatrix::Zero(nf, nf);
    for (int j = 0; j < L; ++j) h0 += spec_.epsilon[j] * ops.number[j];
    RealMatrix pair_sum = RealMatrix::Zero(nf, nf);
    for (int i = 0; i < L; ++i)
        for (int j = 0; j < L; ++j)
            pair_sum += ops.raising[i] * ops.lowering[j];
    RealMatrix nsq = RealMatrix::Zero(nf, nf);
    for (int j = 0; j < L; ++j) nsq += ops.number[j] * ops.number[j];
    hamiltonian_.constant = restrict_to_block(h0, block);
    hamiltonian_.slope = restrict_to_block(spec_.zeta * pair_sum - (1.0 - spec_.zeta) * nsq, block);

    // Quasispin blocks K0 = N/2 - omega/4, K± = A†/2, A/2.
    std::vector<RealMatrix> k0(L), kp(L), km(L);
    for (int j = 0; j < L; ++j) {
        k0[j] = 0.5 * ops.number[j] - 0.25 * spec_.omega[j] * RealMatrix::Identity(nf, nf);
        kp[j] = 0.5 * ops.raising[j];
        km[j] = 0.5 * ops.lowering[j];
    }

    iom_.resize(L);
    for (int l = 0; l < L; ++l) {
        RealMatrix slope = RealMatrix::Zero(nf, nf);
        for (int m = 0; m < L; ++m) {
            if (m == l) continue;
            const double denom = spec_.epsilon[l] - spec_.epsilon[m];
            if (denom == 0.0)
                throw DegenerateEpsilon("integral of motion: coinciding single-particle energies");
            slope += (4.0 / denom) *
                     (0.5 * (kp[l] * km[m] + km[l] * kp[m]) + k0[l] * k0[m]);
        }
        iom_[l].constant = restrict_to_block(k0[l], block);
        iom_[l].slope = restrict_to_block(slope, block);
    }

    if (spec_.q_available()) {
        const double o1 = spec_.omega[0], o2 = spec_.omega[1], o3 = spec_.omega[2];
        const double e2 = spec_.epsilon[1], e3 = spec_.epsilon[2];
        RealMatrix q0 = 0.5 * ops.number[0];
        RealMatrix q1 = (o2 / e2 + o3 / e3) * 0.5 * ops.number[0]
                      + (o1 / e2) * 0.5 * ops.number[1]
                      + (o1 / e3) * 0.5 * ops.number[2]
                      - (1.0 / e2) * (0.5 * (ops.raising[0] * ops.lowering[1] +
                                             ops.raising[1] * ops.lowering[0]) +
                                      ops.number[0] * ops.number[1])
                      - (1.0 / e3) * (0.5 * (ops.raising[0] * ops.lowering[2] +
                                             ops.raising[2] * ops.lowering[0]) +
                                      ops.number[0] * ops.number[2]);
        OperatorPencil q;
        q.constant = restrict_to_block(q0, block);
        q.slope = restrict_to_block(q1, block);
        q_ = std::move(q);
    }
}

Matrix ModelOperators::integral_of_motion(Complex g, int level) const {
    if (level < 0 || level >= spec_.levels())
        throw DimensionMismatch("integral_of_motion: level index out of range");
    return iom_[level].at(g);
}

Matrix ModelOperators::q_invariant(Complex g) const {
    if (!q_)
        throw PreconditionViolated("q_invariant: requires 3 levels with epsilon_1 = 0");
    return q_->at(g);
}

Matrix ModelOperators::number_operator() const {
    return 2.0 * static_cast<double>(spec_.pairs) * Matrix::Identity(dim(), dim());
}

Matrix build_hamiltonian(const ModelSpec& spec, Complex g) {
    return ModelOperators(spec).hamiltonian(g);
}

Matrix build_iom(const ModelSpec& spec, Complex g, int level) {
    return ModelOperators(spec).integral_of_motion(g, level);
}

Matrix build_q_invariant(const ModelSpec& spec, Complex g) {
    return ModelOperators(spec).q_invariant(g);
}

namespace {

double rel_commutator_residual(const Matrix& a, const Matrix& b) {
    const double scale = a.norm() * b.norm();
    if (scale == 0.0) return 0.0;
    return (a * b - b * a).norm() / scale;
}

} // namespace

IdentityReport verify_identities(const ModelSpec& spec,
                                 const std::vector<Complex>& g_samples,
                                 double tol) {
    spec.validate();
    const ModelOperators ops(spec);
    const int L = spec.levels();
    const int n = ops.dim();

    IdentityReport report;
    report.sample_count = static_cast<int>(g_samples.size());

    auto add = [&](const std::string& name) {
        report.checks.push_back({name, 0.0, tol, true});
        return report.checks.size() - 1;
    };
    auto record = [&](std::size_t idx, double value) {
        report.checks[idx].max_rel_residual =
            std::max(report.checks[idx].max_rel_residual, value);
    };

    std::vector<std::size_t> rr, hr;
    for (int i = 0; i < L; ++i)
        for (int j = i + 1; j < L; ++j)
            rr.push_back(add("[R" + std::to_string(i + 1) + ",R" + std::to_string(j + 1) + "]"));
    for (int l = 0; l < L; ++l)
        hr.push_back(add("[H,R" + std::to_string(l + 1) + "]"));
    const std::size_t hq = ops.q_available() ? add("[H,Q]") : static_cast<std::size_t>(-1);
    const std::size_t hsum = add("H-2*sum(eps*R)-C");
    const std::size_t nsum = add("2*sum(R)+sum(omega)/2-N");

    const Matrix number = ops.number_operator();
    double omega_half = 0.0;
    for (int w : spec.omega) omega_half += 0.5 * w;

    for (Complex g : g_samples) {
        const Matrix h = ops.hamiltonian(g);
        std::vector<Matrix> r(L);
        for (int l = 0; l < L; ++l) r[l] = ops.integral_of_motion(g, l);

        std::size_t k = 0;
        for (int i = 0; i < L; ++i)
            for (int j = i + 1; j < L; ++j)
                record(rr[k++], rel_commutator_residual(r[i], r[j]));
        for (int l = 0; l < L; ++l)
            record(hr[l], rel_commutator_residual(h, r[l]));
        if (hq != static_cast<std::size_t>(-1)) {
            const Matrix q = ops.q_invariant(g);
            record(hq, rel_commutator_residual(h, q));
        }

        Matrix diff = h;
        for (int l = 0; l < L; ++l)
            diff -= 2.0 * spec.epsilon[l] * r[l];
        const Complex c_fit = diff.trace() / static_cast<double>(n);
        diff -= c_fit * Matrix::Identity(n, n);
        record(hsum, diff.norm() / std::max(h.norm(), 1.0));
        report.fitted_constant = c_fit;

        Matrix nid = -number;
        for (int l = 0; l < L; ++l) nid += 2.0 * r[l];
        nid += omega_half * Matrix::Identity(n, n);
        record(nsum, nid.norm() / number.norm());
    }

    report.all_pass = true;
    for (auto& check : report.checks) {
        check.pass = check.max_rel_residual < check.tol;
        report.all_pass = report.all_pass && check.pass;
    }
    return report;
}

} // namespace epscan
