#include "epscan/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "epscan/assignment.hpp"

namespace epscan {

const char* to_string(SweepParameter p) {
    return p == SweepParameter::epsilon3 ? "epsilon3" : "zeta";
}

const char* to_string(EventType t) {
    switch (t) {
        case EventType::collision: return "collision";
        case EventType::split: return "split";
        case EventType::escape_to_infinity: return "escape-to-infinity";
        case EventType::entry_from_infinity: return "entry-from-infinity";
    }
    return "";
}

void SweepPlan::validate() const {
    base.validate();
    if (start == end)
        throw InvalidSpec("SweepPlan: start and end must differ");
    if (min_step <= 0.0 || initial_step < min_step)
        throw InvalidSpec("SweepPlan: need initial_step >= min_step > 0");
    if (max_displacement <= 0.0 || escape_radius <= 0.0)
        throw InvalidSpec("SweepPlan: displacement cap and escape radius must be positive");
    if (parameter == SweepParameter::epsilon3 && base.levels() != 3)
        throw InvalidSpec("SweepPlan: epsilon3 sweeps require a 3-level model");
    if (parameter == SweepParameter::zeta &&
        (std::min(start, end) < 0.0 || std::max(start, end) > 1.0))
        throw InvalidSpec("SweepPlan: zeta range must stay inside [0, 1]");
}

ModelSpec SweepPlan::spec_at(double value) const {
    ModelSpec spec = base;
    if (parameter == SweepParameter::epsilon3)
        spec.epsilon[2] = value;
    else
        spec.zeta = value;
    return spec;
}

int SweepResult::count_events(EventType t) const {
    int n = 0;
    for (const TrajectoryEvent& e : events)
        if (e.type == t) ++n;
    return n;
}

namespace {

struct Head {
    int trajectory;
    Complex g;
    int multiplicity;
};

double effective_cap(const SweepPlan& plan, double magnitude) {
    return plan.max_displacement * (1.0 + magnitude);
}

bool is_real_location(Complex g, double tol = 1e-6) {
    return std::abs(g.imag()) < tol;
}

} // namespace

SweepResult run_sweep(const SweepPlan& plan) {
    plan.validate();

    SweepResult result;
    result.plan = plan;

    PipelineOptions pipe = plan.pipeline;
    pipe.search.escape_radius = plan.escape_radius;

    auto compute = [&](double value) {
        return compute_degeneracies(plan.spec_at(value), pipe);
    };
    auto log_step = [&](double value, const DegeneracySet& set) {
        result.steps.push_back(
            {value, set.degree, set.beyond_horizon, set.total_root_count()});
    };

    const double dir = plan.end > plan.start ? 1.0 : -1.0;
    double param = plan.start;
    DegeneracySet current = compute(param);
    log_step(param, current);

    auto new_trajectory = [&](double value, const Degeneracy& d) -> Trajectory& {
        Trajectory traj;
        traj.id = static_cast<int>(result.trajectories.size());
        traj.points.push_back({value, d.location, d.multiplicity, d.kind});
        traj.born_outside = std::abs(d.location) > plan.escape_radius;
        result.trajectories.push_back(std::move(traj));
        return result.trajectories.back();
    };

    std::vector<int> head_of_cluster;  // trajectory id per cluster of `current`
    for (const Degeneracy& d : current.degeneracies)
        head_of_cluster.push_back(new_trajectory(param, d).id);

    double step = plan.initial_step;
    const double underflow_step = plan.min_step * (1.0 + 1e-12);

    while (std::abs(plan.end - param) > 1e-15) {
        const double h = std::min(step, std::abs(plan.end - param));
        const double trial = (std::abs(plan.end - param) <= step)
                                 ? plan.end
                                 : param + dir * h;
        const DegeneracySet next = compute(trial);

        // --- match active heads to the new clusters ---
        std::vector<Head> heads;
        for (std::size_t c = 0; c < current.degeneracies.size(); ++c)
            if (result.trajectories[head_of_cluster[c]].active)
                heads.push_back({head_of_cluster[c],
                                 current.degeneracies[c].location,
                                 current.degeneracies[c].multiplicity});

        const int na = static_cast<int>(heads.size());
        const int nb = static_cast<int>(next.degeneracies.size());
        const int dim = na + nb;
        const double kUnmatched = 1e12, kForbidden = 1e18;
        RealMatrix cost = RealMatrix::Constant(dim, dim, 0.0);
        cost.topLeftCorner(na, nb).setConstant(kForbidden);
        cost.topRightCorner(na, na).setConstant(kForbidden);
        cost.bottomLeftCorner(nb, nb).setConstant(kForbidden);
        for (int i = 0; i < na; ++i) cost(i, nb + i) = kUnmatched;
        for (int j = 0; j < nb; ++j) cost(na + j, j) = kUnmatched;
        for (int i = 0; i < na; ++i)
            for (int j = 0; j < nb; ++j) {
                const Complex nloc = next.degeneracies[j].location;
                const double d = std::abs(heads[i].g - nloc);
                const double cap = effective_cap(
                    plan, std::min(std::abs(heads[i].g), std::abs(nloc)));
                if (d <= 6.0 * cap) cost(i, j) = d * d;
            }
        const std::vector<int> match = min_cost_assignment(cost);

        std::vector<int> cluster_of_head(na, -1);
        std::vector<int> head_of_new(nb, -1);
        for (int i = 0; i < na; ++i)
            if (match[i] < nb) {
                cluster_of_head[i] = match[i];
                head_of_new[match[i]] = i;
            }

        // --- step control ---
        bool refine = false;
        bool displacement_violation = false;
        for (int i = 0; i < na && !refine; ++i) {
            if (cluster_of_head[i] < 0) continue;
            const Complex nloc = next.degeneracies[cluster_of_head[i]].location;
            const double cap = effective_cap(
                plan, std::min(std::abs(heads[i].g), std::abs(nloc)));
            if (std::abs(heads[i].g - nloc) > cap) {
                refine = true;
                displacement_violation = true;
            }
        }
        auto assoc_radius = [&](double magnitude) {
            return 1.5 * effective_cap(plan, magnitude);
        };
        // unexplained appearances / disappearances force refinement too
        std::vector<int> split_parent(nb, -1);
        for (int j = 0; j < nb && !refine; ++j) {
            if (head_of_new[j] >= 0) continue;
            const Complex nloc = next.degeneracies[j].location;
            if (std::abs(nloc) > plan.escape_radius) continue;  // born outside
            double best = std::numeric_limits<double>::infinity();
            for (int i = 0; i < na; ++i) {
                const double d = std::abs(heads[i].g - nloc);
                if (d < best) {
                    best = d;
                    split_parent[j] = i;
                }
            }
            if (!(split_parent[j] >= 0 && best <= assoc_radius(std::abs(nloc))))
                refine = true;
        }
        std::vector<int> merge_target(na, -1);
        for (int i = 0; i < na && !refine; ++i) {
            if (cluster_of_head[i] >= 0) continue;
            if (std::abs(heads[i].g) > 0.5 * plan.escape_radius) continue;  // leaving
            double best = std::numeric_limits<double>::infinity();
            for (int j = 0; j < nb; ++j) {
                const double d =
                    std::abs(heads[i].g - next.degeneracies[j].location);
                if (d < best) {
                    best = d;
                    merge_target[i] = j;
                }
            }
            if (!(merge_target[i] >= 0 &&
                  best <= assoc_radius(std::abs(heads[i].g))))
                refine = true;
        }

        if (refine && h > underflow_step) {
            step = std::max(0.5 * h, plan.min_step);
            continue;
        }
        if (displacement_violation && h <= underflow_step)
            throw StepUnderflow("run_sweep: displacement cap violated at min_step, parameter = " +
                                std::to_string(trial));

        // --- commit the step ---
        // recompute association targets in case refinement was skipped at min_step
        for (int j = 0; j < nb; ++j) {
            if (head_of_new[j] >= 0 || split_parent[j] >= 0) continue;
            double best = std::numeric_limits<double>::infinity();
            int arg = -1;
            for (int i = 0; i < na; ++i) {
                const double d =
                    std::abs(heads[i].g - next.degeneracies[j].location);
                if (d < best) {
                    best = d;
                    arg = i;
                }
            }
            if (arg >= 0 &&
                best <= assoc_radius(std::abs(next.degeneracies[j].location)))
                split_parent[j] = arg;
        }

        std::vector<int> next_head_of_cluster(nb, -1);

        for (int i = 0; i < na; ++i) {
            Trajectory& traj = result.trajectories[heads[i].trajectory];
            if (cluster_of_head[i] >= 0) {
                const Degeneracy& d = next.degeneracies[cluster_of_head[i]];
                const double mag_old = std::abs(heads[i].g);
                const double mag_new = std::abs(d.location);
                traj.points.push_back({trial, d.location, d.multiplicity, d.kind});
                next_head_of_cluster[cluster_of_head[i]] = traj.id;
                if (mag_old > plan.escape_radius && mag_new <= plan.escape_radius &&
                    !traj.entered) {
                    traj.entered = true;
                    result.events.push_back({EventType::entry_from_infinity, trial,
                                             d.location, traj.id});
                }
                if (mag_old <= plan.escape_radius && mag_new > plan.escape_radius &&
                    !traj.escaped) {
                    traj.escaped = true;
                    result.events.push_back({EventType::escape_to_infinity, trial,
                                             d.location, traj.id});
                }
            } else {
                // trajectory ends here: merge into a surviving cluster, or leave
                traj.active = false;
                if (merge_target[i] >= 0) {
                    result.events.push_back(
                        {EventType::collision, trial,
                         next.degeneracies[merge_target[i]].location, traj.id});
                } else if (std::abs(heads[i].g) > 0.5 * plan.escape_radius &&
                           !traj.escaped) {
                    bool growing = true;
                    const auto& pts = traj.points;
                    const std::size_t np = pts.size();
                    for (std::size_t k = np >= 3 ? np - 3 : 0; k + 1 < np; ++k)
                        growing = growing &&
                                  std::abs(pts[k + 1].g) > std::abs(pts[k].g);
                    if (growing)
                        result.events.push_back({EventType::escape_to_infinity,
                                                 trial, heads[i].g, traj.id});
                }
            }
        }

        for (int j = 0; j < nb; ++j) {
            if (next_head_of_cluster[j] >= 0) continue;
            Trajectory& traj = new_trajectory(trial, next.degeneracies[j]);
            next_head_of_cluster[j] = traj.id;
            if (split_parent[j] >= 0)
                result.events.push_back({EventType::split, trial,
                                         next.degeneracies[j].location, traj.id});
        }

        // collision-and-scatter through the real axis: a close pair of real
        // multiple roots turning into a conjugate pair (or back) between steps
        for (int i = 0; i < na; ++i) {
            if (cluster_of_head[i] < 0 || heads[i].multiplicity < 2) continue;
            for (int k = i + 1; k < na; ++k) {
                if (cluster_of_head[k] < 0 || heads[k].multiplicity < 2) continue;
                const Complex oi = heads[i].g, ok = heads[k].g;
                const Complex ni = next.degeneracies[cluster_of_head[i]].location;
                const Complex nk = next.degeneracies[cluster_of_head[k]].location;
                if (std::abs(oi - ok) > 4.0 * effective_cap(plan, std::abs(oi)))
                    continue;
                const bool was_real = is_real_location(oi) && is_real_location(ok);
                const bool now_conj = !is_real_location(ni) && !is_real_location(nk) &&
                                      std::abs(ni - std::conj(nk)) <
                                          1e-6 * (1.0 + std::abs(ni));
                const bool was_conj = !is_real_location(oi) && !is_real_location(ok) &&
                                      std::abs(oi - std::conj(ok)) <
                                          1e-6 * (1.0 + std::abs(oi));
                const bool now_real = is_real_location(ni) && is_real_location(nk);
                if ((was_real && now_conj) || (was_conj && now_real)) {
                    const double mid = 0.5 * (param + trial);
                    const Complex loc = 0.25 * (oi + ok + ni + nk);
                    result.events.push_back({EventType::collision, mid, loc,
                                             heads[i].trajectory});
                    result.events.push_back({EventType::split, mid, loc,
                                             heads[k].trajectory});
                }
            }
        }

        current = next;
        head_of_cluster = next_head_of_cluster;
        param = trial;
        log_step(param, current);
        step = std::min(step * 1.6, plan.initial_step);
    }

    return result;
}

// ---------------------------------------------------------------------------

namespace {

// True when the two multiple roots sit on the real axis, separated: the
// pre-collision side of the critical energy.
bool crossings_real_separated(const ModelSpec& spec, const PipelineOptions& pipe) {
    const DegeneracySet set = compute_degeneracies(spec, pipe);
    int real_multi = 0;
    for (const Degeneracy& d : set.degeneracies)
        if (d.multiplicity >= 2 && is_real_location(d.location)) ++real_multi;
    return real_multi >= 2;
}

} // namespace

double locate_critical_epsilon3(const ModelSpec& spec, double lo, double hi,
                                double width) {
    spec.validate();
    if (spec.zeta != 1.0)
        throw PreconditionViolated("locate_critical_epsilon3: requires zeta = 1");
    if (spec.levels() != 3)
        throw PreconditionViolated("locate_critical_epsilon3: requires a 3-level model");
    if (!(lo < hi))
        throw BracketInvalid("locate_critical_epsilon3: empty bracket");

    PipelineOptions pipe;
    pipe.classify.full_evidence = false;

    auto indicator = [&](double e3) {
        ModelSpec s = spec;
        s.epsilon[2] = e3;
        return crossings_real_separated(s, pipe);
    };

    const bool at_lo = indicator(lo);
    const bool at_hi = indicator(hi);
    if (at_lo == at_hi)
        throw BracketInvalid(
            "locate_critical_epsilon3: no collision inside the bracket");

    while (hi - lo > width) {
        const double mid = 0.5 * (lo + hi);
        if (indicator(mid) == at_hi)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

AsymptoticReport asymptotic_check(const ModelSpec& spec,
                                  const std::vector<double>& eps3_values) {
    spec.validate();
    if (spec.zeta != 1.0)
        throw PreconditionViolated("asymptotic_check: requires zeta = 1");

    PipelineOptions pipe;
    pipe.classify.full_evidence = false;

    AsymptoticReport report;
    for (double e3 : eps3_values) {
        ModelSpec s = spec;
        s.epsilon[2] = e3;
        const DegeneracySet set = compute_degeneracies(s, pipe);
        AsymptoticRow row;
        row.eps3 = e3;
        row.ep_count = 0;
        double neg = 0.0, pos = 0.0;
        for (const Degeneracy& d : set.degeneracies) {
            if (d.multiplicity == 1) {
                ++row.ep_count;
            } else if (is_real_location(d.location)) {
                if (d.location.real() < 0.0) neg = d.location.real();
                else pos = d.location.real();
            }
        }
        row.crossing_negative = neg;
        row.crossing_positive = pos;
        report.rows.push_back(row);
    }

    for (std::size_t k = 0; k + 1 < report.rows.size(); ++k) {
        const auto& a = report.rows[k];
        const auto& b = report.rows[k + 1];
        if (!(std::abs(b.crossing_negative) > std::abs(a.crossing_negative) &&
              std::abs(b.crossing_positive) > std::abs(a.crossing_positive)))
            report.separations_grow = false;
    }
    for (const auto& row : report.rows)
        if (!(row.crossing_negative < 0.0 && row.crossing_positive > 0.0))
            report.signs_split = false;
    return report;
}

SweepPlan preset_plan(const std::string& name) {
    SweepPlan plan;
    plan.pipeline.classify.full_evidence = false;
    if (name == "fig1") {
        plan.base = benchmark_spec(6.0, 1.0);
        plan.parameter = SweepParameter::epsilon3;
        plan.start = 6.0;
        plan.end = 1.2;
        plan.initial_step = 0.05;
        plan.min_step = 1e-6;
        return plan;
    }
    double eps3 = 0.0;
    if (name == "fig2a") eps3 = 7.0 / 3.0;
    else if (name == "fig2b") eps3 = 1.8499;
    else if (name == "fig2c") eps3 = 1.5;
    else throw InvalidSpec("preset_plan: unknown preset '" + name + "'");
    plan.base = benchmark_spec(eps3, 1.0);
    plan.parameter = SweepParameter::zeta;
    plan.start = 1.0;
    plan.end = 0.0;
    plan.initial_step = 0.02;
    plan.min_step = 1e-7;
    return plan;
}

std::vector<std::string> preset_names() {
    return {"fig1", "fig2a", "fig2b", "fig2c"};
}

} // namespace epscan
