#pragma once

#include <string>
#include <vector>

#include "epscan/degeneracy.hpp"

namespace epscan {

// ---------------------------------------------------------------------------
// Parameter sweeps: track degeneracies across a one-parameter family,
// matching clusters between steps, detecting collisions/splits and
// escape/entry through the escape radius, with adaptive step control.
// ---------------------------------------------------------------------------

enum class SweepParameter { epsilon3, zeta };
const char* to_string(SweepParameter p);

struct SweepPlan {
    ModelSpec base;
    SweepParameter parameter = SweepParameter::zeta;
    double start = 1.0;
    double end = 0.0;
    double initial_step = 0.02;
    double min_step = 1e-6;
    double max_displacement = 0.1;  // per-step cap on |dg|, scaled by (1 + |g|)
    double escape_radius = 1e3;
    PipelineOptions pipeline;       // classification runs in light mode by default

    void validate() const;          // throws InvalidSpec
    ModelSpec spec_at(double value) const;
};

enum class EventType { collision, split, escape_to_infinity, entry_from_infinity };
const char* to_string(EventType t);

struct TrajectoryEvent {
    EventType type;
    double parameter = 0.0;
    Complex location{0.0, 0.0};
    int trajectory = -1;
};

struct TrajectoryPoint {
    double parameter = 0.0;
    Complex g{0.0, 0.0};
    int multiplicity = 1;
    DegeneracyKind kind = DegeneracyKind::unclassified;
};

struct Trajectory {
    int id = -1;
    std::vector<TrajectoryPoint> points;
    bool active = true;
    bool born_outside = false;   // first seen beyond the escape radius
    bool entered = false;
    bool escaped = false;
};

struct SweepStep {
    double parameter = 0.0;
    int degree = 0;
    int beyond_horizon = 0;
    int located_mult_sum = 0;
};

struct SweepResult {
    SweepPlan plan;
    std::vector<Trajectory> trajectories;
    std::vector<SweepStep> steps;
    std::vector<TrajectoryEvent> events;

    int count_events(EventType t) const;
};

// Throws StepUnderflow if the displacement cap cannot be honored at min_step.
SweepResult run_sweep(const SweepPlan& plan);

// Bisection on the collision indicator (two real separated double roots above
// the critical energy, a complex-conjugate pair below) until the bracket is
// narrower than `width`. Requires zeta = 1. Throws BracketInvalid when the
// indicator does not change sign across the bracket.
double locate_critical_epsilon3(const ModelSpec& spec, double lo, double hi,
                                double width = 1e-5);

struct AsymptoticRow {
    double eps3 = 0.0;
    double crossing_negative = 0.0;  // Re g of the crossing on the negative axis
    double crossing_positive = 0.0;
    int ep_count = 0;
};

struct AsymptoticReport {
    std::vector<AsymptoticRow> rows;
    bool separations_grow = true;    // |Re g| strictly increasing on both sides
    bool signs_split = true;         // one crossing each side of g = 0
};

// Requires zeta = 1 and ascending eps3 values.
AsymptoticReport asymptotic_check(const ModelSpec& spec,
                                  const std::vector<double>& eps3_values);

// Named plans: "fig1" (eps3 sweep at zeta=1, 6 -> 1.2) and "fig2a"/"fig2b"/
// "fig2c" (zeta sweeps 1 -> 0 at eps3 = 7/3, 1.8499, 3/2).
SweepPlan preset_plan(const std::string& name);
std::vector<std::string> preset_names();

} // namespace epscan
