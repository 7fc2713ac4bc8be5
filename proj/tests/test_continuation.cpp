#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "epscan/continuation.hpp"

using namespace epscan;

TEST_CASE("sweep plan validation") {
    SweepPlan plan = preset_plan("fig2a");
    CHECK_NOTHROW(plan.validate());

    plan.start = plan.end;
    CHECK_THROWS_AS(plan.validate(), InvalidSpec);

    plan = preset_plan("fig2a");
    plan.min_step = 0.0;
    CHECK_THROWS_AS(plan.validate(), InvalidSpec);

    plan = preset_plan("fig2a");
    plan.start = 1.4;  // outside [0, 1]
    CHECK_THROWS_AS(plan.validate(), InvalidSpec);

    CHECK_THROWS_AS(preset_plan("fig9"), InvalidSpec);
    CHECK(preset_names().size() == 4);
}

TEST_CASE("preset plans encode the three regimes") {
    CHECK(preset_plan("fig1").parameter == SweepParameter::epsilon3);
    CHECK(preset_plan("fig2a").base.epsilon[2] == doctest::Approx(7.0 / 3.0));
    CHECK(preset_plan("fig2b").base.epsilon[2] == doctest::Approx(1.8499));
    CHECK(preset_plan("fig2c").base.epsilon[2] == doctest::Approx(1.5));
    for (const std::string& name : {"fig2a", "fig2b", "fig2c"}) {
        const SweepPlan p = preset_plan(name);
        CHECK(p.start == 1.0);
        CHECK(p.end == 0.0);
        CHECK(p.base.zeta == 1.0);
    }
}

TEST_CASE("critical point bisection") {
    const ModelSpec spec = benchmark_spec(7.0 / 3.0, 1.0);

    SUBCASE("bracket [1.5, 2.5] contains the collision") {
        const double cr = locate_critical_epsilon3(spec, 1.5, 2.5);
        CHECK(std::abs(cr - 1.8499) < 1e-3);   // reported value
        CHECK(std::abs(cr - 1.85052) < 5e-4);  // internally frozen location
    }

    SUBCASE("bracket [3, 4]: crossings real and separated throughout") {
        CHECK_THROWS_AS(locate_critical_epsilon3(spec, 3.0, 4.0), BracketInvalid);
    }

    SUBCASE("requires the pairing integrable limit") {
        CHECK_THROWS_AS(
            locate_critical_epsilon3(benchmark_spec(7.0 / 3.0, 0.5), 1.5, 2.5),
            PreconditionViolated);
    }
}

TEST_CASE("short zeta sweep: splits, conjugate symmetry, count conservation") {
    SweepPlan plan = preset_plan("fig2a");
    plan.start = 1.0;
    plan.end = 0.97;
    plan.min_step = 1e-4;  // stays away from the far-root regime
    const SweepResult result = run_sweep(plan);

    // each zeta=1 crossing breaks into an EP pair: two split events near the start
    CHECK(result.count_events(EventType::split) == 2);
    for (const TrajectoryEvent& e : result.events)
        if (e.type == EventType::split) CHECK(e.parameter > 0.97);

    // conjugate-symmetric trajectory sets at every step
    for (const SweepStep& s : result.steps) {
        std::vector<Complex> at_step;
        for (const Trajectory& t : result.trajectories)
            for (const TrajectoryPoint& p : t.points)
                if (p.parameter == s.parameter) at_step.push_back(p.g);
        for (const Complex& g : at_step) {
            double best = 1e9;
            for (const Complex& h : at_step)
                best = std::min(best, std::abs(std::conj(g) - h));
            CHECK(best < 1e-6);
        }
    }

    // located roots plus the beyond-horizon count always make up the degree
    for (const SweepStep& s : result.steps)
        CHECK(s.located_mult_sum + s.beyond_horizon == s.degree);
}

TEST_CASE("reversibility over a short range") {
    SweepPlan forward = preset_plan("fig2a");
    forward.start = 1.0;
    forward.end = 0.95;
    forward.min_step = 1e-4;
    SweepPlan backward = forward;
    backward.start = 0.95;
    backward.end = 1.0;

    const SweepResult f = run_sweep(forward);
    const SweepResult b = run_sweep(backward);

    auto endpoints = [](const SweepResult& r, double param) {
        std::vector<Complex> out;
        for (const Trajectory& t : r.trajectories)
            for (const TrajectoryPoint& p : t.points)
                if (p.parameter == param) out.push_back(p.g);
        std::sort(out.begin(), out.end(), [](Complex a, Complex b) {
            if (a.real() != b.real()) return a.real() < b.real();
            return a.imag() < b.imag();
        });
        return out;
    };

    for (double param : {1.0, 0.95}) {
        const auto fe = endpoints(f, param);
        const auto be = endpoints(b, param);
        REQUIRE(fe.size() == be.size());
        for (std::size_t i = 0; i < fe.size(); ++i)
            CHECK(std::abs(fe[i] - be[i]) < 1e-5);
    }
}

TEST_CASE("asymptotic decoupling of the third level") {
    const AsymptoticReport report =
        asymptotic_check(benchmark_spec(6.0, 1.0), {3.0, 6.0, 12.0});
    CHECK(report.separations_grow);
    CHECK(report.signs_split);
    for (const AsymptoticRow& row : report.rows) CHECK(row.ep_count == 12);

    // frozen reference positions
    CHECK(report.rows[0].crossing_negative == doctest::Approx(-0.3276).epsilon(1e-2));
    CHECK(report.rows[0].crossing_positive == doctest::Approx(0.1526).epsilon(1e-2));
    CHECK(report.rows[1].crossing_negative == doctest::Approx(-0.7297).epsilon(1e-2));
    CHECK(report.rows[1].crossing_positive == doctest::Approx(0.4797).epsilon(1e-2));
}
