#include "epscan/serialize.hpp"

#include <fstream>
#include <sstream>

namespace epscan {

namespace {

Json complex_to_json(Complex z) {
    return Json::array({z.real(), z.imag()});
}

Complex complex_from_json(const Json& j) {
    if (!j.is_array() || j.size() != 2)
        throw InvalidSpec("expected [re, im] pair");
    return {j[0].get<double>(), j[1].get<double>()};
}

} // namespace

Json spec_to_json(const ModelSpec& spec) {
    return Json{{"omega", spec.omega},
                {"epsilon", spec.epsilon},
                {"pairs", spec.pairs},
                {"zeta", spec.zeta}};
}

ModelSpec spec_from_json(const Json& j) {
    try {
        ModelSpec spec;
        spec.omega = j.at("omega").get<std::vector<int>>();
        spec.epsilon = j.at("epsilon").get<std::vector<double>>();
        spec.pairs = j.at("pairs").get<int>();
        spec.zeta = j.value("zeta", 1.0);
        spec.validate();
        return spec;
    } catch (const Json::exception& e) {
        throw InvalidSpec(std::string("malformed model spec: ") + e.what());
    }
}

ModelSpec load_spec_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw InvalidSpec("cannot open spec file: " + path);
    Json j;
    try {
        in >> j;
    } catch (const Json::exception& e) {
        throw InvalidSpec(std::string("invalid JSON in ") + path + ": " + e.what());
    }
    return spec_from_json(j);
}

Json matrix_to_json(const Matrix& m, const std::string& label) {
    Json entries = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            entries.push_back(complex_to_json(m(r, c)));
    return Json{{"label", label}, {"dim", m.rows()}, {"entries", entries}};
}

Json polynomial_to_json(const ComplexPolynomial& poly) {
    Json coeffs = Json::array();
    for (const Complex& c : poly.coeffs) coeffs.push_back(complex_to_json(c));
    return Json{{"degree", poly.degree()}, {"coeffs", coeffs}};
}

ComplexPolynomial polynomial_from_json(const Json& j) {
    ComplexPolynomial poly;
    for (const Json& c : j.at("coeffs")) poly.coeffs.push_back(complex_from_json(c));
    return poly;
}

Json identity_report_to_json(const IdentityReport& report) {
    Json checks = Json::array();
    for (const IdentityCheck& c : report.checks)
        checks.push_back(Json{{"name", c.name},
                              {"max_rel_residual", c.max_rel_residual},
                              {"tol", c.tol},
                              {"pass", c.pass}});
    return Json{{"checks", checks},
                {"all_pass", report.all_pass},
                {"sample_count", report.sample_count},
                {"fitted_constant", complex_to_json(report.fitted_constant)}};
}

DegeneracyKind kind_from_string(const std::string& s) {
    if (s == "EP") return DegeneracyKind::ep;
    if (s == "crossing") return DegeneracyKind::crossing;
    if (s == "higher-order-crossing") return DegeneracyKind::higher_order_crossing;
    if (s == "EP-cluster") return DegeneracyKind::ep_cluster;
    return DegeneracyKind::unclassified;
}

Json degeneracy_set_to_json(const DegeneracySet& set) {
    Json list = Json::array();
    for (const Degeneracy& d : set.degeneracies) {
        Json evidence{{"h_gap", d.evidence.h_gap},
                      {"q_gap", d.evidence.q_gap},
                      {"eigenvector_overlap", d.evidence.eigenvector_overlap},
                      {"monodromy", d.evidence.monodromy}};
        list.push_back(Json{{"g", complex_to_json(d.location)},
                            {"multiplicity", d.multiplicity},
                            {"kind", to_string(d.kind)},
                            {"evidence", evidence}});
    }
    return Json{{"spec", spec_to_json(set.spec)},
                {"degree", set.degree},
                {"beyond_horizon", set.beyond_horizon},
                {"degeneracies", list}};
}

DegeneracySet degeneracy_set_from_json(const Json& j) {
    DegeneracySet set;
    set.spec = spec_from_json(j.at("spec"));
    set.degree = j.at("degree").get<int>();
    set.beyond_horizon = j.value("beyond_horizon", 0);
    for (const Json& item : j.at("degeneracies")) {
        Degeneracy d;
        d.location = complex_from_json(item.at("g"));
        d.multiplicity = item.at("multiplicity").get<int>();
        d.kind = kind_from_string(item.at("kind").get<std::string>());
        const Json& e = item.at("evidence");
        d.evidence.h_gap = e.at("h_gap").get<double>();
        d.evidence.q_gap = e.at("q_gap").get<double>();
        d.evidence.eigenvector_overlap = e.at("eigenvector_overlap").get<double>();
        d.evidence.monodromy = e.at("monodromy").get<std::vector<int>>();
        set.degeneracies.push_back(std::move(d));
    }
    return set;
}

Json sweep_result_to_json(const SweepResult& result) {
    const SweepPlan& plan = result.plan;
    Json jplan{{"spec", spec_to_json(plan.base)},
               {"parameter", to_string(plan.parameter)},
               {"start", plan.start},
               {"end", plan.end},
               {"initial_step", plan.initial_step},
               {"min_step", plan.min_step},
               {"max_displacement", plan.max_displacement},
               {"escape_radius", plan.escape_radius}};

    Json trajectories = Json::array();
    for (const Trajectory& t : result.trajectories) {
        Json points = Json::array();
        for (const TrajectoryPoint& p : t.points)
            points.push_back(Json{{"parameter", p.parameter},
                                  {"g", complex_to_json(p.g)},
                                  {"multiplicity", p.multiplicity},
                                  {"kind", to_string(p.kind)}});
        trajectories.push_back(Json{{"id", t.id},
                                    {"born_outside", t.born_outside},
                                    {"points", points}});
    }

    Json events = Json::array();
    for (const TrajectoryEvent& e : result.events)
        events.push_back(Json{{"type", to_string(e.type)},
                              {"parameter", e.parameter},
                              {"g", complex_to_json(e.location)},
                              {"trajectory", e.trajectory}});

    Json steps = Json::array();
    for (const SweepStep& s : result.steps)
        steps.push_back(Json{{"parameter", s.parameter},
                             {"degree", s.degree},
                             {"beyond_horizon", s.beyond_horizon},
                             {"located_mult_sum", s.located_mult_sum}});

    return Json{{"plan", jplan},
                {"trajectories", trajectories},
                {"events", events},
                {"steps", steps}};
}

std::string sweep_result_to_csv(const SweepResult& result) {
    std::ostringstream out;
    out.precision(12);
    out << "parameter,trajectory_id,re_g,im_g,multiplicity,kind,event\n";
    for (const Trajectory& t : result.trajectories) {
        for (const TrajectoryPoint& p : t.points) {
            std::string event;
            for (const TrajectoryEvent& e : result.events)
                if (e.trajectory == t.id &&
                    std::abs(e.parameter - p.parameter) < 1e-14) {
                    if (!event.empty()) event += ';';
                    event += to_string(e.type);
                }
            out << p.parameter << ',' << t.id << ',' << p.g.real() << ','
                << p.g.imag() << ',' << p.multiplicity << ',' << to_string(p.kind)
                << ',' << event << '\n';
        }
    }
    // events recorded between grid points (e.g. axis collisions) get their own rows
    for (const TrajectoryEvent& e : result.events) {
        bool attached = false;
        for (const Trajectory& t : result.trajectories) {
            if (t.id != e.trajectory) continue;
            for (const TrajectoryPoint& p : t.points)
                if (std::abs(e.parameter - p.parameter) < 1e-14) attached = true;
        }
        if (!attached)
            out << e.parameter << ',' << e.trajectory << ',' << e.location.real()
                << ',' << e.location.imag() << ',' << 0 << ",," << to_string(e.type)
                << '\n';
    }
    return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write file: " + path);
    out << content;
}

} // namespace epscan
