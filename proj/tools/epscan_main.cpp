#include <complex>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "epscan/continuation.hpp"
#include "epscan/degeneracy.hpp"
#include "epscan/discriminant.hpp"
#include "epscan/model.hpp"
#include "epscan/serialize.hpp"

namespace {

using namespace epscan;

struct SpecSource {
    std::string spec_path;
    double eps3 = 7.0 / 3.0;
    double zeta = 1.0;
    bool use_benchmark = false;

    ModelSpec resolve() const {
        if (!spec_path.empty()) return load_spec_file(spec_path);
        if (use_benchmark) return benchmark_spec(eps3, zeta);
        throw InvalidSpec("no model given: pass --spec FILE or --benchmark");
    }
};

void add_spec_options(CLI::App* cmd, SpecSource& src) {
    auto* spec = cmd->add_option("--spec", src.spec_path, "model spec JSON file");
    auto* bench = cmd->add_flag("--benchmark", src.use_benchmark,
                                "use the built-in 3-level benchmark model");
    cmd->add_option("--eps3", src.eps3, "benchmark third-level energy")->needs(bench);
    cmd->add_option("--zeta", src.zeta, "benchmark mixing parameter")->needs(bench);
    spec->excludes(bench);
}

void maybe_write(const std::string& path, const Json& j) {
    if (!path.empty()) write_text_file(path, j.dump(2) + "\n");
}

std::vector<Complex> random_couplings(int count, double max_radius, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Complex> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) {
        const double r = max_radius * std::sqrt(unit(rng));
        const double phi = 2.0 * M_PI * unit(rng);
        out.emplace_back(r * std::cos(phi), r * std::sin(phi));
    }
    return out;
}

int cmd_verify(const SpecSource& src, int samples, double gmax, double tol,
               unsigned seed, const std::string& output) {
    const ModelSpec spec = src.resolve();
    const IdentityReport report =
        verify_identities(spec, random_couplings(samples, gmax, seed), tol);
    for (const IdentityCheck& c : report.checks)
        std::cout << (c.pass ? "  ok   " : "  FAIL ") << c.name
                  << "  max residual " << c.max_rel_residual << "\n";
    std::cout << (report.all_pass ? "all identities hold" : "identity violation")
              << " over " << report.sample_count << " samples\n";
    maybe_write(output, identity_report_to_json(report));
    return report.all_pass ? 0 : 1;
}

int cmd_spectrum(const SpecSource& src, double re, double im,
                 const std::string& output) {
    const ModelSpec spec = src.resolve();
    const ModelOperators ops(spec);
    const Complex g(re, im);
    const EigenSet eig = eigenvalues(ops.hamiltonian(g));
    Json values = Json::array();
    std::cout << "eigenvalues of H(" << re << (im < 0 ? "" : "+") << im << "i):\n";
    for (const Complex& e : eig.values) {
        std::cout << "  " << e.real() << (e.imag() < 0 ? "" : "+") << e.imag()
                  << "i\n";
        values.push_back(Json::array({e.real(), e.imag()}));
    }
    maybe_write(output, Json{{"spec", spec_to_json(spec)},
                             {"g", Json::array({re, im})},
                             {"eigenvalues", values}});
    return 0;
}

int cmd_discriminant(const SpecSource& src, const std::string& output) {
    const ModelSpec spec = src.resolve();
    const ModelOperators ops(spec);
    const DiscriminantFit fit = discriminant_polynomial(ops);
    std::cout << "discriminant degree M = " << fit.poly.degree()
              << " (max " << ops.dim() * (ops.dim() - 1) << "), fit radius "
              << fit.radius << "\n";
    for (int k = 0; k <= fit.poly.degree(); ++k)
        std::cout << "  |c_" << k << "| = " << std::abs(fit.poly.coeffs[k]) << "\n";
    maybe_write(output, polynomial_to_json(fit.poly));
    return 0;
}

int cmd_roots(const SpecSource& src, const std::string& output) {
    const ModelSpec spec = src.resolve();
    const DegeneracySet set = compute_degeneracies(spec);
    int crossings = 0, eps = 0, higher = 0, anomalous = 0;
    for (const Degeneracy& d : set.degeneracies) {
        switch (d.kind) {
            case DegeneracyKind::ep: ++eps; break;
            case DegeneracyKind::crossing: ++crossings; break;
            case DegeneracyKind::higher_order_crossing: ++higher; break;
            default: ++anomalous; break;
        }
        std::cout << "  g = " << d.location.real()
                  << (d.location.imag() < 0 ? "" : "+") << d.location.imag()
                  << "i  mult " << d.multiplicity << "  " << to_string(d.kind)
                  << "\n";
    }
    std::cout << "M=" << set.degree << ", crossings=" << crossings
              << ", EPs=" << eps;
    if (higher) std::cout << ", higher-order=" << higher;
    if (anomalous) std::cout << ", anomalous=" << anomalous;
    if (set.beyond_horizon) std::cout << ", beyond-horizon=" << set.beyond_horizon;
    std::cout << "\n";
    maybe_write(output, degeneracy_set_to_json(set));
    return 0;
}

int cmd_sweep(const std::string& preset, SpecSource& src, bool have_custom,
              const SweepPlan& custom, const std::string& csv_path,
              const std::string& json_path) {
    SweepPlan plan;
    if (!preset.empty()) {
        plan = preset_plan(preset);
    } else if (have_custom) {
        plan = custom;
        plan.base = src.resolve();
        plan.pipeline.classify.full_evidence = false;
    } else {
        throw InvalidSpec("sweep: pass --preset NAME or a custom plan");
    }
    const SweepResult result = run_sweep(plan);
    if (!csv_path.empty()) write_text_file(csv_path, sweep_result_to_csv(result));
    if (!json_path.empty())
        write_text_file(json_path, sweep_result_to_json(result).dump(2) + "\n");
    std::cout << "sweep " << to_string(plan.parameter) << " " << plan.start
              << " -> " << plan.end << ": " << result.trajectories.size()
              << " trajectories, " << result.steps.size() << " steps; events:"
              << " collisions=" << result.count_events(EventType::collision)
              << " splits=" << result.count_events(EventType::split)
              << " entries=" << result.count_events(EventType::entry_from_infinity)
              << " escapes=" << result.count_events(EventType::escape_to_infinity)
              << "\n";
    return 0;
}

int cmd_critical(const SpecSource& src, double lo, double hi, double width) {
    const ModelSpec spec = src.resolve();
    const double cr = locate_critical_epsilon3(spec, lo, hi, width);
    std::cout << "eps3_cr = " << cr << "  (bracket width " << width << ")\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"eigenvalue-degeneracy scanner for complex-coupled pairing models"};
    app.require_subcommand(1);

    SpecSource src;
    std::string output;
    unsigned seed = 20240817;

    auto* verify = app.add_subcommand("verify", "check the invariant algebra of the model");
    add_spec_options(verify, src);
    int samples = 10;
    double gmax = 5.0, tol = 1e-10;
    verify->add_option("--samples", samples, "number of random couplings");
    verify->add_option("--gmax", gmax, "coupling sample radius");
    verify->add_option("--tol", tol, "relative residual tolerance");
    verify->add_option("--seed", seed, "sample seed");
    verify->add_option("-o,--output", output, "write the report as JSON");

    auto* spectrum = app.add_subcommand("spectrum", "eigenvalues of H at one coupling");
    add_spec_options(spectrum, src);
    double g_re = 0.0, g_im = 0.0;
    spectrum->add_option("--g-re", g_re, "Re g");
    spectrum->add_option("--g-im", g_im, "Im g");
    spectrum->add_option("-o,--output", output, "write eigenvalues as JSON");

    auto* discr = app.add_subcommand("discriminant", "reconstruct the discriminant polynomial");
    add_spec_options(discr, src);
    discr->add_option("-o,--output", output, "write the polynomial as JSON");

    auto* roots = app.add_subcommand("roots", "find and classify all degeneracies");
    add_spec_options(roots, src);
    roots->add_option("-o,--output", output, "write the degeneracy set as JSON");

    auto* sweep = app.add_subcommand("sweep", "track degeneracies across a parameter range");
    add_spec_options(sweep, src);
    std::string preset, csv_path = "sweep.csv", json_path = "sweep.json";
    SweepPlan custom;
    std::string param_name;
    sweep->add_option("--preset", preset, "named plan: fig1, fig2a, fig2b, fig2c");
    sweep->add_option("--parameter", param_name, "epsilon3 or zeta");
    sweep->add_option("--from", custom.start, "sweep start");
    sweep->add_option("--to", custom.end, "sweep end");
    sweep->add_option("--step", custom.initial_step, "initial step");
    sweep->add_option("--min-step", custom.min_step, "smallest adaptive step");
    sweep->add_option("--cap", custom.max_displacement, "per-step root displacement cap");
    sweep->add_option("--escape", custom.escape_radius, "escape radius");
    sweep->add_option("--csv", csv_path, "CSV output path");
    sweep->add_option("--json", json_path, "JSON output path");

    auto* critical = app.add_subcommand("critical", "bisection for the collision energy");
    add_spec_options(critical, src);
    double lo = 1.5, hi = 2.5, width = 1e-5;
    critical->add_option("--lo", lo, "bracket lower end");
    critical->add_option("--hi", hi, "bracket upper end");
    critical->add_option("--width", width, "bisection stop width");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (verify->parsed())
            return cmd_verify(src, samples, gmax, tol, seed, output);
        if (spectrum->parsed())
            return cmd_spectrum(src, g_re, g_im, output);
        if (discr->parsed())
            return cmd_discriminant(src, output);
        if (roots->parsed())
            return cmd_roots(src, output);
        if (sweep->parsed()) {
            const bool have_custom = !param_name.empty();
            if (have_custom)
                custom.parameter = param_name == "epsilon3" ? SweepParameter::epsilon3
                                                            : SweepParameter::zeta;
            return cmd_sweep(preset, src, have_custom, custom, csv_path, json_path);
        }
        if (critical->parsed())
            return cmd_critical(src, lo, hi, width);
    } catch (const InvalidSpec& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const BracketInvalid& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const DimensionMismatch& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const PreconditionViolated& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
