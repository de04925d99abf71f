// cli.cpp — Subcommand wiring

#include "semigroup/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>

#include "semigroup/errors.hpp"
#include "semigroup/io.hpp"
#include "semigroup/lindblad.hpp"
#include "semigroup/optics.hpp"
#include "semigroup/unravel.hpp"
#include "semigroup/validate.hpp"

namespace semigroup {

namespace {

namespace fs = std::filesystem;

std::string output_path(const std::string& dir, const std::string& name)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw DomainError("cannot create output directory '" + dir + "': " + ec.message());
    return (fs::path(dir) / name).string();
}

Json timescales_to_json(const TimescaleDiagnostics& d)
{
    auto flag = [](const ConditionFlag& f) {
        return Json{{"ok", f.ok}, {"measured", f.measured}, {"threshold", f.threshold}};
    };
    auto finite_or_null = [](double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); };
    return Json{{"sigma", d.sigma},
                {"delta", d.delta},
                {"tau", finite_or_null(d.tau)},
                {"tau1_estimate", finite_or_null(d.tau1_estimate)},
                {"eta_used", d.eta_used},
                {"micro_coherence", flag(d.micro_coherence)},
                {"coarse_grain_window", flag(d.coarse_grain_window)},
                {"bath_equilibrium", flag(d.bath_equilibrium)},
                {"warnings", d.warnings}};
}

struct ExtractArgs {
    std::string model;
    std::string out = ".";
    std::string mode = "trace_enforced";
    std::string rho1;
    std::optional<double> eta;
    bool eta_scan = false;
    std::size_t scan_points = 25;
    double floor = kDefaultWeightFloor;
};

int cmd_extract(const ExtractArgs& a, std::ostream& out)
{
    const Mode mode = parse_mode(a.mode);
    const ModelSpec spec = parse_model(read_json_file(a.model));
    const BathState bath = spec.bath();
    const Index ds = spec.model.d_s();
    const Matrix rho1 = a.rho1.empty() ? Matrix(Matrix::Identity(ds, ds) / static_cast<double>(ds))
                                       : parse_state(read_json_file(a.rho1)).rho;
    if (rho1.rows() != ds) throw ShapeError("extract: rho1 dimension differs from d_s");

    auto diag = timescale_report(spec.model, bath, rho1, 0.0);
    Json scan_json = nullptr;
    if (a.eta && !(*a.eta > 0.0)) throw DomainError("extract: eta must be positive");
    double eta = a.eta.value_or(0.0);
    std::string source = "explicit";
    if (a.eta_scan) {
        if (!(diag.delta > 0.0) || !(0.5 * diag.sigma > diag.delta)) {
            throw DomainError("extract: eta scan needs delta < sigma/2");
        }
        const auto rows = eta_scan(spec.model, bath, eta_grid(diag.delta, 0.5 * diag.sigma, a.scan_points));
        const Plateau p = plateau_eta(rows);
        scan_json = Json::array();
        for (const auto& r : rows) {
            scan_json.push_back({{"eta", r.eta}, {"q_norm", r.q_norm}, {"channel_norm", r.channel_norm}});
        }
        if (!a.eta) {
            eta = p.eta;
            source = "plateau";
        }
    } else if (!a.eta) {
        eta = default_eta(diag);
        source = "default";
    }
    diag = timescale_report(spec.model, bath, rho1, eta);
    const auto ex = extract_generator(spec.model, bath, eta, mode, a.floor);

    write_text_file(output_path(a.out, "bundle.json"), bundle_to_json(ex.bundle).dump(2) + "\n");
    Json d{{"eta", eta},
           {"eta_source", source},
           {"mode", to_string(mode)},
           {"timescales", timescales_to_json(diag)},
           {"trace_defect", trace_defect(ex.bundle.q, ex.bundle.channels, rho1)},
           {"worst_trace_defect", worst_trace_defect(ex.bundle.q, ex.bundle.channels)},
           {"q_norm", ex.bundle.q.norm()},
           {"bath_commutator_defect", bath.commutator_defect()},
           {"channels",
            {{"count", ex.channel_set.channels.size()},
             {"pruned_count", ex.channel_set.pruned_count},
             {"pruned_mass", ex.channel_set.pruned_mass},
             {"zero_count", ex.channel_set.zero_count}}},
           {"eta_scan", scan_json}};
    write_text_file(output_path(a.out, "diagnostics.json"), d.dump(2) + "\n");
    out << "extract: " << ex.channel_set.channels.size() << " channels, eta = " << eta << " (" << source << ")\n";
    for (const auto& w : diag.warnings) out << "warning: " << w << "\n";
    return kExitOk;
}

std::vector<double> parse_grid(const std::string& text)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            const double v = std::stod(item, &used);
            if (used != item.size()) throw std::invalid_argument(item);
            out.push_back(v);
        } catch (const std::exception&) {
            throw DomainError("time grid entry '" + item + "' is not a number");
        }
    }
    if (out.empty()) throw DomainError("time grid is empty");
    return out;
}

struct EvolveArgs {
    std::string bundle;
    std::string state;
    std::string out = ".";
    std::string t_grid;
    double t_max = 1.0;
    std::size_t steps = 10;
    std::string method = "exp";
};

int cmd_evolve(const EvolveArgs& a, std::ostream& out)
{
    const GeneratorBundle b = parse_bundle(read_json_file(a.bundle));
    const Matrix rho0 = parse_state(read_json_file(a.state)).rho;
    if (rho0.rows() != b.dim()) throw ShapeError("evolve: state dimension differs from bundle");
    if (a.method != "exp" && a.method != "rk4") throw DomainError("evolve: method must be 'exp' or 'rk4'");
    const Propagation method = a.method == "rk4" ? Propagation::rk4 : Propagation::exponential;
    std::vector<double> grid;
    if (!a.t_grid.empty()) {
        grid = parse_grid(a.t_grid);
    } else {
        if (a.steps == 0) throw DomainError("evolve: steps must be positive");
        for (std::size_t i = 0; i <= a.steps; ++i) grid.push_back(a.t_max * static_cast<double>(i) / a.steps);
    }
    const Index d = b.dim();
    std::ostringstream csv;
    csv << "t";
    for (Index i = 0; i < d; ++i) {
        for (Index j = 0; j < d; ++j) csv << ",re_" << i << "_" << j << ",im_" << i << "_" << j;
    }
    csv << ",trace,purity,p0\n";
    for (double t : grid) {
        const Matrix rho = propagate(b, rho0, t, method);
        const double p0 = no_jump_propagator(b, 0.0, t).apply(rho0).trace().real();
        csv << format_double(t);
        for (Index i = 0; i < d; ++i) {
            for (Index j = 0; j < d; ++j) csv << "," << format_double(rho(i, j).real()) << "," << format_double(rho(i, j).imag());
        }
        csv << "," << format_double(rho.trace().real()) << "," << format_double(purity(rho)) << "," << format_double(p0)
            << "\n";
    }
    write_text_file(output_path(a.out, "evolve.csv"), csv.str());
    out << "evolve: " << grid.size() << " time points\n";
    return kExitOk;
}

struct UnravelArgs {
    std::string bundle;
    std::string state;
    std::string out = ".";
    std::size_t traj = 1000;
    std::uint64_t seed = 0;
    double t = 1.0;
    int nmax = 8;
};

int cmd_unravel(const UnravelArgs& a, std::ostream& out)
{
    const GeneratorBundle b = parse_bundle(read_json_file(a.bundle));
    const StateSpec st = parse_state(read_json_file(a.state));
    if (!st.ket) throw SchemaError("$.ket", "unravel needs a pure initial state given as 'ket'");
    if (st.ket->size() != b.dim()) throw ShapeError("unravel: ket dimension differs from bundle");
    const auto dyson = dyson_terms(b, st.rho, a.t, a.nmax);
    const auto ens = sample_trajectories(b, *st.ket, a.t, a.traj, a.seed);
    const auto hist = count_histogram(ens, a.nmax);

    std::ostringstream tr;
    tr << "trajectory,event,time,channel,lambda,xi\n";
    for (const auto& t : ens.trajectories) {
        for (std::size_t e = 0; e < t.events.size(); ++e) {
            const auto& ev = t.events[e];
            tr << t.index << "," << e << "," << format_double(ev.time) << "," << ev.channel << "," << ev.lambda << ","
               << ev.xi << "\n";
        }
    }
    std::ostringstream counts;
    counts << "N,P_exact,P_mc,stderr\n";
    for (int k = 0; k <= a.nmax; ++k) {
        const auto& h = hist[static_cast<std::size_t>(k)];
        counts << k << "," << format_double(dyson.terms[static_cast<std::size_t>(k)].trace().real()) << ","
               << format_double(h.probability) << "," << format_double(h.standard_error) << "\n";
    }
    write_text_file(output_path(a.out, "trajectories.csv"), tr.str());
    write_text_file(output_path(a.out, "counts.csv"), counts.str());
    out << "unravel: " << a.traj << " trajectories, seed " << a.seed << "\n";
    return kExitOk;
}

struct CountArgs {
    std::string bundle;
    std::string state;
    std::string query;
    std::string out = ".";
};

int cmd_count(const CountArgs& a, std::ostream& out)
{
    const GeneratorBundle b = parse_bundle(read_json_file(a.bundle));
    const Matrix rho0 = parse_state(read_json_file(a.state)).rho;
    if (rho0.rows() != b.dim()) throw ShapeError("count: state dimension differs from bundle");
    const CountingQuery q = parse_count_query(read_json_file(a.query), b.channels.size());
    const Matrix rho1 = propagate(b, rho0, q.t1);
    const EffectReport r = counting_probability(b, rho1, q);
    Json j{{"probability", r.probability},
           {"effect", matrix_to_json(r.effect)},
           {"conditional_state", r.conditional_state ? matrix_to_json(*r.conditional_state) : Json(nullptr)},
           {"below_floor", r.below_floor},
           {"query", {{"t1", q.t1}, {"t2", q.t2}, {"n_events", q.n_events}, {"sigma", q.sigma}, {"n_max", q.n_max}}}};
    write_text_file(output_path(a.out, "count.json"), j.dump(2) + "\n");
    out << "count: P = " << format_double(r.probability) << "\n";
    return kExitOk;
}

struct InterfereArgs {
    double gamma_w = 0.0;
    double gamma_w1 = 0.0;
    std::size_t phi_steps = 64;
    double v2_re = 0.0;
    double v2_im = 0.0;
    double t = 1.0;
    int nmax = 12;
    std::string out = ".";
};

int cmd_interfere(const InterfereArgs& a, std::ostream& out)
{
    if (a.phi_steps == 0) throw DomainError("interfere: phi-steps must be positive");
    InterferometerScenario s{0.0, {a.v2_re, a.v2_im}, a.gamma_w, a.gamma_w1, a.t};
    std::vector<double> phis;
    for (std::size_t i = 0; i < a.phi_steps; ++i) phis.push_back(2.0 * std::numbers::pi * i / a.phi_steps);
    const auto pat = interference_pattern(s, balanced_input(), phis, a.nmax);
    std::ostringstream csv;
    csv << "phi,I_total,I_coherent,I_background\n";
    for (const auto& p : pat.points) {
        csv << format_double(p.phi) << "," << format_double(p.total) << "," << format_double(p.coherent) << ","
            << format_double(p.background) << "\n";
    }
    write_text_file(output_path(a.out, "pattern.csv"), csv.str());
    Json j{{"visibility_total", pat.visibility_total},
           {"visibility_coherent", pat.visibility_coherent},
           {"visibility_background", pat.visibility_background},
           {"p0", pat.p0}};
    write_text_file(output_path(a.out, "interference.json"), j.dump(2) + "\n");
    out << "interfere: visibility " << format_double(pat.visibility_total) << " (zero-event "
        << format_double(pat.visibility_coherent) << ")\n";
    return kExitOk;
}

struct ValidateArgs {
    std::string filter;
    double tolerance = 0.0;
    bool has_tolerance = false;
    std::uint64_t seed = 7;
    std::string report;
};

int cmd_validate(const ValidateArgs& a, std::ostream& out)
{
    ValidationOptions opt;
    opt.filter = a.filter;
    opt.seed = a.seed;
    if (a.has_tolerance) opt.tolerance_override = a.tolerance;
    const ValidationReport rep = run_validation(opt);
    for (const auto& c : rep.checks) {
        out << (c.pass ? "PASS " : "FAIL ") << c.module << "." << c.name << " measured=" << c.measured
            << " tol=" << c.tolerance << "\n";
    }
    if (!a.report.empty()) write_text_file(a.report, rep.to_json().dump(2) + "\n");
    return rep.passed() ? kExitOk : kExitValidation;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Dynamical-semigroup laboratory"};
    app.require_subcommand(1);

    ExtractArgs ea;
    auto* extract = app.add_subcommand("extract", "Build a generator bundle from a model file");
    extract->add_option("--model", ea.model, "Model JSON")->required();
    extract->add_option("--out", ea.out, "Output directory");
    extract->add_option("--mode", ea.mode, "raw | trace_enforced");
    extract->add_option("--eta", ea.eta, "Regularizer (default: plateau or 10*delta)");
    extract->add_flag("--eta-scan", ea.eta_scan, "Run the eta plateau scan");
    extract->add_option("--scan-points", ea.scan_points, "Points in the eta scan");
    extract->add_option("--rho1", ea.rho1, "Micro state JSON for diagnostics (default I/d_s)");
    extract->add_option("--floor", ea.floor, "Weight floor for pi_xi");

    EvolveArgs va;
    auto* evolve = app.add_subcommand("evolve", "Propagate a state with a bundle");
    evolve->add_option("--bundle", va.bundle, "Bundle JSON")->required();
    evolve->add_option("--state", va.state, "State JSON")->required();
    evolve->add_option("--out", va.out, "Output directory");
    evolve->add_option("--t-grid", va.t_grid, "Comma-separated times");
    evolve->add_option("--t-max", va.t_max, "Final time for a uniform grid");
    evolve->add_option("--steps", va.steps, "Intervals in the uniform grid");
    evolve->add_option("--method", va.method, "exp | rk4");

    UnravelArgs ua;
    auto* unravel = app.add_subcommand("unravel", "Sample jump trajectories");
    unravel->add_option("--bundle", ua.bundle, "Bundle JSON")->required();
    unravel->add_option("--state", ua.state, "State JSON with a ket")->required();
    unravel->add_option("--out", ua.out, "Output directory");
    unravel->add_option("--traj", ua.traj, "Number of trajectories");
    unravel->add_option("--seed", ua.seed, "Master seed");
    unravel->add_option("--t", ua.t, "Final time");
    unravel->add_option("--nmax", ua.nmax, "Largest event count resolved");

    CountArgs ca;
    auto* count = app.add_subcommand("count", "Evaluate a counting query");
    count->add_option("--bundle", ca.bundle, "Bundle JSON")->required();
    count->add_option("--state", ca.state, "State JSON at t = 0")->required();
    count->add_option("--query", ca.query, "Query JSON")->required();
    count->add_option("--out", ca.out, "Output directory");

    InterfereArgs ia;
    auto* interfere = app.add_subcommand("interfere", "Two-path interferometer pattern");
    interfere->add_option("--gamma-w", ia.gamma_w, "Which-way rate on path 2");
    interfere->add_option("--gamma-w1", ia.gamma_w1, "Which-way rate on path 1");
    interfere->add_option("--phi-steps", ia.phi_steps, "Phase grid size over [0, 2pi)");
    interfere->add_option("--v2-re", ia.v2_re, "Re V2");
    interfere->add_option("--v2-im", ia.v2_im, "Im V2 (absorption, >= 0)");
    interfere->add_option("--t", ia.t, "Transit time");
    interfere->add_option("--nmax", ia.nmax, "Largest event count in the split");
    interfere->add_option("--out", ia.out, "Output directory");

    ValidateArgs la;
    auto* validate = app.add_subcommand("validate", "Run the invariant suite");
    validate->add_option("--filter", la.filter, "Module to run");
    auto* tol = validate->add_option("--tolerance", la.tolerance, "Override every tolerance");
    validate->add_option("--seed", la.seed, "Seed for random instances");
    validate->add_option("--report", la.report, "Write the JSON report here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    }
    la.has_tolerance = tol->count() > 0;

    try {
        if (extract->parsed()) return cmd_extract(ea, out);
        if (evolve->parsed()) return cmd_evolve(va, out);
        if (unravel->parsed()) return cmd_unravel(ua, out);
        if (count->parsed()) return cmd_count(ca, out);
        if (interfere->parsed()) return cmd_interfere(ia, out);
        if (validate->parsed()) return cmd_validate(la, out);
    } catch (const InputError& e) {
        err << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitInput;
}

} // namespace semigroup
