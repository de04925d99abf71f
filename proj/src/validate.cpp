// validate.cpp — Invariant suite behind `semigroup-lab validate`

#include "semigroup/validate.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "semigroup/demo.hpp"
#include "semigroup/errors.hpp"
#include "semigroup/lindblad.hpp"
#include "semigroup/optics.hpp"
#include "semigroup/unravel.hpp"

namespace semigroup {

bool ValidationReport::passed() const
{
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

Json ValidationReport::to_json() const
{
    Json arr = Json::array();
    for (const auto& c : checks) {
        arr.push_back({{"module", c.module},
                       {"name", c.name},
                       {"measured", c.measured},
                       {"tolerance", c.tolerance},
                       {"pass", c.pass}});
    }
    return Json{{"passed", passed()}, {"checks", arr}};
}

std::vector<std::string> validation_modules()
{
    return {"algebra", "fock", "tmatrix", "generator", "lindblad", "unravel", "optics"};
}

namespace {

struct Check {
    const char* module;
    const char* name;
    double tolerance;
    std::function<double(RandomStream&)> measure;
};

double algebra_tensor_assoc(RandomStream& rng)
{
    const Matrix a = random_matrix(rng, 2, 3);
    const Matrix b = random_matrix(rng, 3, 2);
    const Matrix c = random_matrix(rng, 2, 2);
    return max_abs(tensor(tensor(a, b), c) - tensor(a, tensor(b, c)));
}

double algebra_expm_inverse(RandomStream& rng)
{
    Matrix a = random_matrix(rng, 6, 6);
    a *= 10.0 / a.cwiseAbs().colwise().sum().maxCoeff();
    return max_abs(expm(a) * expm(-a) - Matrix::Identity(6, 6));
}

double algebra_sylvester(RandomStream& rng)
{
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
        const Matrix hl = random_hermitian(rng, 3);
        const Matrix hr = random_hermitian(rng, 4);
        const Matrix x = random_matrix(rng, 3, 4);
        const cplx z(0.05 + rng.uniform(), 2.0 * rng.uniform() - 1.0);
        const Matrix y = solve_shifted_sylvester(z, hl, hr, x);
        worst = std::max(worst, (z * y - kI * (hl * y - y * hr) - x).norm() / x.norm());
    }
    return worst;
}

double algebra_choi_transpose(RandomStream&)
{
    return std::abs(min_eigenvalue(choi_matrix(transpose_map(2))) + 1.0);
}

double fock_roundtrip(RandomStream& rng)
{
    const SystemModel model = random_model(rng, 3, 4, 0.2);
    const auto sec = build_sectors(model);
    const BathState bath = BathState::gibbs(model, 1.0);
    const MicroState rho1{random_density(rng, 3)};
    return max_abs(reduce(embed_product_state(rho1, bath), sec).rho - rho1.rho);
}

double fock_reduce_vs_trace(RandomStream& rng)
{
    const SystemModel model = random_model(rng, 2, 3, 0.2);
    const auto sec = build_sectors(model);
    const Matrix full = random_density(rng, 6);
    return max_abs(reduce(full, sec).rho - partial_trace_bath(full, 2, 3));
}

double fock_canonical(RandomStream& rng)
{
    const auto sec = build_sectors(random_model(rng, 3, 2, 0.1));
    double worst = 0.0;
    for (Index f = 0; f < 3; ++f) {
        for (Index g = 0; g < 3; ++g) {
            const Matrix expect = f == g ? Matrix(Matrix::Identity(2, 2)) : Matrix(Matrix::Zero(2, 2));
            worst = std::max(worst, max_abs(sec.a_maps[f] * sec.a_dagger(g) - expect));
        }
    }
    return worst;
}

double tmatrix_resolvent(RandomStream& rng)
{
    const auto sec = build_sectors(random_model(rng, 2, 2, 0.3));
    const auto r = verify_resolvent_identity(sec, SpectralPoint::from_z(cplx(0.1, 0.4)));
    return std::max(r.first, r.second);
}

double tmatrix_adjoint(RandomStream& rng)
{
    const auto sec = build_sectors(random_model(rng, 2, 3, 0.3));
    const auto p = SpectralPoint::from_z(cplx(0.2, -0.7));
    double worst = 0.0;
    for (Index k = 0; k < 2; ++k) {
        for (Index h = 0; h < 2; ++h) {
            worst = std::max(worst, max_abs(t_block(sec, p, k, h).matrix.adjoint() - t_block_adjoint_form(sec, p, k, h)));
        }
    }
    return worst;
}

double tmatrix_reassembly(RandomStream& rng)
{
    const auto sec = build_sectors(random_model(rng, 3, 2, 0.3));
    const auto p = SpectralPoint::from_z(cplx(0.3, 0.2));
    double worst = 0.0;
    for (Index k = 0; k < 3; ++k) {
        const Matrix map = t_apply(sec, p, k);
        Matrix sum = Matrix::Zero(map.rows(), map.cols());
        for (Index h = 0; h < 3; ++h) sum += t_block(sec, p, k, h).matrix * sec.a_maps[h];
        worst = std::max(worst, max_abs(sum - map));
    }
    return worst;
}

double tmatrix_ring(RandomStream&)
{
    const RingModel ring = demo_ring(4, 0.1);
    const auto sec = build_sectors(ring.model);
    const auto p = SpectralPoint::for_energy(ring.model.micro_energies()[1], 0.3);
    double worst = 0.0;
    for (Index l = 0; l < 4; ++l) worst = std::max(worst, position_resolved_blocks(ring, sec, p, 1, l).resummation_residual());
    return worst;
}

double generator_trace_enforced(RandomStream& rng)
{
    const SystemModel model = demo_model(0.1);
    const auto ex = extract_generator(model, BathState::gibbs(model, kDemoBeta), 0.4, Mode::trace_enforced);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        worst = std::max(worst, std::abs(apply_generator(ex.bundle, random_density(rng, 2)).trace()));
    }
    return worst;
}

double generator_q_adjoint(RandomStream&)
{
    const SystemModel model = demo_model(0.1);
    const auto sec = build_sectors(model);
    const BathState bath = BathState::gibbs(model, kDemoBeta);
    return max_abs(build_q(model, sec, bath, 0.4).adjoint() - build_q_adjoint(model, sec, bath, 0.4));
}

double generator_channel_count(RandomStream&)
{
    const SystemModel model = extract_demo_model();
    const auto cs = build_jump_channels(model, build_sectors(model), BathState::gibbs(model, kDemoBeta), 0.3);
    return std::abs(static_cast<double>(cs.channels.size()) - 16.0);
}

double generator_trace_identity(RandomStream&)
{
    const SystemModel model = demo_model(0.05, {0.0, 0.0});
    const BathState bath = BathState::gibbs(model, kDemoBeta);
    const auto plateau = find_plateau(model, bath);
    const auto ex = extract_generator(model, bath, plateau.eta, Mode::raw);
    return trace_defect(ex.bundle.q, ex.bundle.channels, demo_initial_state()) / ex.bundle.q.norm();
}

double generator_markov_oracle(RandomStream&)
{
    const SystemModel model = demo_model(0.1);
    const BathState bath = BathState::gibbs(model, kDemoBeta);
    const auto plateau = find_plateau(model, bath);
    const auto ex = extract_generator(model, bath, plateau.eta, Mode::trace_enforced);
    const auto sec = build_sectors(model);
    const Matrix rho1 = demo_initial_state();
    const Matrix full0 = embed_product_state(MicroState{rho1}, bath);
    const auto spec = eigh(sec.h1);
    const auto diag = timescale_report(model, bath, rho1, plateau.eta);
    const double t_lo = 2.0 / diag.sigma;
    const double t_hi = 0.5 * diag.tau1_estimate;
    double worst = 0.0;
    for (int i = 0; i < 60; ++i) {
        const double t = t_lo + (t_hi - t_lo) * i / 59.0;
        const Matrix u = spec.vectors * (-kI * spec.values.cast<cplx>() * t).array().exp().matrix().asDiagonal()
                         * spec.vectors.adjoint();
        const Matrix exact = reduce(u * full0 * u.adjoint(), sec).rho;
        worst = std::max(worst, trace_distance(exact, propagate(ex.bundle, rho1, t)));
    }
    return worst;
}

GeneratorBundle demo_bundle()
{
    const SystemModel model = demo_model(0.1);
    return extract_generator(model, BathState::gibbs(model, kDemoBeta), 0.425, Mode::trace_enforced).bundle;
}

double lindblad_tp(RandomStream&)
{
    double worst = 0.0;
    for (const auto& r : verify_cp_tp(demo_bundle(), {0.1, 1.0, 5.0})) worst = std::max(worst, r.trace_drift);
    return worst;
}

double lindblad_cp(RandomStream&)
{
    double worst = 0.0;
    for (const auto& r : verify_cp_tp(demo_bundle(), {0.1, 1.0, 5.0})) worst = std::max(worst, -r.choi_min_eig);
    return worst;
}

double lindblad_semigroup(RandomStream& rng)
{
    const GeneratorBundle b = random_bundle(rng, 3, 2, Mode::trace_enforced);
    const Matrix rho = random_density(rng, 3);
    return max_abs(propagate(b, rho, 1.7) - propagate(b, propagate(b, rho, 0.6), 1.1));
}

double lindblad_rk4(RandomStream& rng)
{
    const GeneratorBundle b = random_bundle(rng, 3, 2, Mode::trace_enforced);
    const Matrix rho = random_density(rng, 3);
    return max_abs(propagate(b, rho, 2.0) - propagate(b, rho, 2.0, Propagation::rk4));
}

GeneratorBundle single_channel(double gamma)
{
    GeneratorBundle b;
    b.h = Matrix::Zero(2, 2);
    b.h(1, 1) = 0.3;
    Matrix l = Matrix::Identity(2, 2) * std::sqrt(gamma);
    b.channels.push_back(Channel{1.0, l, 0, 0});
    b.loss = 0.5 * channel_loss(b.channels, 2);
    return b;
}

double unravel_resummation(RandomStream& rng)
{
    const GeneratorBundle b = random_bundle(rng, 2, 2, Mode::trace_enforced);
    const Matrix rho = random_density(rng, 2);
    const auto dyson = dyson_terms(b, rho, 0.5, 12);
    Matrix sum = Matrix::Zero(2, 2);
    for (const auto& t : dyson.terms) sum += t;
    return std::max(max_abs(sum - propagate(b, rho, 0.5)), std::abs(dyson.tail_mass));
}

double unravel_poisson(RandomStream& rng)
{
    const double gamma = 0.8;
    const double dt = 1.5;
    const GeneratorBundle b = single_channel(gamma);
    const Matrix rho = random_density(rng, 2);
    double worst = 0.0;
    for (int n = 0; n <= 6; ++n) {
        CountingQuery q{0.0, dt, n, {0}, 12};
        const double p = counting_probability(b, rho, q).probability;
        const double exact = std::exp(-gamma * dt) * std::pow(gamma * dt, n) / std::tgamma(n + 1.0);
        worst = std::max(worst, std::abs(p - exact));
    }
    return worst;
}

double unravel_effects(RandomStream& rng)
{
    const GeneratorBundle b = random_bundle(rng, 2, 1, Mode::trace_enforced);
    Matrix sum = Matrix::Zero(2, 2);
    for (int n = 0; n <= 12; ++n) {
        CountingQuery q{0.0, 0.4, n, {0}, 12};
        sum += counting_probability(b, Matrix::Identity(2, 2) / 2.0, q).effect;
    }
    return max_abs(sum - Matrix::Identity(2, 2));
}

double unravel_monte_carlo(RandomStream&)
{
    GeneratorBundle b;
    b.h = Matrix::Zero(2, 2);
    Matrix l = Matrix::Zero(2, 2);
    l(0, 1) = 1.0;
    b.channels.push_back(Channel{1.0, l, 0, 0});
    b.loss = 0.5 * channel_loss(b.channels, 2);
    Vector psi(2);
    psi << 0.0, 1.0;
    const auto ens = sample_trajectories(b, psi, 0.7, 4000, 11);
    const double mc = ens.averaged_state(1, 1).real();
    const double exact = std::exp(-0.7);
    return std::abs(mc - exact) / std::sqrt(exact * (1.0 - exact) / 4000.0);
}

double optics_index(RandomStream&)
{
    const double nu = 0.37;
    const double hnu = 2.0 * std::numbers::pi * nu;
    const auto r = refractive_index(OpticsModel{{0.0, 0.75 * hnu, -3.0 * hnu}, nu, 1.0});
    return std::max({std::abs(r.n[0] - 1.0), std::abs(r.n[1] - 0.5), std::abs(r.n[2] - 2.0)});
}

double optics_coherent_visibility(RandomStream&)
{
    InterferometerScenario s{0.0, {0.2, 0.0}, 0.6, 0.6, 1.3};
    std::vector<double> phis;
    for (int i = 0; i < 41; ++i) phis.push_back(2.0 * std::numbers::pi * i / 40.0);
    const auto pat = interference_pattern(s, balanced_input(), phis);
    return std::abs(pat.visibility_coherent - 1.0);
}

double optics_closed_form(RandomStream&)
{
    InterferometerScenario s{0.4, {0.3, 0.05}, 0.7, 0.2, 1.1};
    const Matrix rho0 = balanced_input() * balanced_input().adjoint();
    const Matrix rho = propagate(build_interferometer(s), rho0, s.t_tr);
    return std::abs(rho(0, 1) - interferometer_coherence(s, rho0, s.t_tr));
}

const std::vector<Check>& checks()
{
    static const std::vector<Check> list = {
        {"algebra", "tensor_associativity", 1e-12, algebra_tensor_assoc},
        {"algebra", "expm_inverse", 1e-8, algebra_expm_inverse},
        {"algebra", "sylvester_residual", 1e-9, algebra_sylvester},
        {"algebra", "choi_detects_transpose", 1e-12, algebra_choi_transpose},
        {"fock", "embed_reduce_roundtrip", 1e-12, fock_roundtrip},
        {"fock", "reduce_matches_partial_trace", 1e-12, fock_reduce_vs_trace},
        {"fock", "canonical_relation", 1e-15, fock_canonical},
        {"tmatrix", "resolvent_identity", 1e-8, tmatrix_resolvent},
        {"tmatrix", "adjoint_relation", 1e-9, tmatrix_adjoint},
        {"tmatrix", "block_reassembly", 1e-9, tmatrix_reassembly},
        {"tmatrix", "ring_resummation", 1e-9, tmatrix_ring},
        {"generator", "trace_enforced_trace", 1e-12, generator_trace_enforced},
        {"generator", "q_adjoint_formula", 1e-10, generator_q_adjoint},
        {"generator", "extract_demo_channel_count", 0.0, generator_channel_count},
        {"generator", "trace_identity_ratio", 1e-3, generator_trace_identity},
        {"generator", "markov_oracle_distance", 0.05, generator_markov_oracle},
        {"lindblad", "demo_trace_drift", 1e-10, lindblad_tp},
        {"lindblad", "demo_choi_negativity", 1e-8, lindblad_cp},
        {"lindblad", "semigroup_law", 1e-9, lindblad_semigroup},
        {"lindblad", "exp_vs_rk4", 1e-7, lindblad_rk4},
        {"unravel", "dyson_resummation", 1e-9, unravel_resummation},
        {"unravel", "poisson_counting", 1e-10, unravel_poisson},
        {"unravel", "effects_resolution", 1e-9, unravel_effects},
        {"unravel", "monte_carlo_z_score", 5.0, unravel_monte_carlo},
        {"optics", "refractive_index_cases", 1e-15, optics_index},
        {"optics", "zero_event_visibility", 1e-9, optics_coherent_visibility},
        {"optics", "closed_form_coherence", 1e-8, optics_closed_form},
    };
    return list;
}

} // namespace

ValidationReport run_validation(const ValidationOptions& options)
{
    if (!options.filter.empty()) {
        const auto mods = validation_modules();
        if (std::find(mods.begin(), mods.end(), options.filter) == mods.end()) {
            throw DomainError("validate: unknown module filter '" + options.filter + "'");
        }
    }
    ValidationReport report;
    std::uint64_t stream = 0;
    for (const auto& c : checks()) {
        ++stream;
        if (!options.filter.empty() && options.filter != c.module) continue;
        RandomStream rng(options.seed, stream);
        CheckResult r;
        r.module = c.module;
        r.name = c.name;
        r.tolerance = options.tolerance_override.value_or(c.tolerance);
        r.measured = c.measure(rng);
        r.pass = std::isfinite(r.measured) && r.measured <= r.tolerance;
        report.checks.push_back(r);
    }
    return report;
}

} // namespace semigroup
