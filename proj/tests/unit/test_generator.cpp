#include <doctest.h>

#include <numbers>

#include "frozen_values.hpp"
#include "oracles.hpp"
#include "semigroup/demo.hpp"
#include "semigroup/errors.hpp"
#include "semigroup/io.hpp"
#include "semigroup/lindblad.hpp"

using namespace semigroup;

namespace {

Matrix from_frozen(const std::vector<std::vector<cplx>>& rows)
{
    Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows[0].size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j) m(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
    return m;
}

ModelSpec load(const char* name)
{
    return parse_model(read_json_file(std::string(SEMIGROUP_DATA_DIR) + "/" + name));
}

double relative(const Matrix& a, const Matrix& b) { return max_abs(a - b) / max_abs(b); }

} // namespace

TEST_SUITE("generator") {

TEST_CASE("vanishing coupling: Q = 0, no channels, no defect")
{
    const SystemModel model({0.0, 0.3}, Matrix::Identity(3, 3) * 0.5 + Matrix::Constant(3, 3, 0.1), {});
    const BathState bath = BathState::gibbs(model, 1.0);
    const auto ex = extract_generator(model, bath, 0.2, Mode::trace_enforced);
    CHECK(max_abs(ex.bundle.q) == 0.0);
    CHECK(ex.channel_set.channels.empty());
    CHECK(ex.channel_set.zero_count == 9);
    CHECK(trace_defect(ex.bundle.q, ex.bundle.channels, demo_initial_state()) == 0.0);
}

TEST_CASE("extract demo reproduces the frozen dense evaluation")
{
    const ModelSpec spec = load("extract_demo.json");
    const BathState bath = spec.bath();
    const auto te = extract_generator(spec.model, bath, frozen::kExtractEta, Mode::trace_enforced);
    const auto raw = extract_generator(spec.model, bath, frozen::kExtractEta, Mode::raw);
    CHECK(relative(te.bundle.q, from_frozen(frozen::kExtractQ)) < 1e-10);
    CHECK(relative(superoperator(te.bundle).matrix, from_frozen(frozen::kExtractGeneratorTraceEnforced)) < 1e-10);
    CHECK(relative(superoperator(raw.bundle).matrix, from_frozen(frozen::kExtractGeneratorRaw)) < 1e-10);
    double norm = 0.0;
    for (const auto& c : te.bundle.channels) norm += c.weight * c.op.squaredNorm();
    CHECK(norm == doctest::Approx(frozen::kExtractChannelNorm).epsilon(1e-10));
    CHECK(static_cast<int>(te.bundle.channels.size()) == frozen::kExtractChannelCount);
}

TEST_CASE("channel count is #lambda times #xi above the floor")
{
    const SystemModel model = extract_demo_model();
    const BathState bath = BathState::gibbs(model, kDemoBeta);
    const auto cs = build_jump_channels(model, build_sectors(model), bath, 0.3);
    Index above = 0;
    for (Index i = 0; i < bath.weights().size(); ++i) above += bath.weights()(i) > kDefaultWeightFloor ? 1 : 0;
    CHECK(static_cast<Index>(cs.channels.size()) == model.d_b() * above);
    CHECK(cs.channels.size() == 16);

    const auto pruned = build_jump_channels(model, build_sectors(model), bath, 0.3, bath.weights()(1) * 1.0001);
    CHECK(pruned.channels.size() == 4);
    CHECK(pruned.pruned_count == 3);
    CHECK(pruned.pruned_mass == doctest::Approx(1.0 - bath.weights()(0)));
}

TEST_CASE("eta scan norms match the frozen dense evaluation")
{
    const ModelSpec spec = load("demo_g0.1.json");
    const auto rows = eta_scan(spec.model, spec.bath(), frozen::kDemoScanEtas);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].q_norm == doctest::Approx(frozen::kDemoScanQNorm[i]).epsilon(1e-10));
        CHECK(rows[i].channel_norm == doctest::Approx(frozen::kDemoScanChannelNorm[i]).epsilon(1e-10));
    }
}

TEST_CASE("Markov distances match the frozen dense evaluation")
{
    const ModelSpec spec = load("demo_g0.1.json");
    const BathState bath = spec.bath();
    const auto sec = build_sectors(spec.model);
    const auto ex = extract_generator(spec.model, bath, frozen::kDemoEta, Mode::trace_enforced);
    const Matrix rho1 = demo_initial_state();
    const Matrix full0 = embed_product_state(MicroState{rho1}, bath);
    for (std::size_t i = 0; i < frozen::kDemoTimes.size(); ++i) {
        const double t = frozen::kDemoTimes[i];
        const Matrix u = expm(-kI * sec.h1 * t);
        const Matrix exact = reduce(u * full0 * u.adjoint(), sec).rho;
        CHECK(trace_distance(exact, propagate(ex.bundle, rho1, t)) == doctest::Approx(frozen::kDemoMarkovDistance[i]).epsilon(1e-8));
    }
}

TEST_CASE("Q is linear in g to first order")
{
    RandomStream rng(31, 0);
    const SystemModel base = random_model(rng, 2, 4, 1.0);
    const double eta = 0.3;
    auto q_at = [&](double g) {
        const SystemModel m = base.scaled(g);
        return build_q(m, build_sectors(m), BathState::gibbs(m, 1.0), eta);
    };
    auto richardson = [&](double g) { return max_abs(q_at(2.0 * g) - 2.0 * q_at(g)); };
    CHECK(richardson(0.02) / richardson(0.01) == doctest::Approx(4.0).epsilon(0.05));

    auto first_order_gap = [&](double g) {
        const SystemModel m = base.scaled(g);
        return max_abs(q_at(g) - oracle::first_order_q(m, BathState::gibbs(m, 1.0).rho_m()));
    };
    CHECK(first_order_gap(0.02) / first_order_gap(0.01) == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("single bath level: closed-form channels")
{
    Matrix b00(1, 1), b01(1, 1), b11(1, 1);
    b00(0, 0) = 0.2;
    b01(0, 0) = cplx(0.05, 0.03);
    b11(0, 0) = -0.1;
    const SystemModel model({0.0, 0.4}, Matrix::Constant(1, 1, 0.7), {{0, 0, b00}, {0, 1, b01}, {1, 0, b01.adjoint()}, {1, 1, b11}});
    const auto sec = build_sectors(model);
    const BathState bath = BathState::gibbs(model, 1.0);
    const double eta = 0.25;
    const auto cs = build_jump_channels(model, sec, bath, eta);
    REQUIRE(cs.channels.size() == 1);
    const Matrix& l = cs.channels[0].op;
    for (Index k = 0; k < 2; ++k) {
        const auto p = SpectralPoint::for_energy(model.micro_energies()[k], eta);
        for (Index f = 0; f < 2; ++f) {
            const cplx t = t_block(sec, p, k, f).matrix(0, 0);
            const cplx expect = std::sqrt(2.0 * eta) * t
                                / cplx(model.micro_energies()[k] - model.micro_energies()[f], -eta);
            CHECK(std::abs(l(k, f) - expect) < 1e-15);
        }
    }
    const auto diag = timescale_report(model, bath, demo_initial_state(), eta);
    CHECK(diag.delta == 0.0);
    CHECK_FALSE(diag.warnings.empty());
    CHECK(diag.sigma == doctest::Approx(0.4));
    CHECK_THROWS_AS(default_eta(diag), DomainError);
}

TEST_CASE("assembled generator splits Q exactly")
{
    const SystemModel model = demo_model(0.1);
    const BathState bath = BathState::gibbs(model, kDemoBeta);
    const auto raw = extract_generator(model, bath, 0.4, Mode::raw);
    const auto te = extract_generator(model, bath, 0.4, Mode::trace_enforced);
    const Matrix& q = raw.bundle.q;
    CHECK(max_abs(0.5 * (q + q.adjoint()) + 0.5 * (q - q.adjoint()) - q) < 1e-15);
    Matrix e = Matrix::Zero(2, 2);
    e(1, 1) = kDemoSplitting;
    CHECK(max_abs(raw.bundle.h - e - 0.5 * kI * (q - q.adjoint())) < 1e-15);
    CHECK(max_abs(raw.bundle.loss + 0.5 * (q + q.adjoint())) < 1e-15);
    CHECK(max_abs(te.bundle.loss - 0.5 * channel_loss(te.bundle.channels, 2)) < 1e-15);
    CHECK(max_abs(te.bundle.h - raw.bundle.h) == 0.0);
}

TEST_CASE("trace_enforced mode conserves trace on random states")
{
    const SystemModel model = demo_model(0.1);
    const auto ex = extract_generator(model, BathState::gibbs(model, kDemoBeta), 0.4, Mode::trace_enforced);
    RandomStream rng(32, 0);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) worst = std::max(worst, std::abs(apply_generator(ex.bundle, random_density(rng, 2)).trace()));
    CHECK(worst <= 1e-12);
}

TEST_CASE("independent adjoint formula for Q")
{
    RandomStream rng(33, 0);
    const SystemModel model = random_model(rng, 3, 3, 0.2);
    const auto sec = build_sectors(model);
    const BathState bath = BathState::from_density(model, random_density(rng, 3));
    CHECK(max_abs(build_q(model, sec, bath, 0.3).adjoint() - build_q_adjoint(model, sec, bath, 0.3)) < 1e-10);
}

TEST_CASE("trace defect: degenerate micro energies in the plateau")
{
    const SystemModel model = demo_model(1e-3, {0.0, 0.0});
    const BathState bath = BathState::gibbs(model, kDemoBeta);
    const auto p = find_plateau(model, bath);
    const auto ex = extract_generator(model, bath, p.eta, Mode::raw);
    CHECK(trace_defect(ex.bundle.q, ex.bundle.channels, demo_initial_state()) <= 1e-6 * ex.bundle.q.norm());
}

TEST_CASE("raw and trace_enforced losses differ at relative order g^2")
{
    auto gap = [](double g) {
        const SystemModel model = demo_model(g, {0.0, 0.0});
        const BathState bath = BathState::gibbs(model, kDemoBeta);
        const auto raw = extract_generator(model, bath, 0.43, Mode::raw);
        const auto te = extract_generator(model, bath, 0.43, Mode::trace_enforced);
        return max_abs(raw.bundle.loss - te.bundle.loss) / raw.bundle.q.norm();
    };
    const double ratio = gap(0.02) / gap(0.01);
    CHECK(ratio == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("trace defect grows with a splitting that violates the coherence condition")
{
    double last = 0.0;
    for (double s : {0.1, 0.2, 0.4, 0.8}) {
        const SystemModel model = demo_model(0.05, {0.0, s});
        const BathState bath = BathState::gibbs(model, kDemoBeta);
        const auto ex = extract_generator(model, bath, 0.43, Mode::raw);
        const double d = trace_defect(ex.bundle.q, ex.bundle.channels, demo_initial_state()) / ex.bundle.q.norm();
        CHECK(d > last);
        last = d;
        if (s >= 0.2) CHECK_FALSE(timescale_report(model, bath, demo_initial_state(), 0.43).micro_coherence.ok);
    }
}

TEST_CASE("timescale flags")
{
    const SystemModel model = demo_model(0.05, {0.0, 1.5});
    const BathState bath = BathState::gibbs(model, kDemoBeta);
    Matrix diag_rho = Matrix::Zero(2, 2);
    diag_rho(0, 0) = 0.3;
    diag_rho(1, 1) = 0.7;
    const auto d = timescale_report(model, bath, diag_rho, 0.4);
    CHECK(d.micro_coherence.ok);
    CHECK(d.bath_equilibrium.ok);
    CHECK(d.tau == doctest::Approx(10.0 / d.sigma));
    CHECK_FALSE(timescale_report(model, bath, demo_initial_state(), 0.4).micro_coherence.ok);

    const BathState off = BathState::from_density(model, Matrix::Constant(6, 6, 1.0 / 6.0));
    CHECK_FALSE(timescale_report(model, off, diag_rho, 0.4).bath_equilibrium.ok);
    CHECK(default_eta(d) == doctest::Approx(10.0 * d.delta));
}

TEST_CASE("plateau scan picks an interior grid point")
{
    const SystemModel model = demo_model(0.1);
    const BathState bath = BathState::gibbs(model, kDemoBeta);
    const auto p = find_plateau(model, bath);
    CHECK(p.index > 0);
    CHECK(p.index < 24);
    const auto d = timescale_report(model, bath, demo_initial_state(), p.eta);
    CHECK(p.eta > d.delta);
    CHECK(p.eta < 0.5 * d.sigma);
    CHECK_THROWS_AS(eta_grid(1.0, 0.5), DomainError);
    CHECK_THROWS_AS(parse_mode("lossy"), DomainError);
    CHECK(parse_mode("raw") == Mode::raw);
}

TEST_CASE("ring channels: zero coupling, resummation, shift covariance")
{
    const RingModel free = demo_ring(4, 0.0);
    CHECK(position_resolved_channels(free, build_sectors(free.model), BathState::gibbs(free.model, 1.0), 0.3).empty());

    const RingModel ring = demo_ring(4, 0.1);
    const BathState bath = BathState::gibbs(ring.model, 1.0);
    const auto ch = position_resolved_channels(ring, build_sectors(ring.model), bath, 0.3);
    REQUIRE_FALSE(ch.empty());
    for (const auto& c : ch) CHECK(c.resummation_residual() < 1e-15);

    Matrix shift = Matrix::Zero(4, 4);
    for (Index f = 0; f < 4; ++f) shift(f, f) = std::exp(cplx(0.0, -2.0 * std::numbers::pi * f / 4.0));
    RandomStream rng(34, 0);
    const Matrix rho = random_density(rng, 4);
    auto dissipator = [&](std::size_t x, const Matrix& r) {
        Matrix out = Matrix::Zero(4, 4);
        for (const auto& c : ch) out += c.weight * c.site_ops[x] * r * c.site_ops[x].adjoint();
        return out;
    };
    for (std::size_t x = 0; x < 4; ++x) {
        const Matrix moved = shift * dissipator(x, shift.adjoint() * rho * shift) * shift.adjoint();
        CHECK(max_abs(dissipator((x + 1) % 4, rho) - moved) < 1e-15);
    }
}

}
