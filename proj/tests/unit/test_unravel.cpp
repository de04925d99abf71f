#include <doctest.h>

#include <array>

#include "semigroup/demo.hpp"
#include "semigroup/errors.hpp"
#include "semigroup/lindblad.hpp"
#include "semigroup/unravel.hpp"

using namespace semigroup;

namespace {

// Single channel with L†L = γI: L = √γ·U for a unitary U, weight π.
GeneratorBundle poisson_bundle(double gamma, double weight, RandomStream& rng)
{
    const Matrix u = expm(-kI * random_hermitian(rng, 3));
    GeneratorBundle b;
    b.h = random_hermitian(rng, 3);
    b.channels.push_back({weight, std::sqrt(gamma) * u, 0, 0});
    b.loss = 0.5 * weight * gamma * Matrix::Identity(3, 3);
    return b;
}

double poisson(int k, double mean)
{
    return std::exp(-mean + k * std::log(mean) - std::lgamma(k + 1.0));
}

GeneratorBundle amplitude_damping(double gamma)
{
    GeneratorBundle b;
    b.h = Matrix::Zero(2, 2);
    b.h(1, 1) = 0.3;
    Matrix l = Matrix::Zero(2, 2);
    l(0, 1) = std::sqrt(gamma);
    b.channels.push_back({1.0, l, 0, 0});
    b.loss = 0.5 * l.adjoint() * l;
    return b;
}

// 0.99 quantiles of χ² with 1..10 degrees of freedom.
constexpr std::array<double, 10> kChi2Critical = {6.635, 9.210, 11.345, 13.277, 15.086,
                                                  16.812, 18.475, 20.090, 21.666, 23.209};

// Elementwise |mean − target| / (standard error) over the trajectory dyads.
double max_z(const TrajectoryEnsemble& ens, const Matrix& target)
{
    const Index d = target.rows();
    const double n = static_cast<double>(ens.trajectories.size());
    double worst = 0.0;
    for (Index i = 0; i < d; ++i) {
        for (Index j = 0; j < d; ++j) {
            for (int part = 0; part < 2; ++part) {
                double s = 0.0, s2 = 0.0;
                for (const auto& tr : ens.trajectories) {
                    const cplx v = tr.survived ? tr.final_ket(i) * std::conj(tr.final_ket(j)) : cplx(0.0);
                    const double x = part ? v.imag() : v.real();
                    s += x;
                    s2 += x * x;
                }
                const double mean = s / n;
                const double se = std::sqrt(std::max(s2 / n - mean * mean, 0.0) / n);
                const double want = part ? target(i, j).imag() : target(i, j).real();
                if (se > 0.0) worst = std::max(worst, std::abs(mean - want) / se);
                else worst = std::max(worst, std::abs(mean - want) < 1e-12 ? 0.0 : 1e9);
            }
        }
    }
    return worst;
}

} // namespace

TEST_SUITE("unravel") {

TEST_CASE("no-jump propagator: unitary without loss, composition")
{
    RandomStream rng(51, 0);
    GeneratorBundle u;
    u.h = random_hermitian(rng, 3);
    u.loss = Matrix::Zero(3, 3);
    const Matrix uu = no_jump_propagator(u, 0.0, 1.3).u;
    CHECK(max_abs(uu * uu.adjoint() - Matrix::Identity(3, 3)) < 1e-13);

    const auto b = random_bundle(rng, 3, 3, Mode::trace_enforced);
    const Matrix a31 = no_jump_propagator(b, 0.2, 1.7).u;
    const Matrix a32 = no_jump_propagator(b, 0.9, 1.7).u;
    const Matrix a21 = no_jump_propagator(b, 0.2, 0.9).u;
    CHECK(max_abs(a32 * a21 - a31) < 1e-10);
}

TEST_CASE("Dyson terms: no channels, resummation, positivity, cost cap")
{
    RandomStream rng(52, 0);
    GeneratorBundle u;
    u.h = random_hermitian(rng, 2);
    u.loss = Matrix::Zero(2, 2);
    const Matrix rho = random_density(rng, 2);
    const auto only0 = dyson_terms(u, rho, 1.0, 4);
    CHECK(max_abs(only0.terms[0] - propagate(u, rho, 1.0)) < 1e-13);
    for (std::size_t k = 1; k < only0.terms.size(); ++k) CHECK(max_abs(only0.terms[k]) == 0.0);

    const auto b = random_bundle(rng, 3, 3, Mode::trace_enforced);
    const Matrix r3 = random_density(rng, 3);
    const double t = 0.8;
    const auto dy = dyson_terms(b, r3, t, 12);
    Matrix sum = Matrix::Zero(3, 3);
    for (const auto& term : dy.terms) {
        sum += term;
        CHECK(min_eigenvalue(term) >= -1e-10);
    }
    CHECK(dy.tail_mass < 1e-10);
    CHECK(max_abs(sum - propagate(b, r3, t)) < 1e-9);
    CHECK_THROWS_AS(dyson_terms(b, r3, t, 13), CostError);
}

TEST_CASE("L†L = γI gives Poisson counts")
{
    RandomStream rng(53, 0);
    const double gamma = 0.9, weight = 0.7, t = 1.4;
    const auto b = poisson_bundle(gamma, weight, rng);
    const auto dy = dyson_terms(b, random_density(rng, 3), t, 12);
    for (int k = 0; k <= 12; ++k) {
        CHECK(std::abs(dy.terms[static_cast<std::size_t>(k)].trace().real() - poisson(k, gamma * weight * t)) < 1e-10);
    }
}

TEST_CASE("p0 is non-increasing in t")
{
    RandomStream rng(54, 0);
    const auto b = random_bundle(rng, 3, 3, Mode::trace_enforced);
    const Vector psi = random_ket(rng, 3);
    double last = 1.0;
    for (int i = 0; i <= 50; ++i) {
        const auto o = outcome_probability(b, projector(psi), 0.1 * i, psi, 2);
        CHECK(o.p0 <= last + 1e-12);
        last = o.p0;
    }
}

TEST_CASE("trajectories without channels follow the pure evolution")
{
    RandomStream rng(55, 0);
    GeneratorBundle u;
    u.h = random_hermitian(rng, 3);
    u.loss = Matrix::Zero(3, 3);
    const Vector psi = random_ket(rng, 3);
    const auto ens = sample_trajectories(u, psi, 1.2, 50, 9);
    for (const auto& tr : ens.trajectories) CHECK(tr.events.empty());
    CHECK(max_abs(ens.averaged_state - propagate(u, projector(psi), 1.2)) < 1e-12);
    CHECK_THROWS_AS(sample_trajectories(u, 2.0 * psi, 1.0, 5, 1), DomainError);
}

TEST_CASE("amplitude damping: averaged excited population within 4 sigma")
{
    const auto b = amplitude_damping(0.7);
    Vector psi(2);
    psi << 0.6, 0.8;
    const double t = 1.5;
    const auto ens = sample_trajectories(b, psi, t, 10000, 2024);
    const double p = propagate(b, projector(psi), t)(1, 1).real();
    const double se = std::sqrt(p * (1.0 - p) / 10000.0);
    CHECK(std::abs(ens.averaged_state(1, 1).real() - p) < 4.0 * se);
}

TEST_CASE("event-count histogram against Dyson traces (chi-square)")
{
    RandomStream rng(56, 0);
    const auto b = random_bundle(rng, 3, 4, Mode::trace_enforced);
    const Vector psi = random_ket(rng, 3);
    const double t = 2.0;
    const std::size_t n = 10000;
    const auto ens = sample_trajectories(b, psi, t, n, 77);
    const auto dy = dyson_terms(b, projector(psi), t, 12);
    const auto hist = count_histogram(ens, 12);
    double chi2 = 0.0, exp_rest = 1.0, obs_rest = 1.0;
    int bins = 0;
    for (std::size_t k = 0; k < hist.size(); ++k) {
        const double e = dy.terms[k].trace().real() * n;
        if (e < 5.0) break;
        const double o = hist[k].probability * n;
        chi2 += (o - e) * (o - e) / e;
        exp_rest -= e / n;
        obs_rest -= o / n;
        ++bins;
    }
    if (exp_rest * n >= 5.0) {
        chi2 += (obs_rest - exp_rest) * (obs_rest - exp_rest) * n / exp_rest;
        ++bins;
    }
    REQUIRE(bins >= 2);
    CHECK(chi2 < kChi2Critical[static_cast<std::size_t>(bins - 2)]);
}

TEST_CASE("Monte Carlo averages match propagation in three scenarios")
{
    RandomStream rng(57, 0);
    struct Scenario {
        GeneratorBundle bundle;
        double t;
    };
    const std::vector<Scenario> scenarios = {
        {amplitude_damping(1.1), 1.0},
        {random_bundle(rng, 3, 3, Mode::trace_enforced), 1.5},
        {random_bundle(rng, 2, 2, Mode::raw), 1.0},
    };
    for (std::size_t i = 0; i < scenarios.size(); ++i) {
        const auto& s = scenarios[i];
        const Vector psi = random_ket(rng, s.bundle.dim());
        const auto ens = sample_trajectories(s.bundle, psi, s.t, 10000, 100 + i);
        CHECK(max_z(ens, propagate(s.bundle, projector(psi), s.t)) < 5.0);
    }
}

TEST_CASE("counting: Poisson probabilities and effects, resolution of identity")
{
    RandomStream rng(58, 0);
    const double gamma = 0.6;
    const auto b = poisson_bundle(gamma, 1.0, rng);
    const Matrix rho = random_density(rng, 3);
    const double dt = 1.7;
    Matrix total = Matrix::Zero(3, 3);
    double mass = 0.0;
    for (int k = 0; k <= 12; ++k) {
        CountingQuery q{0.5, 0.5 + dt, k, {0}, 12};
        const auto r = counting_probability(b, rho, q);
        const double p = poisson(k, gamma * dt);
        CHECK(std::abs(r.probability - p) < 1e-10);
        CHECK(max_abs(r.effect - p * Matrix::Identity(3, 3)) < 1e-10);
        total += r.effect;
        mass += r.probability;
        if (r.conditional_state) {
            CHECK(std::abs(r.conditional_state->trace() - 1.0) < 1e-10);
            CHECK(min_eigenvalue(*r.conditional_state) >= -1e-10);
        }
    }
    CHECK(std::abs(mass - 1.0) < 1e-9);
    CHECK(max_abs(total - Matrix::Identity(3, 3)) < 1e-9);
}

TEST_CASE("counting over all channels resums to the propagated trace")
{
    RandomStream rng(59, 0);
    const auto b = random_bundle(rng, 3, 3, Mode::trace_enforced);
    const Matrix rho = random_density(rng, 3);
    std::vector<std::size_t> all{0, 1, 2};
    double mass = 0.0;
    Matrix total = Matrix::Zero(3, 3);
    for (int k = 0; k <= 12; ++k) {
        const auto r = counting_probability(b, rho, CountingQuery{0.0, 0.6, k, all, 12});
        mass += r.probability;
        total += r.effect;
    }
    CHECK(std::abs(mass - propagate(b, rho, 0.6).trace().real()) < 1e-10);
    CHECK(max_abs(total - Matrix::Identity(3, 3)) < 1e-9);
}

TEST_CASE("counting a subset folds the other channels into the background")
{
    RandomStream rng(60, 0);
    const auto b = random_bundle(rng, 2, 3, Mode::trace_enforced);
    const Matrix rho = random_density(rng, 2);
    double mass = 0.0;
    for (int k = 0; k <= 12; ++k) mass += counting_probability(b, rho, CountingQuery{0.0, 1.0, k, {1}, 12}).probability;
    CHECK(std::abs(mass - 1.0) < 1e-9);
    CHECK(counting_probability(b, rho, CountingQuery{0.0, 1.0, 0, {1}, 12}).probability
          > counting_probability(b, rho, CountingQuery{0.0, 1.0, 0, {0, 1, 2}, 12}).probability);
}

TEST_CASE("counting query validation")
{
    RandomStream rng(61, 0);
    const auto b = random_bundle(rng, 2, 2, Mode::trace_enforced);
    const Matrix rho = random_density(rng, 2);
    CHECK_THROWS_AS(counting_probability(b, rho, CountingQuery{1.0, 1.0, 0, {0}, 12}), DomainError);
    CHECK_THROWS_AS(counting_probability(b, rho, CountingQuery{0.0, 1.0, 1, {}, 12}), DomainError);
    CHECK_THROWS_AS(counting_probability(b, rho, CountingQuery{0.0, 1.0, 1, {5}, 12}), DomainError);
    CHECK_THROWS_AS(counting_probability(b, rho, CountingQuery{0.0, 1.0, 13, {0}, 13}), CostError);
}

TEST_CASE("improbable outcomes carry no conditional state")
{
    const auto b = amplitude_damping(1.0);
    Matrix ground = Matrix::Zero(2, 2);
    ground(0, 0) = 1.0;
    const auto r = counting_probability(b, ground, CountingQuery{0.0, 1.0, 1, {0}, 12});
    CHECK(r.below_floor);
    CHECK_FALSE(r.conditional_state.has_value());
}

TEST_CASE("projector channels reprepare like a projective measurement")
{
    Matrix p = Matrix::Zero(3, 3);
    p(0, 0) = p(1, 1) = 0.5;
    p(0, 1) = p(1, 0) = 0.5;
    GeneratorBundle b;
    RandomStream rng(62, 0);
    b.h = random_hermitian(rng, 3);
    b.channels.push_back({1.0, 0.8 * p, 0, 0});
    b.loss = 0.5 * 0.64 * p;
    const Matrix rho = random_density(rng, 3);
    const Matrix expect = p * rho * p / (p * rho).trace();
    CHECK(max_abs(jump_update(b, rho, 0) - expect) < 1e-12);

    // one event at a known time s, then no events until t
    const double s = 0.4, t = 1.1;
    const Matrix before = no_jump_propagator(b, 0.0, s).apply(rho);
    const Matrix after = no_jump_propagator(b, s, t).apply(jump_update(b, before, 0));
    const Matrix direct = no_jump_propagator(b, s, t).apply(p * before * p / (p * before).trace());
    CHECK(max_abs(after / after.trace() - direct / direct.trace()) < 1e-9);
}

}
