// unravel.cpp — Subcollections, trajectories and counting

#include "semigroup/unravel.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "semigroup/errors.hpp"
#include "semigroup/lindblad.hpp"
#include "semigroup/rng.hpp"

namespace semigroup {

namespace {

void check_interval(double t1, double t2, const char* who)
{
    if (!std::isfinite(t1) || !std::isfinite(t2) || t2 < t1) {
        std::ostringstream os;
        os << who << ": need finite t1 <= t2, got [" << t1 << ", " << t2 << "]";
        throw DomainError(os.str());
    }
}

Matrix no_jump_generator(const GeneratorBundle& bundle)
{
    const Matrix heff = effective_hamiltonian(bundle);
    return -kI * left_multiplication(heff) + kI * right_multiplication(heff.adjoint());
}

Matrix jump_generator(const GeneratorBundle& bundle, const std::vector<std::size_t>& which)
{
    const Index d = bundle.dim();
    Matrix j = Matrix::Zero(d * d, d * d);
    for (std::size_t c : which) {
        const auto& ch = bundle.channels[c];
        j += ch.weight * sandwich(ch.op, ch.op.adjoint());
    }
    return j;
}

// exp of the block generator with `diag` on the diagonal and `sub` one block
// below it; returns the first block column, blocks 0..n.
std::vector<Matrix> count_resolved_column(const Matrix& diag, const Matrix& sub, int n, double t)
{
    const Index s = diag.rows();
    const Index total = s * (n + 1);
    if (total > kMaxDenseDim) {
        std::ostringstream os;
        os << "count-resolved generator of dimension " << total << " exceeds " << kMaxDenseDim;
        throw CostError(os.str());
    }
    Matrix g = Matrix::Zero(total, total);
    for (int k = 0; k <= n; ++k) {
        g.block(k * s, k * s, s, s) = diag;
        if (k < n) g.block((k + 1) * s, k * s, s, s) = sub;
    }
    const Matrix e = expm(g * t);
    std::vector<Matrix> out;
    out.reserve(static_cast<std::size_t>(n + 1));
    for (int k = 0; k <= n; ++k) out.push_back(e.block(k * s, 0, s, s));
    return out;
}

std::vector<std::size_t> all_channels(const GeneratorBundle& bundle)
{
    std::vector<std::size_t> out(bundle.channels.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = i;
    return out;
}

} // namespace

Contraction no_jump_propagator(const GeneratorBundle& bundle, double t1, double t2)
{
    check_interval(t1, t2, "no_jump_propagator");
    return Contraction{expm(-kI * effective_hamiltonian(bundle) * (t2 - t1))};
}

DysonExpansion dyson_terms(const GeneratorBundle& bundle, const Matrix& rho0, double t, int n_max)
{
    if (n_max < 0) throw DomainError("dyson_terms: n_max must be nonnegative");
    if (n_max > kMaxDysonOrder) {
        std::ostringstream os;
        os << "dyson_terms: n_max = " << n_max << " exceeds the cap " << kMaxDysonOrder;
        throw CostError(os.str());
    }
    check_interval(0.0, t, "dyson_terms");
    const Index d = bundle.dim();
    if (rho0.rows() != d || rho0.cols() != d) throw ShapeError("dyson_terms: state shape differs from bundle");

    const auto column = count_resolved_column(no_jump_generator(bundle), jump_generator(bundle, all_channels(bundle)),
                                              n_max, t);
    DysonExpansion out;
    const Vector v0 = vec(rho0);
    double mass = 0.0;
    for (const auto& block : column) {
        out.terms.push_back(unvec(block * v0, d));
        mass += out.terms.back().trace().real();
    }
    out.tail_mass = propagate(bundle, rho0, t).trace().real() - mass;
    return out;
}

OutcomeProbabilities outcome_probability(const GeneratorBundle& bundle, const Matrix& rho0, double t,
                                         const Vector& alpha_ket, int n_max)
{
    if (alpha_ket.size() != bundle.dim()) throw ShapeError("outcome_probability: ket dimension differs from bundle");
    if (std::abs(alpha_ket.norm() - 1.0) > 1e-10) throw DomainError("outcome_probability: ket is not normalized");
    const auto dyson = dyson_terms(bundle, rho0, t, n_max);
    OutcomeProbabilities out;
    for (const auto& term : dyson.terms) {
        out.per_count.push_back((alpha_ket.adjoint() * term * alpha_ket)(0, 0).real());
    }
    out.p0 = dyson.terms.front().trace().real();
    return out;
}

namespace {

// ψ(τ) = exp(−iK τ)ψ, through an eigendecomposition of K when it is well
// conditioned and through expm otherwise.
class NoJumpEvolver {
public:
    explicit NoJumpEvolver(const Matrix& heff) : heff_(heff)
    {
        Eigen::ComplexEigenSolver<Matrix> es(heff);
        if (es.info() == Eigen::Success) {
            const Eigen::JacobiSVD<Matrix> svd(es.eigenvectors());
            const auto& s = svd.singularValues();
            if (s(s.size() - 1) > 0.0 && s(0) / s(s.size() - 1) < 1e8) {
                values_ = es.eigenvalues();
                vectors_ = es.eigenvectors();
                inverse_ = vectors_.inverse();
                diagonal_ = true;
            }
        }
    }

    Vector evolve(const Vector& psi, double tau) const
    {
        if (diagonal_) {
            Vector c = inverse_ * psi;
            for (Index i = 0; i < c.size(); ++i) c(i) *= std::exp(-kI * values_(i) * tau);
            return vectors_ * c;
        }
        return expm(-kI * heff_ * tau) * psi;
    }

private:
    Matrix heff_;
    Vector values_;
    Matrix vectors_;
    Matrix inverse_;
    bool diagonal_ = false;
};

Trajectory run_trajectory(const GeneratorBundle& bundle, const NoJumpEvolver& evolver, const Vector& psi0, double t,
                          std::uint64_t seed, std::uint64_t index)
{
    RandomStream rng(seed, index);
    Trajectory tr;
    tr.seed = seed;
    tr.index = index;
    Vector psi = psi0;
    double now = 0.0;
    const std::size_t n_channels = bundle.channels.size();
    std::vector<double> rates(n_channels);

    while (true) {
        const double threshold = rng.uniform();
        const double remaining = t - now;
        const Vector end = evolver.evolve(psi, remaining);
        if (end.squaredNorm() > threshold || remaining <= 0.0) {
            tr.final_ket = end / end.norm();
            return tr;
        }
        double lo = 0.0;
        double hi = remaining;
        for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, t); ++it) {
            const double mid = 0.5 * (lo + hi);
            if (evolver.evolve(psi, mid).squaredNorm() > threshold) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        now += hi;
        psi = evolver.evolve(psi, hi);
        psi /= psi.norm();

        double total = 0.0;
        for (std::size_t c = 0; c < n_channels; ++c) {
            const auto& ch = bundle.channels[c];
            rates[c] = ch.weight * (ch.op * psi).squaredNorm();
            total += rates[c];
        }
        const double decay = 2.0 * (psi.adjoint() * bundle.loss * psi)(0, 0).real();
        // Absorption only when the loss exceeds the channel rates beyond roundoff.
        const double scale = decay - total > 1e-10 * decay ? decay : total;
        const double u = rng.uniform() * scale;
        if (u >= total || total <= 0.0) {
            // Norm loss not carried by any channel: absorption.
            tr.survived = false;
            tr.final_ket = psi;
            return tr;
        }
        std::size_t chosen = n_channels - 1;
        double acc = 0.0;
        for (std::size_t c = 0; c < n_channels; ++c) {
            acc += rates[c];
            if (u < acc) {
                chosen = c;
                break;
            }
        }
        const auto& ch = bundle.channels[chosen];
        tr.events.push_back(Event{now, chosen, ch.lambda, ch.xi});
        psi = ch.op * psi;
        psi /= psi.norm();
    }
}

Matrix pairwise_sum(const std::vector<Trajectory>& trs, std::size_t lo, std::size_t hi, Index d)
{
    if (hi - lo == 1) {
        const auto& tr = trs[lo];
        return tr.survived ? Matrix(tr.final_ket * tr.final_ket.adjoint()) : Matrix(Matrix::Zero(d, d));
    }
    const std::size_t mid = lo + (hi - lo) / 2;
    return pairwise_sum(trs, lo, mid, d) + pairwise_sum(trs, mid, hi, d);
}

} // namespace

TrajectoryEnsemble sample_trajectories(const GeneratorBundle& bundle, const Vector& psi0, double t,
                                       std::size_t n_traj, std::uint64_t seed, Execution exec)
{
    if (n_traj == 0) throw DomainError("sample_trajectories: n_traj must be at least 1");
    check_interval(0.0, t, "sample_trajectories");
    if (psi0.size() != bundle.dim()) throw ShapeError("sample_trajectories: ket dimension differs from bundle");
    if (std::abs(psi0.norm() - 1.0) > 1e-10) throw DomainError("sample_trajectories: initial ket is not normalized");

    const NoJumpEvolver evolver(effective_hamiltonian(bundle));
    TrajectoryEnsemble out;
    out.trajectories.resize(n_traj);
    const auto n = static_cast<std::int64_t>(n_traj);

    ExceptionSlot slot;
#pragma omp parallel for schedule(dynamic, 64) num_threads(thread_cap()) if (exec == Execution::parallel)
    for (std::int64_t i = 0; i < n; ++i) {
        slot.run([&] {
            out.trajectories[static_cast<std::size_t>(i)] =
                run_trajectory(bundle, evolver, psi0, t, seed, static_cast<std::uint64_t>(i));
        });
    }
    slot.rethrow();
    out.averaged_state = pairwise_sum(out.trajectories, 0, n_traj, bundle.dim()) / static_cast<double>(n_traj);
    return out;
}

std::vector<CountEstimate> count_histogram(const TrajectoryEnsemble& ensemble, int n_max)
{
    if (n_max < 0) throw DomainError("count_histogram: n_max must be nonnegative");
    std::vector<std::size_t> counts(static_cast<std::size_t>(n_max + 1), 0);
    for (const auto& tr : ensemble.trajectories) {
        if (tr.events.size() <= static_cast<std::size_t>(n_max)) ++counts[tr.events.size()];
    }
    const auto n = static_cast<double>(ensemble.trajectories.size());
    std::vector<CountEstimate> out;
    for (std::size_t c : counts) {
        const double p = static_cast<double>(c) / n;
        out.push_back(CountEstimate{p, std::sqrt(p * (1.0 - p) / n)});
    }
    return out;
}

Superoperator counting_operation(const GeneratorBundle& bundle, const CountingQuery& query)
{
    check_interval(query.t1, query.t2, "counting_probability");
    if (!(query.t2 > query.t1)) throw DomainError("counting_probability: need t2 > t1");
    if (query.n_events < 0) throw DomainError("counting_probability: n_events must be nonnegative");
    if (query.n_max > kMaxDysonOrder || query.n_events > query.n_max) {
        std::ostringstream os;
        os << "counting_probability: n_events = " << query.n_events << " with n_max = " << query.n_max
           << " exceeds the cap " << kMaxDysonOrder;
        throw CostError(os.str());
    }
    if (query.n_events > 0 && query.sigma.empty()) {
        throw DomainError("counting_probability: sigma must be nonempty when n_events > 0");
    }
    std::set<std::size_t> counted;
    for (std::size_t c : query.sigma) {
        if (c >= bundle.channels.size()) {
            std::ostringstream os;
            os << "counting_probability: channel index " << c << " outside [0," << bundle.channels.size() << ")";
            throw DomainError(os.str());
        }
        counted.insert(c);
    }
    std::vector<std::size_t> in_sigma(counted.begin(), counted.end());
    std::vector<std::size_t> folded;
    for (std::size_t c = 0; c < bundle.channels.size(); ++c) {
        if (counted.count(c) == 0) folded.push_back(c);
    }
    const Matrix diag = no_jump_generator(bundle) + jump_generator(bundle, folded);
    const Matrix sub = jump_generator(bundle, in_sigma);
    auto column = count_resolved_column(diag, sub, query.n_events, query.t2 - query.t1);
    return Superoperator(std::move(column.back()), bundle.dim());
}

EffectReport counting_probability(const GeneratorBundle& bundle, const Matrix& rho_at_t1, const CountingQuery& query)
{
    const Index d = bundle.dim();
    if (rho_at_t1.rows() != d || rho_at_t1.cols() != d) {
        throw ShapeError("counting_probability: state shape differs from bundle");
    }
    const Superoperator op = counting_operation(bundle, query);
    EffectReport out;
    out.operation_output = op.apply(rho_at_t1);
    out.probability = out.operation_output.trace().real();
    // Tr(𝓕ρ) = vec(I)ᵀ M vec(ρ) = Σ F_ij ρ_ji, so vec(Fᵀ) = Mᵀ vec(I).
    const Vector id = vec(Matrix::Identity(d, d));
    out.effect = hermitian_part(unvec(op.matrix.transpose() * id, d).transpose());
    if (out.probability > kProbabilityFloor) {
        out.conditional_state = out.operation_output / out.probability;
    } else {
        out.below_floor = true;
    }
    return out;
}

Matrix jump_update(const GeneratorBundle& bundle, const Matrix& rho, std::size_t channel)
{
    if (channel >= bundle.channels.size()) throw DomainError("jump_update: channel index out of range");
    const auto& ch = bundle.channels[channel];
    const Matrix out = ch.weight * (ch.op * rho * ch.op.adjoint());
    const double tr = out.trace().real();
    if (!(tr > kProbabilityFloor)) throw DomainError("jump_update: the channel annihilates the state");
    return out / tr;
}

} // namespace semigroup
