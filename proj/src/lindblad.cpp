// lindblad.cpp — Semigroup propagation and checks

#include "semigroup/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "semigroup/errors.hpp"

namespace semigroup {

Superoperator superoperator(const GeneratorBundle& bundle)
{
    const Index d = bundle.dim();
    const Matrix id = Matrix::Identity(d, d);
    const Matrix heff = effective_hamiltonian(bundle);
    // −i(𝖧−iA)ρ + iρ(𝖧+iA)
    Matrix s = -kI * left_multiplication(heff) + kI * right_multiplication(heff.adjoint());
    for (const auto& c : bundle.channels) s += c.weight * sandwich(c.op, c.op.adjoint());
    return Superoperator(std::move(s), d);
}

Matrix apply_generator(const GeneratorBundle& bundle, const Matrix& rho)
{
    if (rho.rows() != bundle.dim() || rho.cols() != bundle.dim()) {
        throw ShapeError("apply_generator: state shape differs from bundle dimension");
    }
    const Matrix heff = effective_hamiltonian(bundle);
    Matrix out = -kI * (heff * rho) + kI * (rho * heff.adjoint());
    for (const auto& c : bundle.channels) out += c.weight * (c.op * rho * c.op.adjoint());
    return out;
}

namespace {

void check_time(double t, const char* who)
{
    if (!(t >= 0.0) || !std::isfinite(t)) {
        std::ostringstream os;
        os << who << ": time must be finite and nonnegative, got " << t;
        throw DomainError(os.str());
    }
}

} // namespace

Superoperator propagator(const GeneratorBundle& bundle, double t)
{
    check_time(t, "propagator");
    const Superoperator s = superoperator(bundle);
    return Superoperator(expm(s.matrix * t), s.dim);
}

Matrix rk4_propagate(const GeneratorBundle& bundle, const Matrix& rho0, double t, const Tolerances& tol)
{
    check_time(t, "rk4_propagate");
    const Matrix heff = effective_hamiltonian(bundle);
    const Matrix heff_adj = heff.adjoint();
    auto rhs = [&](const Matrix& r) {
        Matrix out = -kI * (heff * r) + kI * (r * heff_adj);
        for (const auto& c : bundle.channels) out += c.weight * (c.op * r * c.op.adjoint());
        return out;
    };
    auto step = [&](const Matrix& r, double h) {
        const Matrix k1 = rhs(r);
        const Matrix k2 = rhs(r + 0.5 * h * k1);
        const Matrix k3 = rhs(r + 0.5 * h * k2);
        const Matrix k4 = rhs(r + h * k3);
        return Matrix(r + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
    };

    Matrix rho = rho0;
    double now = 0.0;
    double h = std::min(t, 0.05);
    int guard = 0;
    while (now < t) {
        if (++guard > 10'000'000) throw ConditioningError("rk4_propagate: step size collapsed");
        h = std::min(h, t - now);
        const Matrix full = step(rho, h);
        const Matrix half = step(step(rho, 0.5 * h), 0.5 * h);
        const double err = max_abs(full - half) / 15.0;
        if (err <= tol.rk4 || h < 1e-12) {
            rho = half + (half - full) / 15.0;
            now += h;
            const double grow = err > 0.0 ? 0.9 * std::pow(tol.rk4 / err, 0.2) : 2.0;
            h *= std::clamp(grow, 0.2, 2.0);
        } else {
            h *= std::clamp(0.9 * std::pow(tol.rk4 / err, 0.2), 0.1, 0.5);
        }
    }
    return rho;
}

Matrix propagate(const GeneratorBundle& bundle, const Matrix& rho0, double t, Propagation method,
                 const Tolerances& tol)
{
    check_time(t, "propagate");
    if (rho0.rows() != bundle.dim() || rho0.cols() != bundle.dim()) {
        throw ShapeError("propagate: state shape differs from bundle dimension");
    }
    if (t == 0.0) return rho0;
    if (method == Propagation::rk4) return rk4_propagate(bundle, rho0, t, tol);
    return propagator(bundle, t).apply(rho0);
}

Matrix propagate_schedule(const std::vector<Segment>& schedule, const Matrix& rho0, Propagation method)
{
    Matrix rho = rho0;
    for (const auto& seg : schedule) rho = propagate(seg.bundle, rho, seg.duration, method);
    return rho;
}

std::vector<PropagatorReport> verify_cp_tp(const GeneratorBundle& bundle, const std::vector<double>& t_list,
                                           const Tolerances& tol)
{
    const Index d = bundle.dim();
    const Superoperator s = superoperator(bundle);
    std::vector<PropagatorReport> out;
    out.reserve(t_list.size());
    for (double t : t_list) {
        check_time(t, "verify_cp_tp");
        const Superoperator phi(expm(s.matrix * t), d);
        PropagatorReport r;
        r.t = t;
        // Tr Φ(E_ij) = Σ_a Φ[(a,a),(i,j)] in stacked indices.
        for (Index i = 0; i < d; ++i) {
            for (Index j = 0; j < d; ++j) {
                cplx tr = 0.0;
                for (Index a = 0; a < d; ++a) tr += phi.matrix(a + a * d, i + j * d);
                r.trace_drift = std::max(r.trace_drift, std::abs(tr - (i == j ? 1.0 : 0.0)));
            }
        }
        r.choi_min_eig = min_eigenvalue(choi_matrix(phi));
        r.cp_ok = r.choi_min_eig >= tol.choi;
        r.tp_ok = r.trace_drift <= tol.trace;
        out.push_back(r);
    }
    return out;
}

Matrix effective_hamiltonian(const GeneratorBundle& bundle)
{
    return bundle.h - kI * bundle.loss;
}

JumpMixture normalized_jump_mixture(const GeneratorBundle& bundle, const Matrix& rho, double tau,
                                    const Tolerances& tol)
{
    if (rho.rows() != bundle.dim() || rho.cols() != bundle.dim()) {
        throw ShapeError("normalized_jump_mixture: state shape differs from bundle dimension");
    }
    check_time(tau, "normalized_jump_mixture");
    const double rate = (2.0 * bundle.loss * rho).trace().real();
    if (!(rate > tol.jump_floor)) {
        std::ostringstream os;
        os << "normalized_jump_mixture: Tr(2A rho) = " << rate << " is at or below the floor " << tol.jump_floor;
        throw DomainError(os.str());
    }
    Matrix jumped = Matrix::Zero(rho.rows(), rho.cols());
    for (const auto& c : bundle.channels) jumped += c.weight * (c.op * rho * c.op.adjoint());
    JumpMixture out;
    out.weight = tau * rate;
    out.mixture = jumped / rate;
    out.delta_rho = tau * jumped;
    return out;
}

} // namespace semigroup
