// optics.cpp — Refractive index and interferometer scenario

#include "semigroup/optics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "semigroup/errors.hpp"
#include "semigroup/lindblad.hpp"
#include "semigroup/unravel.hpp"

namespace semigroup {

IndexResult refractive_index(const OpticsModel& model)
{
    if (!(model.nu > 0.0) || !std::isfinite(model.nu)) {
        std::ostringstream os;
        os << "refractive_index: frequency must be positive, got " << model.nu;
        throw DomainError(os.str());
    }
    const double h_nu = 2.0 * std::numbers::pi * model.nu;
    IndexResult out;
    for (const cplx v : model.potential) {
        cplx arg = 1.0 - v / h_nu;
        // A real V may leave −0 in the imaginary part, which would select the lower branch.
        if (arg.imag() == 0.0) arg.imag(0.0);
        out.n.push_back(std::sqrt(arg));
        const bool is_complex = arg.imag() != 0.0 || arg.real() < 0.0;
        out.complex_flag.push_back(is_complex);
        out.any_complex = out.any_complex || is_complex;
    }
    return out;
}

GeneratorBundle build_interferometer(const InterferometerScenario& s)
{
    if (s.v2.imag() < 0.0) throw DomainError("build_interferometer: Im V2 < 0 would be gain");
    if (!(s.gamma_w >= 0.0) || !(s.gamma_w1 >= 0.0)) throw DomainError("build_interferometer: rates must be >= 0");
    if (!(s.t_tr > 0.0)) throw DomainError("build_interferometer: transit time must be positive");
    GeneratorBundle b;
    b.mode = Mode::raw;
    b.h = Matrix::Zero(2, 2);
    b.h(1, 1) = s.v2.real() + s.phi / s.t_tr;
    b.loss = Matrix::Zero(2, 2);
    b.loss(0, 0) = 0.5 * s.gamma_w1;
    b.loss(1, 1) = s.v2.imag() + 0.5 * s.gamma_w;
    if (s.gamma_w > 0.0) {
        Matrix l = Matrix::Zero(2, 2);
        l(1, 1) = std::sqrt(s.gamma_w);
        b.channels.push_back(Channel{1.0, l, 1, 0});
    }
    if (s.gamma_w1 > 0.0) {
        Matrix l = Matrix::Zero(2, 2);
        l(0, 0) = std::sqrt(s.gamma_w1);
        b.channels.push_back(Channel{1.0, l, 0, 0});
    }
    return b;
}

double visibility(const std::vector<double>& intensities)
{
    if (intensities.empty()) throw DomainError("visibility: empty pattern");
    const auto [lo, hi] = std::minmax_element(intensities.begin(), intensities.end());
    const double sum = *hi + *lo;
    return sum > 0.0 ? (*hi - *lo) / sum : 0.0;
}

Vector balanced_input()
{
    Vector v(2);
    v << 1.0, 1.0;
    return v / std::sqrt(2.0);
}

double fringe_visibility(const Matrix& rho)
{
    const double tr = rho.trace().real();
    return tr > 0.0 ? 2.0 * std::abs(rho(0, 1)) / tr : 0.0;
}

InterferencePattern interference_pattern(const InterferometerScenario& base, const Vector& psi0,
                                         const std::vector<double>& phi_grid, int n_max)
{
    if (phi_grid.empty()) throw DomainError("interference_pattern: empty phase grid");
    if (psi0.size() != 2) throw ShapeError("interference_pattern: input must be a two-path ket");
    const Matrix rho0 = psi0 * psi0.adjoint();
    const Vector out_port = balanced_input();
    auto port = [&](const Matrix& r) { return (out_port.adjoint() * r * out_port)(0, 0).real(); };

    InterferencePattern pat;
    pat.points.resize(phi_grid.size());
    const auto n = static_cast<std::int64_t>(phi_grid.size());
    ExceptionSlot slot;
#pragma omp parallel for schedule(static) num_threads(thread_cap())
    for (std::int64_t i = 0; i < n; ++i) {
        slot.run([&] {
            InterferometerScenario s = base;
            s.phi = phi_grid[static_cast<std::size_t>(i)];
            const GeneratorBundle b = build_interferometer(s);
            const auto dyson = dyson_terms(b, rho0, s.t_tr, n_max);
            InterferencePoint& pt = pat.points[static_cast<std::size_t>(i)];
            pt.phi = s.phi;
            pt.total = port(propagate(b, rho0, s.t_tr));
            pt.coherent = port(dyson.terms.front());
            for (std::size_t k = 1; k < dyson.terms.size(); ++k) pt.background += port(dyson.terms[k]);
        });
    }
    slot.rethrow();
    // The φ dependence sits entirely in ρ₁₂ ∝ e^{iφ}, so each fringe is
    // Tr ρ/2 + Re ρ₁₂ and its visibility 2|ρ₁₂|/Tr ρ, independent of the grid.
    const GeneratorBundle b = build_interferometer(base);
    const auto dyson = dyson_terms(b, rho0, base.t_tr, n_max);
    Matrix events = Matrix::Zero(2, 2);
    for (std::size_t k = 1; k < dyson.terms.size(); ++k) events += dyson.terms[k];
    pat.visibility_total = fringe_visibility(propagate(b, rho0, base.t_tr));
    pat.visibility_coherent = fringe_visibility(dyson.terms.front());
    pat.visibility_background = fringe_visibility(events);
    pat.p0 = dyson.terms.front().trace().real();
    return pat;
}

cplx interferometer_coherence(const InterferometerScenario& s, const Matrix& rho0, double t)
{
    // ρ̇₁₂ = (iω − γ_w1/2 − Im V₂ − γ_w/2) ρ₁₂ with ω = Re V₂ + φ/t_tr; the
    // diagonal channels do not feed the coherence.
    const double omega = s.v2.real() + s.phi / s.t_tr;
    const double damping = 0.5 * s.gamma_w1 + s.v2.imag() + 0.5 * s.gamma_w;
    return rho0(0, 1) * std::exp(cplx(-damping, omega) * t);
}

} // namespace semigroup
