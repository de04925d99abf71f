// fock.cpp — Sector construction, bath states, embedding and reduction

#include "semigroup/fock.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "semigroup/errors.hpp"

namespace semigroup {

namespace {

constexpr double kModelTol = 1e-12;
constexpr double kStateTol = 1e-10;

bool lexicographic_less(const Vector& a, const Vector& b)
{
    for (Index i = 0; i < a.size(); ++i) {
        if (std::abs(a(i).real() - b(i).real()) > 1e-12) return a(i).real() < b(i).real();
        if (std::abs(a(i).imag() - b(i).imag()) > 1e-12) return a(i).imag() < b(i).imag();
    }
    return false;
}

} // namespace

void fix_phases(Matrix& vectors, double tol)
{
    for (Index c = 0; c < vectors.cols(); ++c) {
        for (Index r = 0; r < vectors.rows(); ++r) {
            const cplx v = vectors(r, c);
            if (std::abs(v) > tol) {
                vectors.col(c) *= std::conj(v) / std::abs(v);
                vectors(r, c) = std::abs(v);
                break;
            }
        }
    }
}

SystemModel::SystemModel(std::vector<double> micro_energies, Matrix h_m, std::vector<CouplingTerm> coupling_terms)
    : micro_energies_(std::move(micro_energies)), h_m_(std::move(h_m)), coupling_terms_(std::move(coupling_terms))
{
    if (micro_energies_.empty()) throw ModelError("SystemModel: micro_energies must be nonempty");
    for (double e : micro_energies_) {
        if (!std::isfinite(e)) throw ModelError("SystemModel: micro energies must be finite");
    }
    if (h_m_.rows() == 0 || h_m_.rows() != h_m_.cols()) throw ModelError("SystemModel: h_m must be square and nonempty");
    if (!h_m_.allFinite()) throw ModelError("SystemModel: h_m has non-finite entries");
    if (hermitian_defect(h_m_) > kModelTol) {
        std::ostringstream os;
        os << "SystemModel: h_m is not Hermitian (defect " << hermitian_defect(h_m_) << ")";
        throw ModelError(os.str());
    }
    const Index ds = d_s();
    const Index db = d_b();
    for (const auto& term : coupling_terms_) {
        if (term.f < 0 || term.f >= ds || term.g < 0 || term.g >= ds) {
            std::ostringstream os;
            os << "SystemModel: coupling term (" << term.f << "," << term.g << ") has a mode index outside [0," << ds << ")";
            throw ModelError(os.str());
        }
        if (term.b.rows() != db || term.b.cols() != db) {
            std::ostringstream os;
            os << "SystemModel: coupling term (" << term.f << "," << term.g << ") is " << term.b.rows() << "x"
               << term.b.cols() << ", expected " << db << "x" << db;
            throw ModelError(os.str());
        }
        if (!term.b.allFinite()) throw ModelError("SystemModel: coupling term has non-finite entries");
    }
    std::ostringstream offending;
    bool bad = false;
    for (Index f = 0; f < ds; ++f) {
        for (Index g = f; g < ds; ++g) {
            const double defect = max_abs(coupling_block(f, g) - coupling_block(g, f).adjoint());
            if (defect > kModelTol) {
                offending << (bad ? ", " : "") << "(" << f << "," << g << ") defect " << defect;
                bad = true;
            }
        }
    }
    if (bad) throw ModelError("SystemModel: coupling is not Hermitian, B_fg != B_gf^dagger for " + offending.str());

    auto spectrum = eigh(h_m_);
    fix_phases(spectrum.vectors);
    bath_spectrum_ = std::make_shared<const HermitianSpectrum>(std::move(spectrum));
}

Matrix SystemModel::coupling_block(Index f, Index g) const
{
    Matrix out = Matrix::Zero(d_b(), d_b());
    for (const auto& term : coupling_terms_) {
        if (term.f == f && term.g == g) out += term.b;
    }
    return out;
}

bool SystemModel::has_coupling() const
{
    return std::any_of(coupling_terms_.begin(), coupling_terms_.end(),
                       [](const CouplingTerm& t) { return max_abs(t.b) > 0.0; });
}

SystemModel SystemModel::scaled(double g) const
{
    std::vector<CouplingTerm> terms = coupling_terms_;
    for (auto& t : terms) t.b *= g;
    return SystemModel(micro_energies_, h_m_, std::move(terms));
}

SectorOperators build_sectors(const SystemModel& model)
{
    const Index ds = model.d_s();
    const Index db = model.d_b();
    const Index n1 = ds * db;

    SectorOperators sec;
    sec.d_s = ds;
    sec.d_b = db;
    sec.h0 = model.h_m();
    sec.a_maps.reserve(static_cast<std::size_t>(ds));
    for (Index f = 0; f < ds; ++f) {
        Matrix a = Matrix::Zero(db, n1);
        a.middleCols(f * db, db).setIdentity();
        sec.a_maps.push_back(std::move(a));
    }

    Matrix micro = Matrix::Zero(ds, ds);
    for (Index f = 0; f < ds; ++f) micro(f, f) = model.micro_energies()[static_cast<std::size_t>(f)];
    sec.h1_free = tensor(micro, Matrix::Identity(db, db)) + tensor(Matrix::Identity(ds, ds), model.h_m());

    sec.v1 = Matrix::Zero(n1, n1);
    for (const auto& term : model.coupling_terms()) {
        sec.v1.block(term.f * db, term.g * db, db, db) += term.b;
    }
    sec.h1 = sec.h1_free + sec.v1;
    sec.crossing_solver = std::make_shared<const ShiftedSylvesterSolver>(sec.h0, sec.h1);
    return sec;
}

Matrix gibbs_state(const Matrix& h_m, double beta)
{
    if (!std::isfinite(beta)) throw DomainError("gibbs_state: beta must be finite");
    const auto spec = eigh(h_m);
    const double e0 = spec.values.minCoeff();
    RealVector w = (-beta * (spec.values.array() - e0)).exp();
    w /= w.sum();
    return spec.vectors * w.cast<cplx>().asDiagonal() * spec.vectors.adjoint();
}

BathState::BathState(Matrix rho, RealVector weights, Matrix vectors, double defect)
    : rho_m_(std::move(rho)), weights_(std::move(weights)), eigenvectors_(std::move(vectors)), commutator_defect_(defect)
{
}

BathState BathState::gibbs(const SystemModel& model, double beta)
{
    if (!std::isfinite(beta)) throw DomainError("BathState::gibbs: beta must be finite");
    const auto& spec = model.bath_spectrum();
    const double e0 = spec.values.minCoeff();
    RealVector w = (-beta * (spec.values.array() - e0)).exp();
    w /= w.sum();
    Matrix rho = spec.vectors * w.cast<cplx>().asDiagonal() * spec.vectors.adjoint();
    const double defect = max_abs(rho * model.h_m() - model.h_m() * rho);
    return BathState(std::move(rho), std::move(w), spec.vectors, defect);
}

BathState BathState::from_density(const SystemModel& model, const Matrix& rho_m)
{
    if (rho_m.rows() != model.d_b() || rho_m.cols() != model.d_b()) {
        throw ShapeError("BathState: rho_m must be d_b x d_b");
    }
    if (hermitian_defect(rho_m) > kStateTol) throw ModelError("BathState: rho_m is not Hermitian");
    if (std::abs(rho_m.trace() - 1.0) > kStateTol) throw ModelError("BathState: rho_m must have unit trace");
    auto spec = eigh(rho_m);
    if (spec.values.minCoeff() < -kStateTol) throw ModelError("BathState: rho_m is not positive semidefinite");
    fix_phases(spec.vectors);

    const Index n = spec.values.size();
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
        const double wa = spec.values(a);
        const double wb = spec.values(b);
        if (std::abs(wa - wb) > 1e-12) return wa > wb;
        return lexicographic_less(spec.vectors.col(a), spec.vectors.col(b));
    });
    RealVector w(n);
    Matrix vecs(n, n);
    for (Index i = 0; i < n; ++i) {
        w(i) = std::max(0.0, spec.values(order[static_cast<std::size_t>(i)]));
        vecs.col(i) = spec.vectors.col(order[static_cast<std::size_t>(i)]);
    }
    const Matrix herm = hermitian_part(rho_m);
    const double defect = max_abs(herm * model.h_m() - model.h_m() * herm);
    return BathState(herm, std::move(w), std::move(vecs), defect);
}

MicroState MicroState::from_matrix(const Matrix& rho, double tol)
{
    if (rho.rows() == 0 || rho.rows() != rho.cols()) throw ShapeError("MicroState: matrix must be square and nonempty");
    if (hermitian_defect(rho) > tol) throw DomainError("MicroState: matrix is not Hermitian");
    if (min_eigenvalue(rho) < -tol) throw DomainError("MicroState: matrix is not positive semidefinite");
    const double tr = rho.trace().real();
    if (!(tr > 0.0) || tr > 1.0 + tol) throw DomainError("MicroState: trace must lie in (0, 1]");
    return MicroState{hermitian_part(rho)};
}

MicroState MicroState::from_ket(const Vector& ket)
{
    return from_matrix(projector(ket));
}

Matrix embed_product_state(const MicroState& rho1, const BathState& bath)
{
    return tensor(rho1.rho, bath.rho_m());
}

MicroState reduce(const Matrix& rho_full, const SectorOperators& sec)
{
    const Index n1 = sec.d_s * sec.d_b;
    if (rho_full.rows() != n1 || rho_full.cols() != n1) throw ShapeError("reduce: operator is not on the N=1 sector");
    Matrix out(sec.d_s, sec.d_s);
    for (Index g = 0; g < sec.d_s; ++g) {
        const Matrix& ag = sec.a_maps[static_cast<std::size_t>(g)];
        for (Index f = 0; f < sec.d_s; ++f) {
            // Tr(a†_f a_g ρ) = Tr(a_g ρ a†_f)
            out(g, f) = (ag * rho_full * sec.a_dagger(f)).trace();
        }
    }
    return MicroState{out};
}

} // namespace semigroup
