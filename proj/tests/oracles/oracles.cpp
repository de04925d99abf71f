#include "oracles.hpp"

#include <vector>

namespace oracle {

Matrix partial_trace(const Matrix& rho, Index d_s, Index d_b)
{
    Matrix out = Matrix::Zero(d_s, d_s);
    for (Index f = 0; f < d_s; ++f)
        for (Index g = 0; g < d_s; ++g)
            for (Index b = 0; b < d_b; ++b) out(f, g) += rho(f * d_b + b, g * d_b + b);
    return out;
}

Matrix rk4_exp(const Matrix& a, double t, int steps)
{
    const double h = t / steps;
    Matrix x = Matrix::Identity(a.rows(), a.cols());
    for (int s = 0; s < steps; ++s) {
        const Matrix k1 = a * x;
        const Matrix k2 = a * (x + 0.5 * h * k1);
        const Matrix k3 = a * (x + 0.5 * h * k2);
        const Matrix k4 = a * (x + h * k3);
        x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return x;
}

Matrix occupation_h1(const SystemModel& model)
{
    const Index ds = model.d_s();
    const Index db = model.d_b();
    const Index n_occ = Index{1} << ds;
    const Index dim = n_occ * db;
    // a_f |n⟩ = |n − e_f⟩ if bit f is set (hard-core truncation suffices on N ≤ 1)
    auto lower = [&](Index f) {
        Matrix a = Matrix::Zero(n_occ, n_occ);
        for (Index n = 0; n < n_occ; ++n)
            if (n & (Index{1} << f)) a(n ^ (Index{1} << f), n) = 1.0;
        return a;
    };
    std::vector<Matrix> a;
    for (Index f = 0; f < ds; ++f) a.push_back(lower(f));
    const Matrix eye_b = Matrix::Identity(db, db);
    const Matrix eye_o = Matrix::Identity(n_occ, n_occ);
    auto kron = [](const Matrix& x, const Matrix& y) {
        Matrix out(x.rows() * y.rows(), x.cols() * y.cols());
        for (Index i = 0; i < x.rows(); ++i)
            for (Index j = 0; j < x.cols(); ++j) out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
        return out;
    };
    Matrix h = kron(eye_o, model.h_m());
    for (Index f = 0; f < ds; ++f) h += model.micro_energies()[f] * kron(a[f].adjoint() * a[f], eye_b);
    for (const auto& term : model.coupling_terms()) h += kron(a[term.f].adjoint() * a[term.g], term.b);
    // N=1 occupation states in mode order f = 0..d_s−1
    Matrix p = Matrix::Zero(ds * db, dim);
    for (Index f = 0; f < ds; ++f)
        for (Index b = 0; b < db; ++b) p(f * db + b, (Index{1} << f) * db + b) = 1.0;
    return p * h * p.adjoint();
}

Matrix operator_sum_embed(const Matrix& rho1, const Matrix& rho_m)
{
    const Index ds = rho1.rows();
    const Index db = rho_m.rows();
    Matrix out = Matrix::Zero(ds * db, ds * db);
    for (Index g = 0; g < ds; ++g) {
        for (Index f = 0; f < ds; ++f) {
            Matrix ag_dag = Matrix::Zero(ds * db, db);
            Matrix af = Matrix::Zero(db, ds * db);
            ag_dag.block(g * db, 0, db, db) = Matrix::Identity(db, db);
            af.block(0, f * db, db, db) = Matrix::Identity(db, db);
            out += ag_dag * rho_m * af * rho1(g, f);
        }
    }
    return out;
}

namespace {

// vec(A Y C) = (Cᵀ ⊗ A) vec Y, written out entrywise.
Matrix kron_t(const Matrix& c, const Matrix& a)
{
    const Matrix ct = c.transpose();
    Matrix out(ct.rows() * a.rows(), ct.cols() * a.cols());
    for (Index i = 0; i < ct.rows(); ++i)
        for (Index j = 0; j < ct.cols(); ++j) out.block(i * a.rows(), j * a.cols(), a.rows(), a.cols()) = ct(i, j) * a;
    return out;
}

} // namespace

Matrix dense_t_apply(const SystemModel& model, cplx z, Index k)
{
    const Index ds = model.d_s();
    const Index db = model.d_b();
    const Index n1 = ds * db;
    Matrix v1 = Matrix::Zero(n1, n1);
    for (const auto& t : model.coupling_terms()) v1.block(t.f * db, t.g * db, db, db) += t.b;
    Matrix h1 = v1;
    for (Index f = 0; f < ds; ++f) {
        h1.block(f * db, f * db, db, db) += model.h_m();
        h1.block(f * db, f * db, db, db) += model.micro_energies()[f] * Matrix::Identity(db, db);
    }
    const cplx i{0.0, 1.0};
    const Matrix eye_b = Matrix::Identity(db, db);
    const Matrix eye_1 = Matrix::Identity(n1, n1);
    const Matrix big_h = i * (kron_t(eye_1, model.h_m()) - kron_t(h1, eye_b));
    const Matrix big_v = -i * kron_t(v1, eye_b);
    Matrix a = Matrix::Zero(db, n1);
    a.block(0, k * db, db, db) = eye_b;
    const Eigen::VectorXcd va = big_v * a.reshaped();
    const Matrix shifted = z * Matrix::Identity(big_h.rows(), big_h.cols()) - big_h;
    const Eigen::VectorXcd y = va + big_v * shifted.fullPivLu().solve(va);
    return y.reshaped(db, n1);
}

Matrix first_order_q(const SystemModel& model, const Matrix& rho_m)
{
    const Index ds = model.d_s();
    Matrix q = Matrix::Zero(ds, ds);
    for (const auto& t : model.coupling_terms()) q(t.f, t.g) += cplx(0.0, -1.0) * (t.b * rho_m).trace();
    return q;
}

} // namespace oracle
