// demo.cpp — Reference models and random scenarios

#include "semigroup/demo.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <numbers>

namespace semigroup {

namespace {

double spectral_norm(const Matrix& m)
{
    return Eigen::JacobiSVD<Matrix>(m).singularValues()(0);
}

Matrix hopping(Index n)
{
    Matrix m = Matrix::Zero(n, n);
    for (Index i = 0; i + 1 < n; ++i) m(i, i + 1) = m(i + 1, i) = 1.0;
    return m;
}

Matrix phased_kernel(Index n)
{
    Matrix m(n, n);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
            const auto d = static_cast<double>(i - j);
            m(i, j) = std::polar(1.0 / (1.0 + std::abs(d)), 0.7 * d);
        }
    }
    return m;
}

SystemModel level_model(double g, std::vector<double> micro_energies, const std::vector<double>& levels)
{
    const auto n = static_cast<Index>(levels.size());
    Matrix h_m = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i) h_m(i, i) = levels[static_cast<std::size_t>(i)];
    Matrix b00 = hopping(n);
    b00 /= spectral_norm(b00);
    Matrix b01 = phased_kernel(n);
    b01 *= 0.5 / spectral_norm(b01);
    std::vector<CouplingTerm> terms;
    terms.push_back({0, 0, g * b00});
    if (micro_energies.size() > 1) {
        terms.push_back({0, 1, g * b01});
        terms.push_back({1, 0, g * Matrix(b01.adjoint())});
    }
    return SystemModel(std::move(micro_energies), h_m, std::move(terms));
}

} // namespace

SystemModel demo_model(double g, std::vector<double> micro_energies)
{
    return level_model(g, std::move(micro_energies), {-2.0, -1.3, -0.5, 0.35, 1.1, 2.0});
}

SystemModel extract_demo_model(double g)
{
    return level_model(g, {0.0, kDemoSplitting}, {-1.5, -0.4, 0.6, 1.5});
}

RingModel demo_ring(Index nx, double g)
{
    std::vector<double> energies;
    for (Index f = 0; f < nx; ++f) energies.push_back(-std::cos(2.0 * std::numbers::pi * f / nx));
    Matrix h_m = Matrix::Zero(nx, nx);
    Matrix shift = Matrix::Zero(nx, nx);
    for (Index x = 0; x < nx; ++x) {
        const Index next = (x + 1) % nx;
        h_m(next, x) += -0.6;
        h_m(x, next) += -0.6;
        shift(next, x) = 1.0;
    }
    std::vector<CouplingTerm> terms;
    for (Index f = 0; f < nx; ++f) {
        for (Index h = 0; h < nx; ++h) {
            Matrix b = Matrix::Zero(nx, nx);
            for (Index x = 0; x < nx; ++x) b(x, x) = g * std::conj(plane_wave(f, x, nx)) * plane_wave(h, x, nx);
            terms.push_back({f, h, b});
        }
    }
    return RingModel{SystemModel(std::move(energies), h_m, std::move(terms)), nx, 1.0, shift};
}

Matrix demo_initial_state()
{
    return Matrix::Constant(2, 2, 0.5);
}

Matrix random_matrix(RandomStream& rng, Index rows, Index cols)
{
    Matrix m(rows, cols);
    for (Index j = 0; j < cols; ++j) {
        for (Index i = 0; i < rows; ++i) {
            const double r = std::sqrt(-2.0 * std::log(rng.uniform()));
            const double a = 2.0 * std::numbers::pi * rng.uniform();
            m(i, j) = cplx(r * std::cos(a), r * std::sin(a)) / std::sqrt(2.0);
        }
    }
    return m;
}

Matrix random_hermitian(RandomStream& rng, Index d)
{
    return hermitian_part(random_matrix(rng, d, d));
}

Matrix random_density(RandomStream& rng, Index d)
{
    const Matrix g = random_matrix(rng, d, d);
    Matrix rho = g * g.adjoint();
    rho /= rho.trace().real();
    return hermitian_part(rho);
}

Vector random_ket(RandomStream& rng, Index d)
{
    Vector v = random_matrix(rng, d, 1).col(0);
    return v / v.norm();
}

GeneratorBundle random_bundle(RandomStream& rng, Index d, std::size_t n_channels, Mode mode)
{
    GeneratorBundle b;
    b.mode = mode;
    b.h = random_hermitian(rng, d);
    for (std::size_t c = 0; c < n_channels; ++c) {
        b.channels.push_back(Channel{rng.uniform(), 0.5 * random_matrix(rng, d, d), static_cast<Index>(c), 0});
    }
    b.loss = 0.5 * channel_loss(b.channels, d);
    if (mode == Mode::raw) {
        const Matrix a = 0.3 * random_matrix(rng, d, d);
        b.loss += a * a.adjoint();
    }
    b.loss = hermitian_part(b.loss);
    return b;
}

SystemModel random_model(RandomStream& rng, Index d_s, Index d_b, double g)
{
    std::vector<double> energies;
    for (Index f = 0; f < d_s; ++f) energies.push_back(2.0 * rng.uniform() - 1.0);
    const Matrix h_m = random_hermitian(rng, d_b);
    std::vector<CouplingTerm> terms;
    for (Index f = 0; f < d_s; ++f) {
        for (Index h = f; h < d_s; ++h) {
            Matrix b = f == h ? random_hermitian(rng, d_b) : random_matrix(rng, d_b, d_b);
            b *= g / spectral_norm(b);
            terms.push_back({f, h, b});
            if (f != h) terms.push_back({h, f, Matrix(b.adjoint())});
        }
    }
    return SystemModel(std::move(energies), h_m, std::move(terms));
}

} // namespace semigroup
