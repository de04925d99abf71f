#include <doctest.h>

#include "oracles.hpp"
#include "semigroup/demo.hpp"
#include "semigroup/errors.hpp"
#include "semigroup/fock.hpp"

using namespace semigroup;

TEST_SUITE("fock") {

TEST_CASE("h1 matches the occupation-basis Hamiltonian")
{
    RandomStream rng(11, 0);
    for (int i = 0; i < 5; ++i) {
        const SystemModel model = random_model(rng, 3, 2, 0.3);
        const auto sec = build_sectors(model);
        const Matrix brute = oracle::occupation_h1(model);
        CHECK(max_abs(sec.h1 - brute) < 1e-14);
        CHECK((eigh(sec.h1).values - eigh(brute).values).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(sec.h0.rows() == 2);
        CHECK(sec.h1.rows() == 6);
        CHECK(max_abs(sec.h1 - sec.h1_free - sec.v1) < 1e-15);
    }
}

TEST_CASE("non-Hermitian coupling names the offending pair")
{
    Matrix b = Matrix::Zero(2, 2);
    b(0, 1) = 1.0;
    try {
        SystemModel({0.0, 1.0}, Matrix::Identity(2, 2), {{0, 1, b}});
        FAIL("expected ModelError");
    } catch (const ModelError& e) {
        CHECK(std::string(e.what()).find("(0,1)") != std::string::npos);
    }
    CHECK_THROWS_AS(SystemModel({0.0}, Matrix::Identity(2, 2), {{0, 0, b}}), ModelError);
    CHECK_THROWS_AS(SystemModel({0.0}, Matrix::Identity(2, 2), {{0, 3, b}}), ModelError);
}

TEST_CASE("embed: pure micro state and uniform bath")
{
    const SystemModel model({0.0, 0.5}, Matrix::Zero(3, 3), {});
    const BathState bath = BathState::from_density(model, Matrix::Identity(3, 3) / 3.0);
    Vector e0 = Vector::Zero(2);
    e0(0) = 1.0;
    const Matrix out = embed_product_state(MicroState::from_ket(e0), bath);
    CHECK(max_abs(out - tensor(projector(e0), Matrix::Identity(3, 3) / 3.0)) < 1e-15);
}

TEST_CASE("embed agrees with the operator-sum oracle")
{
    RandomStream rng(12, 0);
    const SystemModel model = random_model(rng, 3, 4, 0.2);
    const BathState bath = BathState::from_density(model, random_density(rng, 4));
    const Matrix rho1 = random_density(rng, 3);
    CHECK(max_abs(embed_product_state(MicroState{rho1}, bath) - oracle::operator_sum_embed(rho1, bath.rho_m())) < 1e-15);
}

TEST_CASE("reduce: maximally mixed, partial-trace agreement, trace and positivity")
{
    RandomStream rng(13, 0);
    const SystemModel model = random_model(rng, 3, 4, 0.2);
    const auto sec = build_sectors(model);
    CHECK(max_abs(reduce(Matrix::Identity(12, 12) / 12.0, sec).rho - Matrix::Identity(3, 3) / 3.0) < 1e-15);
    for (int i = 0; i < 10; ++i) {
        const Matrix full = random_density(rng, 12);
        const Matrix r = reduce(full, sec).rho;
        CHECK(max_abs(r - partial_trace_bath(full, 3, 4)) < 1e-12);
        CHECK(max_abs(r - oracle::partial_trace(full, 3, 4)) < 1e-12);
        CHECK(std::abs(r.trace() - full.trace()) < 1e-14);
        CHECK(min_eigenvalue(r) > -1e-14);
    }
}

TEST_CASE("embed after reduce loses correlations")
{
    const SystemModel model({0.0, 0.0}, Matrix::Zero(2, 2), {});
    const auto sec = build_sectors(model);
    Vector bell = Vector::Zero(4);
    bell(0) = bell(3) = 1.0 / std::sqrt(2.0);
    const Matrix full = projector(bell);
    const MicroState r = reduce(full, sec);
    const BathState bath = BathState::from_density(model, Matrix::Identity(2, 2) / 2.0);
    const Matrix back = embed_product_state(r, bath);
    CHECK(max_abs(back - full) > 0.2);
}

TEST_CASE("embed then reduce is the identity on micro states")
{
    RandomStream rng(14, 0);
    const SystemModel model = random_model(rng, 2, 3, 0.1);
    const auto sec = build_sectors(model);
    const BathState bath = BathState::gibbs(model, 0.7);
    const Matrix rho1 = random_density(rng, 2);
    CHECK(max_abs(reduce(embed_product_state(MicroState{rho1}, bath), sec).rho - rho1) < 1e-12);
}

TEST_CASE("bath and micro state validation")
{
    const SystemModel model({0.0}, Matrix::Identity(2, 2), {});
    CHECK_THROWS_AS(BathState::from_density(model, Matrix::Identity(2, 2)), ModelError);
    Matrix neg = Matrix::Zero(2, 2);
    neg(0, 0) = 1.5;
    neg(1, 1) = -0.5;
    CHECK_THROWS_AS(BathState::from_density(model, neg), ModelError);
    CHECK_THROWS_AS(MicroState::from_matrix(Matrix::Identity(2, 2)), DomainError);
    CHECK_THROWS_AS(MicroState::from_matrix(Matrix::Zero(2, 2)), DomainError);
    CHECK_NOTHROW(MicroState::from_matrix(Matrix::Identity(2, 2) * 0.3));
}

TEST_CASE("Gibbs bath is diagonal in the H_m basis with descending weights")
{
    RandomStream rng(15, 0);
    const SystemModel model = random_model(rng, 2, 4, 0.1);
    const BathState bath = BathState::gibbs(model, 1.3);
    CHECK(bath.commutator_defect() < 1e-14);
    CHECK(std::abs(bath.weights().sum() - 1.0) < 1e-14);
    for (Index i = 1; i < 4; ++i) CHECK(bath.weights()(i - 1) >= bath.weights()(i));
    CHECK(max_abs(bath.rho_m() - gibbs_state(model.h_m(), 1.3)) < 1e-14);
}

}
