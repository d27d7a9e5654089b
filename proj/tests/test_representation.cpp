#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "qfock/representation.hpp"

using namespace qfock;

namespace {

Vector random_vector(int dim, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss;
    Vector v(dim);
    for (int i = 0; i < dim; ++i) v[i] = Complex(gauss(rng), gauss(rng));
    return v;
}

}  // namespace

TEST_CASE("build_representation basis layout") {
    // trivial action
    Representation r1 = build_representation({0.5, 2, {}});
    CHECK(r1.dim_h == 2);
    CHECK(r1.a_eigenvalues == std::vector<double>{1.0, 1.0});
    CHECK(r1.conjugation_pairing == std::vector<int>{0, 1});

    // one block
    Representation r2 = build_representation({0.0, 0, {{2.0, 1}}});
    CHECK(r2.a_eigenvalues == std::vector<double>{2.0, 0.5});
    CHECK(r2.conjugation_pairing == std::vector<int>{1, 0});

    // fixed + double block: [1, 4, 1/4, 4, 1/4]
    Representation r3 = build_representation({0.0, 1, {{4.0, 2}}});
    CHECK(r3.dim_h == 5);
    CHECK(r3.a_eigenvalues == std::vector<double>{1.0, 4.0, 0.25, 4.0, 0.25});

    CHECK_THROWS_AS(build_representation({0.0, 0, {{0.5, 1}}}), std::invalid_argument);
    CHECK_THROWS_AS(build_representation({0.0, 0, {{1.0, 1}}}), std::invalid_argument);
    CHECK_THROWS_AS(build_representation({1.0, 2, {}}), std::invalid_argument);
    CHECK_THROWS_AS(build_representation({0.5, 0, {}}), std::invalid_argument);
}

TEST_CASE("I is an antilinear involution with I A I = A^{-1}") {
    Representation rep = build_representation({0.3, 1, {{2.0, 1}, {5.0, 2}}});
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 10; ++trial) {
        Vector v = random_vector(rep.dim_h, rng);
        CHECK((rep.apply_I(rep.apply_I(v)) - v).norm() < 1e-14);
        // antilinearity
        Complex alpha(1.3, -0.4);
        CHECK((rep.apply_I(alpha * v) - std::conj(alpha) * rep.apply_I(v)).norm() < 1e-13);
        // I A^s I = A^{-s}
        for (double s : {1.0, -1.0, 0.5, -0.5}) {
            Vector lhs = rep.apply_I(apply_A_power(rep, s, rep.apply_I(v)));
            Vector rhs = apply_A_power(rep, -s, v);
            CHECK((lhs - rhs).norm() < 1e-14 * (1.0 + v.norm()));
        }
    }
}

TEST_CASE("apply_U phases and group law") {
    Representation rep = build_representation({0.0, 1, {{2.0, 1}}});
    std::mt19937_64 rng(3);
    Vector v = random_vector(rep.dim_h, rng);
    CHECK((apply_U(rep, 0.0, v) - v).norm() == 0.0);

    // lambda = 2 eigenvector at t = pi/log 2 picks up the phase -1
    Vector ep = Vector::Zero(3);
    ep[1] = 1.0;
    Vector rot = apply_U(rep, M_PI / std::log(2.0), ep);
    CHECK(std::abs(rot[1] - Complex(-1.0, 0.0)) < 1e-14);

    // fixed vector unchanged
    Vector fix = Vector::Zero(3);
    fix[0] = 1.0;
    CHECK((apply_U(rep, 17.3, fix) - fix).norm() < 1e-15);

    // isometry and one-parameter group law
    for (double t : {0.2, 1.7, -3.1}) {
        CHECK(apply_U(rep, t, v).norm() == Catch::Approx(v.norm()).epsilon(1e-13));
        Vector a = apply_U(rep, t + 0.9, v);
        Vector b = apply_U(rep, t, apply_U(rep, 0.9, v));
        CHECK((a - b).norm() < 1e-12);
    }
}

TEST_CASE("apply_A_power") {
    Representation rep = build_representation({0.0, 0, {{4.0, 1}}});
    Vector v = Vector::Zero(2);
    v[0] = 2.0;
    v[1] = 3.0;
    CHECK((apply_A_power(rep, 0.0, v) - v).norm() == 0.0);
    CHECK(std::abs(apply_A_power(rep, 0.5, v)[0] - Complex(4.0, 0.0)) < 1e-14);
    Vector rt = apply_A_power(rep, 1.0, apply_A_power(rep, -1.0, v));
    CHECK((rt - v).norm() < 1e-14 * v.norm());
}

TEST_CASE("apply_T") {
    Representation rep = build_representation({0.0, 1, {{2.0, 1}}});
    // I-fixed lambda=1 vector: T e = e
    Vector e = Vector::Zero(3);
    e[0] = 1.0;
    CHECK((apply_T(rep, e) - e).norm() < 1e-15);

    // antilinear
    std::mt19937_64 rng(11);
    Vector v = random_vector(3, rng);
    Complex alpha(0.7, 2.1);
    CHECK((apply_T(rep, alpha * v) - std::conj(alpha) * apply_T(rep, v)).norm() < 1e-13);

    // lambda=2 eigenvector: support moves to the lambda^{-1} index with 2^{-1/2}
    Vector xp = Vector::Zero(3);
    xp[1] = Complex(0.6, 0.8);
    Vector t = apply_T(rep, xp);
    CHECK(std::abs(t[1]) < 1e-15);
    CHECK(std::abs(t[2] - std::conj(xp[1]) / std::sqrt(2.0)) < 1e-14);

    // family vectors: T e_i = A^{1/2} e_i
    EigenvectorFamily fam = build_eigenvector_family(rep, 2.0, 3);
    for (const auto& ei : fam.vectors)
        CHECK((apply_T(rep, ei) - apply_A_power(rep, 0.5, ei)).norm() < 1e-14);
}

TEST_CASE("j_map scalar factors") {
    Representation rep = build_representation({0.0, 1, {{2.0, 1}}});
    Vector v = Vector::Ones(3);
    Vector jv = j_map(rep, v);
    CHECK(std::abs(jv[0] - Complex(1.0, 0.0)) < 1e-15);                       // lambda = 1
    CHECK(std::abs(jv[1] - Complex(std::sqrt(4.0 / 3.0), 0.0)) < 1e-14);      // lambda = 2
    CHECK(std::abs(jv[2] - Complex(std::sqrt(2.0 / 3.0), 0.0)) < 1e-14);      // lambda = 1/2

    // ||j(v)|| <= sqrt(2) ||v||, injective on I-fixed vectors
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        Vector w = random_vector(3, rng);
        Vector fixed = 0.5 * (w + rep.apply_I(w));
        CHECK(j_map(rep, fixed).norm() <= std::sqrt(2.0) * fixed.norm() + 1e-12);
        if (fixed.norm() > 1e-8) CHECK(j_map(rep, fixed).norm() > 0.0);
    }
}

TEST_CASE("spectral_subspace") {
    Representation rep = build_representation({0.0, 2, {{4.0, 1}}});
    CHECK(spectral_subspace(rep, 1.0, 1.0) == std::vector<int>{0, 1});
    CHECK(spectral_subspace(rep, 0.25, 4.0) == std::vector<int>{0, 1, 2, 3});
    CHECK(spectral_subspace(rep, 3.0, 5.0) == std::vector<int>{2});
    CHECK(spectral_subspace(rep, 100.0, 200.0).empty());
    CHECK_THROWS_AS(spectral_subspace(rep, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("build_eigenvector_family") {
    // lambda = 1 case: the fixed basis vectors
    Representation r1 = build_representation({0.0, 3, {}});
    EigenvectorFamily f1 = build_eigenvector_family(r1, 1.0, 3);
    REQUIRE(f1.vectors.size() == 3);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(f1.vectors[i][i] - 1.0) < 1e-15);

    // block (4,1), C=2, d=2
    Representation r2 = build_representation({0.0, 0, {{4.0, 1}}});
    EigenvectorFamily f2 = build_eigenvector_family(r2, 2.0, 2);
    REQUIRE(f2.vectors.size() == 2);
    const double norm_a_half = std::sqrt((4.0 + 0.25) / 2.0);  // ~1.4577
    for (const auto& e : f2.vectors) {
        CHECK((r2.apply_I(e) - e).norm() < 1e-12);
        CHECK(apply_A_power(r2, 0.5, e).norm() == Catch::Approx(norm_a_half).epsilon(1e-12));
        CHECK(apply_A_power(r2, -0.5, e).norm() == Catch::Approx(norm_a_half).epsilon(1e-12));
        CHECK(apply_A_power(r2, 0.5, e).norm() <= f2.C + 1e-12);
    }
    // pairwise Gram = identity
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) {
            Complex g = f2.vectors[i].dot(f2.vectors[j]);
            CHECK(std::abs(g - (i == j ? 1.0 : 0.0)) < 1e-12);
        }

    // insufficient spectral mass
    Representation r3 = build_representation({0.0, 0, {{9.0, 1}}});
    try {
        build_eigenvector_family(r3, 2.0, 1);
        FAIL("expected insufficient spectral mass");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("insufficient spectral mass") != std::string::npos);
    }

    // mixed representation, larger family: orthonormal and I-fixed throughout
    Representation r4 = build_representation({0.0, 1, {{2.0, 1}, {3.0, 1}, {9.0, 1}}});
    EigenvectorFamily f4 = build_eigenvector_family(r4, 2.0, 5);  // 9 > C^2 excluded
    REQUIRE(f4.vectors.size() == 5);
    for (std::size_t i = 0; i < f4.vectors.size(); ++i) {
        CHECK((r4.apply_I(f4.vectors[i]) - f4.vectors[i]).norm() < 1e-12);
        CHECK(std::max(apply_A_power(r4, 0.5, f4.vectors[i]).norm(),
                       apply_A_power(r4, -0.5, f4.vectors[i]).norm()) <= f4.C + 1e-12);
        for (std::size_t j = 0; j < f4.vectors.size(); ++j)
            CHECK(std::abs(f4.vectors[i].dot(f4.vectors[j]) - (i == j ? 1.0 : 0.0)) < 1e-12);
    }
    CHECK_THROWS_AS(build_eigenvector_family(r4, 2.0, 8), std::invalid_argument);
}
