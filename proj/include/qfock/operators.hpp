#pragma once

// Creation/annihilation operators, Wick operators and words, the vacuum
// state, q-adjoints and truncated operator norms, as dense matrices in the
// word basis. Creation compresses at the top level; operator identities are
// therefore asserted on the truncation interior only.

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qfock/fock_space.hpp"
#include "qfock/representation.hpp"

namespace qfock {

struct FockOperator {
    const TruncatedFockSpace* space = nullptr;
    Matrix mat;
    std::string desc;
};

namespace detail {

inline void check_op_space(const TruncatedFockSpace& F, const FockOperator& x) {
    if (x.space != &F || x.mat.rows() != F.total_dim || x.mat.cols() != F.total_dim)
        throw std::invalid_argument("operator does not live on this Fock space");
}

inline void check_one_particle(const Representation& rep, const TruncatedFockSpace& F,
                               const Vector& xi) {
    if (rep.dim_h != F.dim_h)
        throw std::invalid_argument("representation/Fock space dimension mismatch");
    rep.check_dim(xi);
}

}  // namespace detail

// G^p X, applied per level block.
inline Matrix apply_gram_left(const TruncatedFockSpace& F, TruncatedFockSpace::GramPower p,
                              const Matrix& X) {
    if (F.gram_is_identity) return X;
    Matrix out = X;
    for (int n = 0; n <= F.N; ++n) {
        Matrix block = out.middleRows(F.level_offset[n], F.levels[n].dim);
        out.middleRows(F.level_offset[n], F.levels[n].dim) =
            F.dense_gram_power(n, p).cast<Complex>() * block;
    }
    return out;
}

// X G^p, applied per level block.
inline Matrix apply_gram_right(const TruncatedFockSpace& F, const Matrix& X,
                               TruncatedFockSpace::GramPower p) {
    if (F.gram_is_identity) return X;
    Matrix out = X;
    for (int n = 0; n <= F.N; ++n) {
        Matrix block = out.middleCols(F.level_offset[n], F.levels[n].dim);
        out.middleCols(F.level_offset[n], F.levels[n].dim) =
            block * F.dense_gram_power(n, p).cast<Complex>();
    }
    return out;
}

// Adjoint with respect to the q-inner product: G^{-1} X^dagger G.
inline FockOperator adjoint_q(const TruncatedFockSpace& F, const FockOperator& x) {
    detail::check_op_space(F, x);
    Matrix a = x.mat.adjoint();
    a = apply_gram_right(F, a, TruncatedFockSpace::GramPower::Plain);
    a = apply_gram_left(F, TruncatedFockSpace::GramPower::Inv, a);
    return {&F, std::move(a), "(" + x.desc + ")*"};
}

inline FockOperator creation_left(const TruncatedFockSpace& F, const Representation& rep,
                                  const Vector& xi) {
    detail::check_one_particle(rep, F, xi);
    Matrix m = Matrix::Zero(F.total_dim, F.total_dim);
    for (int n = 0; n < F.N; ++n) {
        const std::int64_t step = detail::ipow(F.dim_h, n);
        for (std::int64_t w = 0; w < F.levels[n].dim; ++w)
            for (int a = 0; a < F.dim_h; ++a)
                if (xi[a] != 0.0) m(F.index(n + 1, a * step + w), F.index(n, w)) = xi[a];
    }
    return {&F, std::move(m), "l_q(xi)"};
}

// Action on eta_1 x ... x eta_n: sum_k q^{k-1} <xi, eta_k> (slot k removed).
inline FockOperator annihilation_left(const TruncatedFockSpace& F, const Representation& rep,
                                      const Vector& xi) {
    detail::check_one_particle(rep, F, xi);
    Matrix m = Matrix::Zero(F.total_dim, F.total_dim);
    for (int n = 1; n <= F.N; ++n) {
        for (std::int64_t w = 0; w < F.levels[n].dim; ++w) {
            auto ls = F.letters(n, w);
            double coeff = 1.0;
            for (int k = 0; k < n; ++k, coeff *= F.q) {
                const Complex c = coeff * std::conj(xi[ls[k]]);
                if (c == 0.0) continue;
                std::vector<int> rest;
                rest.reserve(n - 1);
                for (int t = 0; t < n; ++t)
                    if (t != k) rest.push_back(ls[t]);
                m(F.index(n - 1, detail::word_from_letters(rest, F.dim_h)), F.index(n, w)) += c;
            }
        }
    }
    return {&F, std::move(m), "l_q(xi)*"};
}

inline FockOperator creation_right(const TruncatedFockSpace& F, const Representation& rep,
                                   const Vector& xi) {
    detail::check_one_particle(rep, F, xi);
    Matrix m = Matrix::Zero(F.total_dim, F.total_dim);
    for (int n = 0; n < F.N; ++n) {
        for (std::int64_t w = 0; w < F.levels[n].dim; ++w)
            for (int a = 0; a < F.dim_h; ++a)
                if (xi[a] != 0.0) m(F.index(n + 1, w * F.dim_h + a), F.index(n, w)) = xi[a];
    }
    return {&F, std::move(m), "r_q(xi)"};
}

// Right-handed mirror: factors q^{n-k}.
inline FockOperator annihilation_right(const TruncatedFockSpace& F, const Representation& rep,
                                       const Vector& xi) {
    detail::check_one_particle(rep, F, xi);
    Matrix m = Matrix::Zero(F.total_dim, F.total_dim);
    for (int n = 1; n <= F.N; ++n) {
        for (std::int64_t w = 0; w < F.levels[n].dim; ++w) {
            auto ls = F.letters(n, w);
            double coeff = 1.0;
            for (int k = n - 1; k >= 0; --k, coeff *= F.q) {
                const Complex c = coeff * std::conj(xi[ls[k]]);
                if (c == 0.0) continue;
                std::vector<int> rest;
                rest.reserve(n - 1);
                for (int t = 0; t < n; ++t)
                    if (t != k) rest.push_back(ls[t]);
                m(F.index(n - 1, detail::word_from_letters(rest, F.dim_h)), F.index(n, w)) += c;
            }
        }
    }
    return {&F, std::move(m), "r_q(xi)*"};
}

// W_q(xi) = l_q(xi) + l_q(T xi)*.
inline FockOperator wick(const TruncatedFockSpace& F, const Representation& rep,
                         const Vector& xi) {
    Matrix m = creation_left(F, rep, xi).mat + annihilation_left(F, rep, apply_T(rep, xi)).mat;
    return {&F, std::move(m), "W_q(xi)"};
}

// W_q^r(zeta) = r_q(zeta) + r_q(ITI zeta)*; the input is the already
// conjugated vector, so W_q^r(I xi) is wick_right applied to I xi.
inline FockOperator wick_right(const TruncatedFockSpace& F, const Representation& rep,
                               const Vector& zeta) {
    Vector iti = rep.apply_I(apply_T(rep, rep.apply_I(zeta)));
    Matrix m = creation_right(F, rep, zeta).mat + annihilation_right(F, rep, iti).mat;
    return {&F, std::move(m), "W_q^r(zeta)"};
}

// Coordinates of the elementary tensor xi_1 x ... x xi_n at its level.
inline FockVector tensor_word(const TruncatedFockSpace& F, const std::vector<Vector>& xis) {
    const int n = static_cast<int>(xis.size());
    if (n > F.N) throw std::invalid_argument("tensor_word: word longer than truncation");
    FockVector v = FockVector::Zero(F.total_dim);
    for (std::int64_t w = 0; w < F.levels[n].dim; ++w) {
        auto ls = F.letters(n, w);
        Complex c = 1.0;
        for (int k = 0; k < n; ++k) c *= xis[k][ls[k]];
        v[F.index(n, w)] = c;
    }
    return v;
}

namespace detail {

inline Matrix wick_word_rec(const TruncatedFockSpace& F, const Representation& rep,
                            const std::vector<Vector>& xis) {
    if (xis.empty()) return Matrix::Identity(F.total_dim, F.total_dim);
    if (xis.size() == 1) return wick(F, rep, xis[0]).mat;
    const Vector head = xis[0];
    const std::vector<Vector> tail(xis.begin() + 1, xis.end());
    const Vector t_head = apply_T(rep, head);
    Matrix m = wick(F, rep, head).mat * wick_word_rec(F, rep, tail);
    double coeff = 1.0;
    for (std::size_t k = 0; k < tail.size(); ++k, coeff *= F.q) {
        const Complex cov = t_head.dot(tail[k]);
        if (cov == 0.0) continue;
        std::vector<Vector> rest;
        rest.reserve(tail.size() - 1);
        for (std::size_t t = 0; t < tail.size(); ++t)
            if (t != k) rest.push_back(tail[t]);
        m -= coeff * cov * wick_word_rec(F, rep, rest);
    }
    return m;
}

}  // namespace detail

// The algebra element whose vacuum image is xi_1 x ... x xi_n, built by the
// recursion W(xi x u) = W(xi) W(u) - sum_k q^{k-1} <T xi, u_k> W(u minus slot k).
// The vacuum contract is asserted at construction.
inline FockOperator wick_word(const TruncatedFockSpace& F, const Representation& rep,
                              const std::vector<Vector>& xis) {
    if (static_cast<int>(xis.size()) > F.N)
        throw std::invalid_argument("wick_word: word longer than truncation level");
    for (const auto& xi : xis) detail::check_one_particle(rep, F, xi);
    Matrix m = detail::wick_word_rec(F, rep, xis);
    FockOperator op{&F, std::move(m), "W_q word, length " + std::to_string(xis.size())};
    FockVector image = op.mat.col(0);
    const double residual = q_norm(F, FockVector(image - tensor_word(F, xis)));
    if (residual >= 1e-10)
        throw std::runtime_error("wick_word contract violation (residual " +
                                 std::to_string(residual) +
                                 "): truncation too small for this word");
    return op;
}

inline Complex vacuum_state(const TruncatedFockSpace& F, const FockOperator& x) {
    detail::check_op_space(F, x);
    return x.mat(0, 0);  // G_0 = [1], so <Omega, x Omega>_q is the (0,0) entry
}

// Largest singular value in the q-geometry: conjugate by per-level G^{1/2},
// then the standard spectral norm.
inline double operator_norm_q(const TruncatedFockSpace& F, const FockOperator& x) {
    detail::check_op_space(F, x);
    Matrix y = apply_gram_left(F, TruncatedFockSpace::GramPower::Sqrt,
                               apply_gram_right(F, x.mat, TruncatedFockSpace::GramPower::InvSqrt));
    Eigen::SelfAdjointEigenSolver<Matrix> es(y.adjoint() * y);
    const double top = es.eigenvalues().maxCoeff();
    return top > 0.0 ? std::sqrt(top) : 0.0;
}

inline FockOperator level_projection(const TruncatedFockSpace& F, int n0, bool cumulative) {
    if (n0 < 0 || n0 > F.N) throw std::invalid_argument("level_projection: level out of range");
    Matrix m = Matrix::Zero(F.total_dim, F.total_dim);
    const std::int64_t lo = cumulative ? 0 : F.level_offset[n0];
    const std::int64_t hi = F.level_offset[n0 + 1];
    for (std::int64_t i = lo; i < hi; ++i) m(i, i) = 1.0;
    return {&F, std::move(m), cumulative ? "P_{<=n}" : "P_n"};
}

}  // namespace qfock
