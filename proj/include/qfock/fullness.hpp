#pragma once

// The quantitative fullness machinery: shift embeddings Phi/Psi with their
// constants, the maps m_l, m_r, their daggers, f, S and the operator
// M(xi) = sum_i e_i (x) (W(e_i) - W^r(e_i))(xi), the norm lemmas, and the
// criterion d^2 > 2 (C1 C2)^2 (8 C^2 d + 1) together with a direct
// spectral-gap computation for M*M restricted to the vacuum complement.
//
// H (x) F_q coordinates are indexed (i, g) -> i * total_dim + g, so the
// prepend embedding Phi is the identity reindexing and the domain Gram is
// I_H (x) G blockwise.

#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qfock/fock_space.hpp"
#include "qfock/operators.hpp"
#include "qfock/representation.hpp"

namespace qfock {

inline constexpr std::int64_t kDenseGapCap = 1500;     // dense eigensolve above this: no
inline constexpr std::int64_t kDenseLevelCap = 20000;  // per-level dense matrices

// ---------------------------------------------------------------------------
// Shift embedding constants

struct ConstantsEstimate {
    double C1 = 1.0, C2 = 1.0;
    int level_C1 = 0, level_C2 = 0;  // level n of the domain achieving the max
    bool estimated = true;           // false when user supplied
};

// Per-level singular values of Phi: H (x) H^{(x)n} -> H^{(x)(n+1)} in the
// correct geometries; the coordinate map is the identity, so the matrix is
// G_{n+1}^{1/2} (I (x) G_n^{-1/2}). C1 = max sigma, C2 = max 1/sigma_min,
// over n <= N-1. Monotone nondecreasing in N; exactly (1,1) at q = 0.
inline ConstantsEstimate estimate_constants(const TruncatedFockSpace& F) {
    if (F.N < 2) throw std::invalid_argument("estimate_constants: need N >= 2");
    ConstantsEstimate est;
    if (F.gram_is_identity) return est;
    est.C1 = 0.0;
    est.C2 = 0.0;
    for (int n = 0; n + 1 <= F.N; ++n) {
        const std::int64_t dn = F.levels[n].dim;
        const std::int64_t dn1 = F.levels[n + 1].dim;
        if (dn1 > kDenseLevelCap)
            throw std::invalid_argument("estimate_constants: level too large for dense path");
        Eigen::MatrixXd M = F.dense_gram_power(n + 1, TruncatedFockSpace::GramPower::Sqrt);
        const Eigen::MatrixXd Gn = F.dense_gram_power(n, TruncatedFockSpace::GramPower::InvSqrt);
        for (int i = 0; i < F.dim_h; ++i)
            M.middleCols(static_cast<std::int64_t>(i) * dn, dn) =
                M.middleCols(static_cast<std::int64_t>(i) * dn, dn) * Gn;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M.transpose() * M);
        const double smax = std::sqrt(es.eigenvalues().maxCoeff());
        const double smin = std::sqrt(es.eigenvalues().minCoeff());
        if (smax > est.C1) {
            est.C1 = smax;
            est.level_C1 = n;
        }
        if (1.0 / smin > est.C2) {
            est.C2 = 1.0 / smin;
            est.level_C2 = n;
        }
    }
    return est;
}

// Same for the append embedding Psi (right tensor factor); used to check
// ||Phi|| = ||Psi|| numerically.
inline ConstantsEstimate estimate_constants_psi(const TruncatedFockSpace& F) {
    if (F.N < 2) throw std::invalid_argument("estimate_constants_psi: need N >= 2");
    ConstantsEstimate est;
    if (F.gram_is_identity) return est;
    est.C1 = 0.0;
    est.C2 = 0.0;
    for (int n = 0; n + 1 <= F.N; ++n) {
        const std::int64_t dn = F.levels[n].dim;
        // append indexing (w, i) -> w * dim_h + i: domain Gram is G_n (x) I
        Eigen::MatrixXd M = F.dense_gram_power(n + 1, TruncatedFockSpace::GramPower::Sqrt);
        const Eigen::MatrixXd Gn = F.dense_gram_power(n, TruncatedFockSpace::GramPower::InvSqrt);
        Eigen::MatrixXd K = Eigen::MatrixXd::Zero(dn * F.dim_h, dn * F.dim_h);
        for (std::int64_t a = 0; a < dn; ++a)
            for (std::int64_t b = 0; b < dn; ++b)
                for (int i = 0; i < F.dim_h; ++i) K(a * F.dim_h + i, b * F.dim_h + i) = Gn(a, b);
        M = M * K;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M.transpose() * M);
        const double smax = std::sqrt(es.eigenvalues().maxCoeff());
        const double smin = std::sqrt(es.eigenvalues().minCoeff());
        if (smax > est.C1) {
            est.C1 = smax;
            est.level_C1 = n;
        }
        if (1.0 / smin > est.C2) {
            est.C2 = 1.0 / smin;
            est.level_C2 = n;
        }
    }
    return est;
}

// ---------------------------------------------------------------------------
// Geometry helpers for maps between F_q and H (x) F_q

// (I (x) G^p) X : apply the level Gram power to each letter block of rows.
inline Matrix apply_hf_left(const TruncatedFockSpace& F, TruncatedFockSpace::GramPower p,
                            const Matrix& X) {
    if (F.gram_is_identity) return X;
    Matrix out = X;
    for (int i = 0; i < F.dim_h; ++i) {
        Matrix block = out.middleRows(static_cast<std::int64_t>(i) * F.total_dim, F.total_dim);
        out.middleRows(static_cast<std::int64_t>(i) * F.total_dim, F.total_dim) =
            apply_gram_left(F, p, block);
    }
    return out;
}

// X (I (x) G^p) : same on letter blocks of columns.
inline Matrix apply_hf_right(const TruncatedFockSpace& F, const Matrix& X,
                             TruncatedFockSpace::GramPower p) {
    if (F.gram_is_identity) return X;
    Matrix out = X;
    for (int i = 0; i < F.dim_h; ++i) {
        Matrix block = out.middleCols(static_cast<std::int64_t>(i) * F.total_dim, F.total_dim);
        out.middleCols(static_cast<std::int64_t>(i) * F.total_dim, F.total_dim) =
            apply_gram_right(F, block, p);
    }
    return out;
}

inline double spectral_norm(const Matrix& Y) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(Y.adjoint() * Y);
    const double top = es.eigenvalues().maxCoeff();
    return top > 0.0 ? std::sqrt(top) : 0.0;
}

inline double smallest_singular_value(const Matrix& Y) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(Y.adjoint() * Y);
    const double bottom = es.eigenvalues().minCoeff();
    return bottom > 0.0 ? std::sqrt(bottom) : 0.0;
}

// ---------------------------------------------------------------------------
// The maps of the fullness argument, dense

struct MMaps {
    const TruncatedFockSpace* space = nullptr;
    const Representation* rep = nullptr;
    EigenvectorFamily family;
    int d = 0;
    Matrix m_l, m_r, m_l_dag, m_r_dag;  // F -> H (x) F
    Matrix M;                           // F -> H (x) F
    Matrix f;                           // H (x) F+ -> F  (columns at (i, Omega) are zero)
    Matrix S;                           // F+ -> F+
    Matrix P_D;                         // dim_h x dim_h projection onto span{e_i}
    std::vector<Matrix> wick_diffs;     // W(e_i) - W^r(e_i) on F
};

inline MMaps build_m_maps(const TruncatedFockSpace& F, const Representation& rep,
                          const EigenvectorFamily& fam) {
    if (F.N < 2) throw std::invalid_argument("build_m_maps: need N >= 2");
    if (rep.dim_h != F.dim_h)
        throw std::invalid_argument("build_m_maps: representation/space mismatch");
    const std::int64_t T = F.total_dim;
    const std::int64_t HT = static_cast<std::int64_t>(F.dim_h) * T;

    MMaps maps;
    maps.space = &F;
    maps.rep = &rep;
    maps.family = fam;
    maps.d = static_cast<int>(fam.vectors.size());
    maps.m_l = Matrix::Zero(HT, T);
    maps.m_r = Matrix::Zero(HT, T);
    maps.m_l_dag = Matrix::Zero(HT, T);
    maps.m_r_dag = Matrix::Zero(HT, T);
    maps.M = Matrix::Zero(HT, T);

    maps.P_D = Matrix::Zero(F.dim_h, F.dim_h);
    for (const Vector& e : fam.vectors) maps.P_D += e * e.adjoint();

    for (const Vector& e : fam.vectors) {
        const Matrix ann_l = annihilation_left(F, rep, apply_A_power(rep, 0.5, e)).mat;
        const Matrix ann_r = annihilation_right(F, rep, apply_A_power(rep, -0.5, e)).mat;
        const Matrix cre_l = creation_left(F, rep, e).mat;
        const Matrix cre_r = creation_right(F, rep, e).mat;
        Matrix diff = cre_l + ann_l - cre_r - ann_r;  // W(e) - W^r(e)
        for (int j = 0; j < F.dim_h; ++j) {
            if (e[j] == 0.0) continue;
            maps.m_l.middleRows(static_cast<std::int64_t>(j) * T, T) += e[j] * ann_l;
            maps.m_r.middleRows(static_cast<std::int64_t>(j) * T, T) += e[j] * ann_r;
            maps.m_l_dag.middleRows(static_cast<std::int64_t>(j) * T, T) += e[j] * cre_l;
            maps.m_r_dag.middleRows(static_cast<std::int64_t>(j) * T, T) += e[j] * cre_r;
            maps.M.middleRows(static_cast<std::int64_t>(j) * T, T) += e[j] * diff;
        }
        maps.wick_diffs.push_back(std::move(diff));
    }

    // f(xi (x) eta_1...eta_n) = <sum_i e_i (x) e_i, xi (x) eta_1> eta_2...eta_n
    maps.f = Matrix::Zero(T, HT);
    for (int j = 0; j < F.dim_h; ++j) {
        for (int n = 1; n <= F.N; ++n) {
            const std::int64_t step = detail::ipow(F.dim_h, n - 1);
            for (std::int64_t w = 0; w < F.levels[n].dim; ++w) {
                const int first = static_cast<int>(w / step);
                Complex c = 0.0;
                for (const Vector& e : fam.vectors) c += std::conj(e[j]) * std::conj(e[first]);
                if (c == 0.0) continue;
                maps.f(F.index(n - 1, w % step),
                       static_cast<std::int64_t>(j) * T + F.index(n, w)) = c;
            }
        }
    }

    // S(xi_1...xi_n) = xi_2...xi_n (x) P_D xi_1
    maps.S = Matrix::Zero(T, T);
    for (int n = 1; n <= F.N; ++n) {
        const std::int64_t step = detail::ipow(F.dim_h, n - 1);
        for (std::int64_t w = 0; w < F.levels[n].dim; ++w) {
            const int first = static_cast<int>(w / step);
            const std::int64_t rest = w % step;
            for (int j = 0; j < F.dim_h; ++j) {
                const Complex c = maps.P_D(j, first);
                if (c == 0.0) continue;
                maps.S(F.index(n, rest * F.dim_h + j), F.index(n, w)) += c;
            }
        }
    }
    return maps;
}

// Adjoint of a map F -> H (x) F with respect to (G, I (x) G).
inline Matrix fh_adjoint(const TruncatedFockSpace& F, const Matrix& X) {
    Matrix a = X.adjoint();
    a = apply_hf_right(F, a, TruncatedFockSpace::GramPower::Plain);
    a = apply_gram_left(F, TruncatedFockSpace::GramPower::Inv, a);
    return a;
}

// Operator norm of a map F -> H (x) F in the q geometries.
inline double norm_f_to_hf(const TruncatedFockSpace& F, const Matrix& X) {
    Matrix Y = apply_gram_right(F, X, TruncatedFockSpace::GramPower::InvSqrt);
    Y = apply_hf_left(F, TruncatedFockSpace::GramPower::Sqrt, Y);
    return spectral_norm(Y);
}

// Norm of a map H (x) F -> F.
inline double norm_hf_to_f(const TruncatedFockSpace& F, const Matrix& X) {
    Matrix Y = apply_hf_right(F, X, TruncatedFockSpace::GramPower::InvSqrt);
    Y = apply_gram_left(F, TruncatedFockSpace::GramPower::Sqrt, Y);
    return spectral_norm(Y);
}

inline double norm_f_to_f(const TruncatedFockSpace& F, const Matrix& X) {
    Matrix Y = apply_gram_right(F, X, TruncatedFockSpace::GramPower::InvSqrt);
    Y = apply_gram_left(F, TruncatedFockSpace::GramPower::Sqrt, Y);
    return spectral_norm(Y);
}

// Phi o (A^{1/2} P_D (x) id): the Lemma 1 factorization target for m_l*.
// Columns with Fock level N are zero (outside the embedding's domain).
inline Matrix phi_a_half_pd(const TruncatedFockSpace& F, const Representation& rep,
                            const MMaps& maps) {
    const std::int64_t T = F.total_dim;
    Matrix out = Matrix::Zero(T, static_cast<std::int64_t>(F.dim_h) * T);
    Matrix AP = Matrix::Zero(F.dim_h, F.dim_h);
    for (int j = 0; j < F.dim_h; ++j)
        for (int i = 0; i < F.dim_h; ++i)
            AP(j, i) = std::sqrt(rep.a_eigenvalues[j]) * maps.P_D(j, i);
    for (int i = 0; i < F.dim_h; ++i) {
        for (int n = 0; n + 1 <= F.N; ++n) {
            const std::int64_t step = detail::ipow(F.dim_h, n);
            for (std::int64_t w = 0; w < F.levels[n].dim; ++w) {
                for (int j = 0; j < F.dim_h; ++j) {
                    if (AP(j, i) == 0.0) continue;
                    out(F.index(n + 1, static_cast<std::int64_t>(j) * step + w),
                        static_cast<std::int64_t>(i) * T + F.index(n, w)) = AP(j, i);
                }
            }
        }
    }
    return out;
}

struct NormLemmaReport {
    double norm_m_l = 0.0, norm_m_r = 0.0, bound_m_lr = 0.0;  // bound = C * C1
    double factorization_residual = 0.0;                      // m_l* vs Phi(A^{1/2}P_D (x) id)
    double norm_f = 0.0, bound_f = 0.0;                       // C2 sqrt(d)
    double norm_S = 0.0, bound_S = 0.0;                       // C1 C2
    double sigma_min_m_dag = 0.0;
    double lower_bound_m_dag = 0.0;  // sqrt(d^2/2 - (C1 C2)^2) / (C2 sqrt(d))
    bool lower_bound_applicable = false;
    bool all_bounds_hold = false;
};

inline NormLemmaReport check_norm_lemmas(const MMaps& maps, double C, double C1, double C2,
                                         int d, double tol = 1e-8) {
    const TruncatedFockSpace& F = *maps.space;
    const Representation& rep = *maps.rep;
    NormLemmaReport r;
    r.norm_m_l = norm_f_to_hf(F, maps.m_l);
    r.norm_m_r = norm_f_to_hf(F, maps.m_r);
    r.bound_m_lr = C * C1;

    // m_l* = Phi o (A^{1/2} P_D (x) id), on columns inside the embedding's domain
    Matrix m_l_star = fh_adjoint(F, maps.m_l);
    Matrix target = phi_a_half_pd(F, rep, maps);
    Matrix diff = m_l_star - target;
    for (int i = 0; i < F.dim_h; ++i)  // exclude the compressed top level
        diff.middleCols(static_cast<std::int64_t>(i) * F.total_dim + F.level_offset[F.N],
                        F.levels[F.N].dim)
            .setZero();
    r.factorization_residual = norm_hf_to_f(F, diff);

    Matrix f_restricted = maps.f;  // already zero on (i, Omega) columns
    r.norm_f = norm_hf_to_f(F, f_restricted);
    r.bound_f = C2 * std::sqrt(static_cast<double>(d));
    r.norm_S = norm_f_to_f(F, maps.S);
    r.bound_S = C1 * C2;

    // sigma_min of m_dag = (m_l_dag - m_r_dag) restricted to interior levels 1..N-1
    Matrix m_dag = maps.m_l_dag - maps.m_r_dag;
    Matrix Y = apply_gram_right(F, m_dag, TruncatedFockSpace::GramPower::InvSqrt);
    Y = apply_hf_left(F, TruncatedFockSpace::GramPower::Sqrt, Y);
    const std::int64_t lo = F.level_offset[1];
    const std::int64_t len = F.level_offset[F.N] - lo;
    r.sigma_min_m_dag = smallest_singular_value(Matrix(Y.middleCols(lo, len)));
    const double disc = 0.5 * d * d - (C1 * C2) * (C1 * C2);
    if (disc > 0.0) {
        r.lower_bound_applicable = true;
        r.lower_bound_m_dag = std::sqrt(disc) / (C2 * std::sqrt(static_cast<double>(d)));
    }

    r.all_bounds_hold = r.norm_m_l <= r.bound_m_lr + tol && r.norm_m_r <= r.bound_m_lr + tol &&
                        r.factorization_residual < 1e-10 && r.norm_f <= r.bound_f + tol &&
                        r.norm_S <= r.bound_S + tol &&
                        (!r.lower_bound_applicable ||
                         r.lower_bound_m_dag <= r.sigma_min_m_dag + tol);
    return r;
}

// ---------------------------------------------------------------------------
// Spectral gap of M*M on the vacuum complement

namespace detail {

// Matrix-free actions of creation/annihilation and their standard transposes,
// for the large-space Lanczos path.
struct WickDiffAction {
    const TruncatedFockSpace* F;
    Vector cre_l, ann_l, cre_r, ann_r;  // one-particle vectors of the four parts

    // y += (l(cre_l) + l(ann_l)* - r(cre_r) - r(ann_r)*) x
    void apply(const FockVector& x, FockVector& y) const {
        const auto& sp = *F;
        for (int n = 0; n < sp.N; ++n) {
            const std::int64_t step = ipow(sp.dim_h, n);
            for (std::int64_t w = 0; w < sp.levels[n].dim; ++w) {
                const Complex xv = x[sp.index(n, w)];
                if (xv == 0.0) continue;
                for (int a = 0; a < sp.dim_h; ++a) {
                    if (cre_l[a] != 0.0)
                        y[sp.index(n + 1, a * step + w)] += cre_l[a] * xv;
                    if (cre_r[a] != 0.0)
                        y[sp.index(n + 1, w * sp.dim_h + a)] -= cre_r[a] * xv;
                }
            }
        }
        std::vector<int> rest;
        for (int n = 1; n <= sp.N; ++n) {
            for (std::int64_t w = 0; w < sp.levels[n].dim; ++w) {
                const Complex xv = x[sp.index(n, w)];
                if (xv == 0.0) continue;
                auto ls = sp.letters(n, w);
                for (int k = 0; k < n; ++k) {
                    const Complex al = std::pow(sp.q, k) * std::conj(ann_l[ls[k]]);
                    const Complex ar = std::pow(sp.q, n - 1 - k) * std::conj(ann_r[ls[k]]);
                    if (al == 0.0 && ar == 0.0) continue;
                    rest.clear();
                    for (int t = 0; t < n; ++t)
                        if (t != k) rest.push_back(ls[t]);
                    const std::int64_t g = sp.index(n - 1, word_from_letters(rest, sp.dim_h));
                    y[g] += (al - ar) * xv;
                }
            }
        }
    }

    // y += (the standard conjugate transpose of the above) x
    void apply_adjoint(const FockVector& x, FockVector& y) const {
        const auto& sp = *F;
        for (int n = 0; n < sp.N; ++n) {
            const std::int64_t step = ipow(sp.dim_h, n);
            for (std::int64_t w = 0; w < sp.levels[n].dim; ++w) {
                Complex acc = 0.0;
                for (int a = 0; a < sp.dim_h; ++a) {
                    if (cre_l[a] != 0.0)
                        acc += std::conj(cre_l[a]) * x[sp.index(n + 1, a * step + w)];
                    if (cre_r[a] != 0.0)
                        acc -= std::conj(cre_r[a]) * x[sp.index(n + 1, w * sp.dim_h + a)];
                }
                y[sp.index(n, w)] += acc;
            }
        }
        std::vector<int> rest;
        for (int n = 1; n <= sp.N; ++n) {
            for (std::int64_t w = 0; w < sp.levels[n].dim; ++w) {
                auto ls = sp.letters(n, w);
                Complex acc = 0.0;
                for (int k = 0; k < n; ++k) {
                    const Complex al = std::pow(sp.q, k) * ann_l[ls[k]];
                    const Complex ar = std::pow(sp.q, n - 1 - k) * ann_r[ls[k]];
                    if (al == 0.0 && ar == 0.0) continue;
                    rest.clear();
                    for (int t = 0; t < n; ++t)
                        if (t != k) rest.push_back(ls[t]);
                    acc += (al - ar) * x[sp.index(n - 1, word_from_letters(rest, sp.dim_h))];
                }
                y[sp.index(n, w)] += acc;
            }
        }
    }
};

inline void apply_gram_power_vec(const TruncatedFockSpace& F,
                                 TruncatedFockSpace::GramPower p, FockVector& v) {
    F.apply_gram_power(p, v);
}

// Smallest and largest eigenvalues of a Hermitian PSD operator given by a
// matvec, via Lanczos with full reorthogonalization.
inline std::pair<double, double> lanczos_extremes(
    std::int64_t dim, const std::function<void(const Vector&, Vector&)>& matvec,
    int max_steps = 400, double tol = 1e-9, unsigned seed = 20240917u) {
    max_steps = static_cast<int>(std::min<std::int64_t>(max_steps, dim));
    std::vector<Vector> basis;
    std::vector<double> alpha, beta;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vector v(dim);
    for (std::int64_t i = 0; i < dim; ++i) v[i] = Complex(gauss(rng), gauss(rng));
    v.normalize();
    basis.push_back(v);
    double prev_min = 0.0, prev_max = 0.0;
    for (int k = 0; k < max_steps; ++k) {
        Vector w = Vector::Zero(dim);
        matvec(basis[k], w);
        const double a = std::real(basis[k].dot(w));
        alpha.push_back(a);
        w -= a * basis[k];
        if (k > 0) w -= beta[k - 1] * basis[k - 1];
        for (const auto& b : basis) w -= b.dot(w) * b;  // full reorthogonalization
        const double bnorm = w.norm();
        // Ritz values so far
        Eigen::MatrixXd Tk = Eigen::MatrixXd::Zero(k + 1, k + 1);
        for (int i = 0; i <= k; ++i) Tk(i, i) = alpha[i];
        for (int i = 0; i < k; ++i) Tk(i, i + 1) = Tk(i + 1, i) = beta[i];
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Tk);
        const double cur_min = es.eigenvalues().minCoeff();
        const double cur_max = es.eigenvalues().maxCoeff();
        if (bnorm < 1e-12) return {cur_min, cur_max};
        if (k > 10 && std::abs(cur_min - prev_min) < tol * std::max(1.0, std::abs(cur_min)) &&
            std::abs(cur_max - prev_max) < tol * std::max(1.0, cur_max))
            return {cur_min, cur_max};
        prev_min = cur_min;
        prev_max = cur_max;
        beta.push_back(bnorm);
        basis.push_back(w / bnorm);
    }
    return {prev_min, prev_max};
}

}  // namespace detail

// Smallest eigenvalue of G^{1/2} M*M G^{-1/2} compressed to levels 1..N-1
// (the truncation interior of F_q+). Dense eigensolve for small spaces,
// matrix-free Lanczos otherwise.
inline double spectral_gap(const TruncatedFockSpace& F, const Representation& rep,
                           const EigenvectorFamily& fam, std::string* method_out = nullptr) {
    if (F.N < 2) throw std::invalid_argument("spectral_gap: need N >= 2");
    const std::int64_t lo = F.level_offset[1];
    const std::int64_t len = F.level_offset[F.N] - lo;

    if (F.total_dim <= kDenseGapCap) {
        if (method_out) *method_out = "dense";
        Matrix acc = Matrix::Zero(F.total_dim, F.total_dim);
        for (const Vector& e : fam.vectors) {
            FockOperator diff{&F, wick(F, rep, e).mat - wick_right(F, rep, e).mat, "W - W^r"};
            acc += adjoint_q(F, diff).mat * diff.mat;
        }
        Matrix Q = apply_gram_left(F, TruncatedFockSpace::GramPower::Sqrt,
                                   apply_gram_right(F, acc, TruncatedFockSpace::GramPower::InvSqrt));
        Matrix Qint = 0.5 * (Q.block(lo, lo, len, len) +
                             Q.block(lo, lo, len, len).adjoint().eval());
        Eigen::SelfAdjointEigenSolver<Matrix> es(Qint);
        return es.eigenvalues().minCoeff();
    }

    if (method_out) *method_out = "lanczos";
    std::vector<detail::WickDiffAction> actions;
    for (const Vector& e : fam.vectors) {
        detail::WickDiffAction act;
        act.F = &F;
        act.cre_l = e;
        act.ann_l = apply_A_power(rep, 0.5, e);
        act.cre_r = e;
        act.ann_r = apply_A_power(rep, -0.5, e);
        actions.push_back(std::move(act));
    }
    // Q_int x = P_int sum_i C_i^H C_i (P_int x), C_i = G^{1/2} B_i G^{-1/2}
    auto matvec = [&](const Vector& x, Vector& y) {
        FockVector xf = FockVector::Zero(F.total_dim);
        xf.segment(lo, len) = x;
        detail::apply_gram_power_vec(F, TruncatedFockSpace::GramPower::InvSqrt, xf);
        FockVector acc = FockVector::Zero(F.total_dim);
        for (const auto& act : actions) {
            FockVector t = FockVector::Zero(F.total_dim);
            act.apply(xf, t);
            detail::apply_gram_power_vec(F, TruncatedFockSpace::GramPower::Plain, t);
            act.apply_adjoint(t, acc);
        }
        detail::apply_gram_power_vec(F, TruncatedFockSpace::GramPower::InvSqrt, acc);
        y = acc.segment(lo, len);
    };
    return detail::lanczos_extremes(len, matvec).first;
}

// ---------------------------------------------------------------------------
// The fullness certificate

struct FullnessConfig {
    RepresentationSpec rep;
    double C = 1.0;
    int d = 1;
    int N = 4;
    bool user_constants = false;
    double user_C1 = 1.0, user_C2 = 1.0;
    bool compute_gap = true;
};

struct FullnessCertificate {
    FullnessConfig config;
    double C1_used = 0.0, C2_used = 0.0;
    std::string constants_provenance;  // "user" or "estimated at level N"
    double lhs = 0.0;                  // d^2
    double rhs = 0.0;                  // 2 (C1 C2)^2 (8 C^2 d + 1)
    bool inequality_holds = false;
    double margin = 0.0;               // lhs - rhs
    double proof_bound = 0.0;          // (d^2/2 - (C1C2)^2)/(2 C2^2 d) - (2 C C1)^2
    double spectral_gap = 0.0;
    bool spectral_gap_computed = false;
    std::string gap_method;
};

inline FullnessCertificate certify_fullness(const FullnessConfig& cfg) {
    if (cfg.C < 1.0) throw std::invalid_argument("certify_fullness: C must be >= 1");
    if (cfg.d < 1) throw std::invalid_argument("certify_fullness: d must be >= 1");
    const Representation rep = build_representation(cfg.rep);
    const EigenvectorFamily fam = build_eigenvector_family(rep, cfg.C, cfg.d);

    FullnessCertificate cert;
    cert.config = cfg;
    if (cfg.user_constants) {
        cert.C1_used = cfg.user_C1;
        cert.C2_used = cfg.user_C2;
        cert.constants_provenance = "user";
    }

    TruncatedFockSpace F = build_fock(rep.dim_h, cfg.rep.q, cfg.N);
    if (!cfg.user_constants) {
        ConstantsEstimate est = estimate_constants(F);
        cert.C1_used = est.C1;
        cert.C2_used = est.C2;
        cert.constants_provenance = "estimated at level N=" + std::to_string(cfg.N);
    }

    const double c12 = cert.C1_used * cert.C2_used;
    cert.lhs = static_cast<double>(cfg.d) * cfg.d;
    cert.rhs = 2.0 * c12 * c12 * (8.0 * cfg.C * cfg.C * cfg.d + 1.0);
    cert.margin = cert.lhs - cert.rhs;
    cert.inequality_holds = cert.margin > 0.0;
    cert.proof_bound = (0.5 * cert.lhs - c12 * c12) / (2.0 * cert.C2_used * cert.C2_used * cfg.d) -
                       4.0 * cfg.C * cfg.C * cert.C1_used * cert.C1_used;

    if (cfg.compute_gap) {
        cert.spectral_gap = spectral_gap(F, rep, fam, &cert.gap_method);
        cert.spectral_gap_computed = true;
    }
    return cert;
}

}  // namespace qfock
