#pragma once

// Truncated q-deformed Fock space: word basis up to level N, per-level q-Gram
// matrices (symmetrizers) with square roots and inverses, level projections.
//
// The permutation sum defining the q-inner product preserves the multiset of
// letters, so each level Gram is block diagonal over "content classes"; only
// the class blocks are ever materialized.

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qfock/representation.hpp"

namespace qfock {

using FockVector = Vector;  // coefficients in the word basis, graded by level

inline constexpr int kGramNaiveCap = 8;
inline constexpr std::int64_t kWordBudget = 200000;  // max dim_H^N basis words per level
inline constexpr double kGramSingularTol = 1e-12;

namespace detail {

// Words of length n over dim letters are identified with integers in
// [0, dim^n): lexicographic order = numeric order, first letter = most
// significant digit.
inline std::int64_t ipow(std::int64_t base, int e) {
    std::int64_t r = 1;
    while (e-- > 0) r *= base;
    return r;
}

inline std::vector<int> word_letters(std::int64_t w, int dim, int n) {
    std::vector<int> ls(n);
    for (int k = n - 1; k >= 0; --k) {
        ls[k] = static_cast<int>(w % dim);
        w /= dim;
    }
    return ls;
}

inline std::int64_t word_from_letters(const std::vector<int>& ls, int dim) {
    std::int64_t w = 0;
    for (int l : ls) w = w * dim + l;
    return w;
}

}  // namespace detail

// Literal Bozejko-Speicher symmetrizer: entry (u,w) = sum over permutations pi
// of q^{inv(pi)} [u_k == w_{pi(k)} for all k]. Retained as the oracle for the
// production recursion.
inline Eigen::MatrixXd gram_naive(int dim_h, int n, double q) {
    if (n > kGramNaiveCap)
        throw std::invalid_argument("gram_naive: level " + std::to_string(n) +
                                    " exceeds factorial cap " + std::to_string(kGramNaiveCap));
    const std::int64_t dn = detail::ipow(dim_h, n);
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(dn, dn);
    if (n == 0) {
        G(0, 0) = 1.0;
        return G;
    }
    std::vector<int> perm(n);
    for (int k = 0; k < n; ++k) perm[k] = k;
    do {
        int inv = 0;
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b)
                if (perm[a] > perm[b]) ++inv;
        const double weight = std::pow(q, inv);
        std::vector<int> u(n);
        for (std::int64_t w = 0; w < dn; ++w) {
            auto ls = detail::word_letters(w, dim_h, n);
            for (int k = 0; k < n; ++k) u[k] = ls[perm[k]];
            G(detail::word_from_letters(u, dim_h), w) += weight;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return G;
}

struct GramClass {
    std::vector<std::int64_t> words;  // level-local word indices, increasing
    Eigen::MatrixXd G, sqrtG, invsqrtG, invG;
    double min_eigenvalue = 1.0;
};

struct FockLevel {
    int n = 0;
    std::int64_t dim = 1;
    std::vector<std::int32_t> class_of_word;
    std::vector<std::int32_t> local_index;
    std::vector<GramClass> classes;
};

class TruncatedFockSpace {
public:
    double q = 0.0;
    int dim_h = 0;
    int N = 0;
    std::int64_t total_dim = 0;
    std::vector<std::int64_t> level_offset;  // size N+2, offset[N+1] == total_dim
    std::vector<FockLevel> levels;
    bool gram_is_identity = false;  // q == 0

    std::int64_t index(int level, std::int64_t word) const {
        return level_offset[level] + word;
    }
    int level_of(std::int64_t global) const {
        int n = 0;
        while (global >= level_offset[n + 1]) ++n;
        return n;
    }
    std::int64_t word_of(std::int64_t global, int level) const {
        return global - level_offset[level];
    }
    std::vector<int> letters(int level, std::int64_t word) const {
        return detail::word_letters(word, dim_h, level);
    }

    enum class GramPower { Plain, Sqrt, InvSqrt, Inv };

    // Apply the block-diagonal G^p of one level to a level-local coordinate block.
    void apply_gram_power_level(int n, GramPower p, Eigen::Ref<Vector> block) const {
        if (gram_is_identity) return;
        const FockLevel& lv = levels[n];
        for (const GramClass& cls : lv.classes) {
            const Eigen::MatrixXd& M = p == GramPower::Plain     ? cls.G
                                       : p == GramPower::Sqrt    ? cls.sqrtG
                                       : p == GramPower::InvSqrt ? cls.invsqrtG
                                                                 : cls.invG;
            const int m = static_cast<int>(cls.words.size());
            Vector x(m);
            for (int i = 0; i < m; ++i) x[i] = block[cls.words[i]];
            Vector y = M * x;
            for (int i = 0; i < m; ++i) block[cls.words[i]] = y[i];
        }
    }

    void apply_gram_power(GramPower p, FockVector& v) const {
        if (gram_is_identity) return;
        for (int n = 0; n <= N; ++n)
            apply_gram_power_level(n, p, v.segment(level_offset[n], levels[n].dim));
    }

    FockVector gram_apply(const FockVector& v) const {
        FockVector out = v;
        apply_gram_power(GramPower::Plain, out);
        return out;
    }

    // Dense per-level G^p, assembled from the class blocks. Small levels only.
    Eigen::MatrixXd dense_gram_power(int n, GramPower p) const {
        const FockLevel& lv = levels[n];
        Eigen::MatrixXd out = Eigen::MatrixXd::Identity(lv.dim, lv.dim);
        if (gram_is_identity) return out;
        out.setZero();
        for (const GramClass& cls : lv.classes) {
            const Eigen::MatrixXd& M = p == GramPower::Plain     ? cls.G
                                       : p == GramPower::Sqrt    ? cls.sqrtG
                                       : p == GramPower::InvSqrt ? cls.invsqrtG
                                                                 : cls.invG;
            const int m = static_cast<int>(cls.words.size());
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j) out(cls.words[i], cls.words[j]) = M(i, j);
        }
        return out;
    }

    // Full block-diagonal G^p over all levels.
    Eigen::MatrixXd dense_gram_power_full(GramPower p) const {
        Eigen::MatrixXd out = Eigen::MatrixXd::Zero(total_dim, total_dim);
        for (int n = 0; n <= N; ++n) {
            Eigen::MatrixXd B = dense_gram_power(n, p);
            out.block(level_offset[n], level_offset[n], levels[n].dim, levels[n].dim) = B;
        }
        return out;
    }

    FockVector vacuum() const {
        FockVector v = FockVector::Zero(total_dim);
        v[0] = 1.0;
        return v;
    }
};

inline Complex q_inner(const TruncatedFockSpace& F, const FockVector& u, const FockVector& v) {
    if (u.size() != F.total_dim || v.size() != F.total_dim)
        throw std::invalid_argument("q_inner: vector does not live on this Fock space");
    return u.dot(F.gram_apply(v));
}

inline double q_norm(const TruncatedFockSpace& F, const FockVector& v) {
    double s = std::real(q_inner(F, v, v));
    return s > 0.0 ? std::sqrt(s) : 0.0;
}

namespace detail {

// Partition level-n words by letter multiset.
inline void build_class_partition(FockLevel& lv, int dim_h) {
    const int n = lv.n;
    lv.class_of_word.assign(lv.dim, -1);
    lv.local_index.assign(lv.dim, -1);
    std::map<std::vector<int>, std::int32_t> lookup;
    for (std::int64_t w = 0; w < lv.dim; ++w) {
        auto key = word_letters(w, dim_h, n);
        std::sort(key.begin(), key.end());
        auto [it, fresh] = lookup.try_emplace(key, static_cast<std::int32_t>(lv.classes.size()));
        if (fresh) lv.classes.emplace_back();
        GramClass& cls = lv.classes[it->second];
        lv.class_of_word[w] = it->second;
        lv.local_index[w] = static_cast<std::int32_t>(cls.words.size());
        cls.words.push_back(w);
    }
}

// Level recursion G_n = (1 x G_{n-1}) R_n with R_n = sum_k q^{k-1} (slot k to
// front), evaluated class by class. Validated against gram_naive.
inline void build_class_grams(FockLevel& lv, const FockLevel& prev, int dim_h, double q) {
    const int n = lv.n;
    for (GramClass& cls : lv.classes) {
        const int m = static_cast<int>(cls.words.size());
        cls.G = Eigen::MatrixXd::Zero(m, m);
        for (int j = 0; j < m; ++j) {
            auto w = word_letters(cls.words[j], dim_h, n);
            double coeff = 1.0;
            for (int k = 0; k < n; ++k, coeff *= q) {
                // move slot k to front; tail = w without slot k
                std::vector<int> tail;
                tail.reserve(n - 1);
                for (int t = 0; t < n; ++t)
                    if (t != k) tail.push_back(w[t]);
                const std::int64_t tail_word = word_from_letters(tail, dim_h);
                const GramClass& sub = prev.classes[prev.class_of_word[tail_word]];
                const int tcol = prev.local_index[tail_word];
                const std::int64_t head = static_cast<std::int64_t>(w[k]) * ipow(dim_h, n - 1);
                for (int ti = 0; ti < static_cast<int>(sub.words.size()); ++ti) {
                    const double g = sub.G(ti, tcol);
                    if (g == 0.0) continue;
                    const std::int64_t u = head + sub.words[ti];
                    cls.G(lv.local_index[u], j) += coeff * g;
                }
            }
        }
    }
}

inline void build_class_roots(FockLevel& lv) {
    for (GramClass& cls : lv.classes) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cls.G);
        cls.min_eigenvalue = es.eigenvalues().minCoeff();
        if (cls.min_eigenvalue < kGramSingularTol)
            throw std::runtime_error("gram numerically singular at level " +
                                     std::to_string(lv.n) + ": min eigenvalue " +
                                     std::to_string(cls.min_eigenvalue));
        const auto& V = es.eigenvectors();
        Eigen::VectorXd ev = es.eigenvalues();
        cls.sqrtG = V * ev.cwiseSqrt().asDiagonal() * V.transpose();
        cls.invsqrtG = V * ev.cwiseSqrt().cwiseInverse().asDiagonal() * V.transpose();
        cls.invG = V * ev.cwiseInverse().asDiagonal() * V.transpose();
    }
}

}  // namespace detail

inline TruncatedFockSpace build_fock(int dim_h, double q, int N) {
    if (!(q > -1.0 && q < 1.0)) throw std::invalid_argument("build_fock: q must lie in (-1,1)");
    if (dim_h < 1) throw std::invalid_argument("build_fock: dim_H must be >= 1");
    if (N < 1) throw std::invalid_argument("build_fock: truncation level N must be >= 1");
    if (detail::ipow(dim_h, N) > kWordBudget)
        throw std::invalid_argument("build_fock: dim_H^N exceeds the word budget of " +
                                    std::to_string(kWordBudget));

    TruncatedFockSpace F;
    F.q = q;
    F.dim_h = dim_h;
    F.N = N;
    F.gram_is_identity = (q == 0.0);
    F.level_offset.assign(N + 2, 0);
    F.levels.resize(N + 1);
    for (int n = 0; n <= N; ++n) {
        F.levels[n].n = n;
        F.levels[n].dim = detail::ipow(dim_h, n);
        F.level_offset[n + 1] = F.level_offset[n] + F.levels[n].dim;
        detail::build_class_partition(F.levels[n], dim_h);
    }
    F.total_dim = F.level_offset[N + 1];

    if (!F.gram_is_identity) {
        F.levels[0].classes[0].G = Eigen::MatrixXd::Ones(1, 1);
        for (int n = 1; n <= N; ++n)
            detail::build_class_grams(F.levels[n], F.levels[n - 1], dim_h, q);
        for (int n = 0; n <= N; ++n) detail::build_class_roots(F.levels[n]);
    }
    return F;
}

// Production Gram path: the class-blocked level recursion, assembled dense.
inline Eigen::MatrixXd gram_fast(int dim_h, int n, double q) {
    if (n == 0) return Eigen::MatrixXd::Ones(1, 1);
    std::vector<FockLevel> lvs(n + 1);
    for (int k = 0; k <= n; ++k) {
        lvs[k].n = k;
        lvs[k].dim = detail::ipow(dim_h, k);
        detail::build_class_partition(lvs[k], dim_h);
    }
    lvs[0].classes[0].G = Eigen::MatrixXd::Ones(1, 1);
    for (int k = 1; k <= n; ++k) detail::build_class_grams(lvs[k], lvs[k - 1], dim_h, q);
    const FockLevel& lv = lvs[n];
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(lv.dim, lv.dim);
    for (const GramClass& cls : lv.classes) {
        const int m = static_cast<int>(cls.words.size());
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) out(cls.words[i], cls.words[j]) = cls.G(i, j);
    }
    return out;
}

}  // namespace qfock
