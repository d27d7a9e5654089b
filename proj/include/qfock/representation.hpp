#pragma once

// Finite-dimensional model of an orthogonal representation (H_R, U_t):
// a fixed subspace (eigenvalue 1) plus rotation blocks, diagonalized over C.
// Houses the generator A, the conjugation I, T = I A^{-1/2}, the j-map,
// spectral subspaces and I-fixed eigenvector families.

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qfock {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;

struct RotationBlock {
    double lambda = 0.0;  // eigenvalue, must be > 1
    int count = 0;        // number of 2-dimensional real subspaces
};

struct RepresentationSpec {
    double q = 0.0;  // deformation parameter, in (-1,1)
    int fixed_dim = 0;
    std::vector<RotationBlock> blocks;

    int dim_h() const {
        int d = fixed_dim;
        for (const auto& b : blocks) d += 2 * b.count;
        return d;
    }
};

// Complexified eigenbasis data. Basis order: fixed (lambda=1) indices first,
// then per block copy the lambda index followed by its lambda^{-1} partner.
struct Representation {
    double q = 0.0;
    int dim_h = 0;
    std::vector<double> a_eigenvalues;
    std::vector<int> conjugation_pairing;  // involutive index map for I

    // I v: antilinear, swaps paired coordinates and conjugates.
    Vector apply_I(const Vector& v) const {
        check_dim(v);
        Vector out(dim_h);
        for (int i = 0; i < dim_h; ++i)
            out[i] = std::conj(v[conjugation_pairing[i]]);
        return out;
    }

    void check_dim(const Vector& v) const {
        if (v.size() != dim_h)
            throw std::invalid_argument("representation: vector dimension " +
                                        std::to_string(v.size()) + " != dim_H " +
                                        std::to_string(dim_h));
    }
};

struct EigenvectorFamily {
    std::vector<Vector> vectors;  // orthonormal, I-fixed e_1..e_d
    double C = 1.0;               // spectral radius bound: spectrum in [C^-2, C^2]
};

inline Representation build_representation(const RepresentationSpec& spec) {
    if (!(spec.q > -1.0 && spec.q < 1.0))
        throw std::invalid_argument("representation: q must lie in (-1,1)");
    if (spec.fixed_dim < 0)
        throw std::invalid_argument("representation: fixed_dim must be nonnegative");
    for (const auto& b : spec.blocks) {
        if (!(b.lambda > 1.0))
            throw std::invalid_argument(
                "representation: block eigenvalue must exceed 1 (lambda<1 is the "
                "paired partner, lambda=1 goes in fixed_dim)");
        if (b.count <= 0)
            throw std::invalid_argument("representation: block count must be positive");
    }
    if (spec.dim_h() < 1)
        throw std::invalid_argument("representation: dim H must be at least 1");

    Representation rep;
    rep.q = spec.q;
    rep.dim_h = spec.dim_h();
    rep.a_eigenvalues.reserve(rep.dim_h);
    rep.conjugation_pairing.reserve(rep.dim_h);
    for (int i = 0; i < spec.fixed_dim; ++i) {
        rep.a_eigenvalues.push_back(1.0);
        rep.conjugation_pairing.push_back(i);
    }
    for (const auto& b : spec.blocks) {
        for (int c = 0; c < b.count; ++c) {
            int i = static_cast<int>(rep.a_eigenvalues.size());
            rep.a_eigenvalues.push_back(b.lambda);
            rep.a_eigenvalues.push_back(1.0 / b.lambda);
            rep.conjugation_pairing.push_back(i + 1);
            rep.conjugation_pairing.push_back(i);
        }
    }
    return rep;
}

// U_t = A^{it}: coordinate i picks up the phase lambda_i^{it}.
inline Vector apply_U(const Representation& rep, double t, const Vector& v) {
    rep.check_dim(v);
    Vector out(rep.dim_h);
    for (int i = 0; i < rep.dim_h; ++i) {
        double theta = t * std::log(rep.a_eigenvalues[i]);
        out[i] = v[i] * Complex(std::cos(theta), std::sin(theta));
    }
    return out;
}

inline Vector apply_A_power(const Representation& rep, double s, const Vector& v) {
    rep.check_dim(v);
    Vector out(rep.dim_h);
    for (int i = 0; i < rep.dim_h; ++i)
        out[i] = v[i] * std::pow(rep.a_eigenvalues[i], s);
    return out;
}

// T = I A^{-1/2}, antilinear.
inline Vector apply_T(const Representation& rep, const Vector& v) {
    return rep.apply_I(apply_A_power(rep, -0.5, v));
}

// j(xi) = sqrt(2/(1+A^{-1})) xi.
inline Vector j_map(const Representation& rep, const Vector& v) {
    rep.check_dim(v);
    Vector out(rep.dim_h);
    for (int i = 0; i < rep.dim_h; ++i)
        out[i] = v[i] * std::sqrt(2.0 / (1.0 + 1.0 / rep.a_eigenvalues[i]));
    return out;
}

inline std::vector<int> spectral_subspace(const Representation& rep, double lo, double hi) {
    if (!(lo > 0.0 && lo <= hi))
        throw std::invalid_argument("spectral_subspace: need 0 < lo <= hi");
    std::vector<int> out;
    for (int i = 0; i < rep.dim_h; ++i)
        if (lo <= rep.a_eigenvalues[i] && rep.a_eigenvalues[i] <= hi) out.push_back(i);
    return out;
}

// Orthonormal I-fixed family {e_i} with spectrum in [C^-2, C^2].
// Order: fixed basis vectors first, then per block copy with lambda in (1, C^2]
// (ascending lambda, then construction order) the two symmetrized vectors
// (xi + I xi)/norm and (i xi + I(i xi))/norm.
inline EigenvectorFamily build_eigenvector_family(const Representation& rep, double C, int d) {
    if (C < 1.0) throw std::invalid_argument("eigenvector family: C must be >= 1");
    if (d < 1) throw std::invalid_argument("eigenvector family: d must be >= 1");

    struct Candidate {
        double lambda;
        int idx;  // index of the lambda coordinate; partner is pairing[idx]
    };
    std::vector<int> fixed_idx;
    std::vector<Candidate> cands;
    for (int i = 0; i < rep.dim_h; ++i) {
        double lam = rep.a_eigenvalues[i];
        if (lam == 1.0 && rep.conjugation_pairing[i] == i) {
            fixed_idx.push_back(i);
        } else if (lam > 1.0 && lam <= C * C) {
            cands.push_back({lam, i});
        }
    }
    std::stable_sort(cands.begin(), cands.end(),
                     [](const Candidate& a, const Candidate& b) { return a.lambda < b.lambda; });

    int available = static_cast<int>(fixed_idx.size()) + 2 * static_cast<int>(cands.size());
    if (available < d)
        throw std::invalid_argument("insufficient spectral mass: " + std::to_string(available) +
                                    " I-fixed directions available in [C^-2,C^2], requested d=" +
                                    std::to_string(d));

    EigenvectorFamily fam;
    fam.C = C;
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (int i : fixed_idx) {
        if (static_cast<int>(fam.vectors.size()) == d) break;
        Vector e = Vector::Zero(rep.dim_h);
        e[i] = 1.0;
        fam.vectors.push_back(e);
    }
    for (const auto& c : cands) {
        if (static_cast<int>(fam.vectors.size()) == d) break;
        int p = rep.conjugation_pairing[c.idx];
        // (xi + I xi)/sqrt(2) with xi the lambda basis vector
        Vector e1 = Vector::Zero(rep.dim_h);
        e1[c.idx] = inv_sqrt2;
        e1[p] = inv_sqrt2;
        fam.vectors.push_back(e1);
        if (static_cast<int>(fam.vectors.size()) == d) break;
        // (i xi + I(i xi))/sqrt(2)
        Vector e2 = Vector::Zero(rep.dim_h);
        e2[c.idx] = Complex(0.0, inv_sqrt2);
        e2[p] = Complex(0.0, -inv_sqrt2);
        fam.vectors.push_back(e2);
    }
    return fam;
}

}  // namespace qfock
