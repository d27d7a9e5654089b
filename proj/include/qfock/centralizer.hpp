#pragma once

// Stable noncommutative polynomials: monomials in free symbols X_i, Y_i with
// multiplicative eigenvalue weight, enumeration of the weight-one (stable)
// monomials, and their realization as Wick-operator polynomials.

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "qfock/modular.hpp"
#include "qfock/operators.hpp"

namespace qfock {

// One letter of a monomial: X_i (is_y = false) carries weight lambda_i,
// Y_i carries lambda_i^{-1}. Indices are 0-based.
struct MonomialLetter {
    int index = 0;
    bool is_y = false;

    bool operator==(const MonomialLetter&) const = default;
};

using Monomial = std::vector<MonomialLetter>;

struct StablePolynomial {
    std::vector<double> lambdas;
    std::vector<std::pair<Complex, Monomial>> terms;
};

inline double monomial_weight(const std::vector<double>& lambdas, const Monomial& m) {
    double w = 1.0;
    for (const auto& l : m) {
        if (l.index < 0 || l.index >= static_cast<int>(lambdas.size()))
            throw std::invalid_argument("monomial_weight: symbol index out of range");
        w *= l.is_y ? 1.0 / lambdas[l.index] : lambdas[l.index];
    }
    return w;
}

inline bool monomial_is_stable(const std::vector<double>& lambdas, const Monomial& m,
                               double rel_tol = 1e-12) {
    return std::abs(monomial_weight(lambdas, m) - 1.0) <= rel_tol;
}

inline std::string monomial_to_string(const Monomial& m) {
    if (m.empty()) return "1";
    std::string s;
    for (const auto& l : m)
        s += (l.is_y ? "Y" : "X") + std::to_string(l.index + 1);
    return s;
}

// All weight-one monomials of degree <= max_degree, ordered by degree, then
// lexicographically in the alphabet X_1 < Y_1 < X_2 < Y_2 < ...
inline std::vector<Monomial> stable_monomials(const std::vector<double>& lambdas,
                                              int max_degree) {
    if (max_degree > 8)
        throw std::invalid_argument("stable_monomials: degree cap 8 exceeded");
    const int n = static_cast<int>(lambdas.size());
    std::vector<Monomial> out;
    std::vector<Monomial> frontier{Monomial{}};
    out.push_back(Monomial{});
    for (int deg = 1; deg <= max_degree; ++deg) {
        std::vector<Monomial> next;
        for (const auto& m : frontier) {
            for (int i = 0; i < n; ++i) {
                for (bool is_y : {false, true}) {
                    Monomial ext = m;
                    ext.push_back({i, is_y});
                    next.push_back(ext);
                    if (monomial_is_stable(lambdas, ext)) out.push_back(ext);
                }
            }
        }
        frontier = std::move(next);
    }
    return out;
}

// p(W(xi_1), W(xi_1)*, ..., W(xi_n), W(xi_n)*). Each xi_i must be a unit
// A-eigenvector for lambda_i; every monomial must be stable.
inline FockOperator realize_stable(const TruncatedFockSpace& F, const Representation& rep,
                                   const StablePolynomial& p, const std::vector<Vector>& xis) {
    if (xis.size() != p.lambdas.size())
        throw std::invalid_argument("realize_stable: eigenvalue/assignment mismatch");
    for (std::size_t i = 0; i < xis.size(); ++i) {
        rep.check_dim(xis[i]);
        const Vector a_xi = apply_A_power(rep, 1.0, xis[i]);
        if ((a_xi - p.lambdas[i] * xis[i]).norm() > 1e-10 || std::abs(xis[i].norm() - 1.0) > 1e-10)
            throw std::invalid_argument(
                "realize_stable: xi_" + std::to_string(i + 1) +
                " is not a unit A-eigenvector for lambda = " + std::to_string(p.lambdas[i]));
    }
    for (const auto& [coeff, m] : p.terms) {
        if (!monomial_is_stable(p.lambdas, m))
            throw std::invalid_argument("realize_stable: monomial " + monomial_to_string(m) +
                                        " has weight " +
                                        std::to_string(monomial_weight(p.lambdas, m)) +
                                        " != 1 (not stable)");
    }

    std::vector<Matrix> x_ops, y_ops;
    for (std::size_t i = 0; i < xis.size(); ++i) {
        FockOperator w = wick(F, rep, xis[i]);
        y_ops.push_back(adjoint_q(F, w).mat);
        x_ops.push_back(std::move(w.mat));
    }
    Matrix acc = Matrix::Zero(F.total_dim, F.total_dim);
    for (const auto& [coeff, m] : p.terms) {
        Matrix term = Matrix::Identity(F.total_dim, F.total_dim);
        for (const auto& l : m) term *= l.is_y ? y_ops[l.index] : x_ops[l.index];
        acc += coeff * term;
    }
    return {&F, std::move(acc), "stable polynomial"};
}

// || Delta^{it} p Delta^{-it} - p || in the q operator norm, maximized over a
// fixed incommensurate t-grid; centralizer membership diagnostic.
inline double flow_invariance_residual(const TruncatedFockSpace& F, const Representation& rep,
                                       const FockOperator& p) {
    static const double grid[] = {0.1, 0.37, 1.0, 3.14159265358979323846};
    double worst = 0.0;
    for (double t : grid) {
        FockOperator moved = modular_flow(F, rep, t, p);
        FockOperator diff{&F, moved.mat - p.mat, "flow diff"};
        worst = std::max(worst, operator_norm_q(F, diff));
    }
    return worst;
}

}  // namespace qfock
