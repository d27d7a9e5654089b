#pragma once

// Modular data of (M_q, phi_q) on the truncated space: Delta (letterwise
// A^{-1}), the modular conjugation J (word reversal with letterwise I), the
// flow sigma_t, and Tomita/KMS consistency residuals.

#include <complex>
#include <stdexcept>
#include <vector>

#include "qfock/fock_space.hpp"
#include "qfock/operators.hpp"
#include "qfock/representation.hpp"

namespace qfock {

// Diagonal of Delta^s in the word basis: word with letter eigenvalues
// mu_1..mu_n carries prod_k mu_k^{-s}. s may be complex (s = it gives the
// flow unitaries, s = 1 the KMS continuation).
inline Vector delta_power_diagonal(const TruncatedFockSpace& F, const Representation& rep,
                                   Complex s) {
    if (rep.dim_h != F.dim_h)
        throw std::invalid_argument("representation/Fock space dimension mismatch");
    Vector diag(F.total_dim);
    std::vector<double> log_lambda(rep.dim_h);
    for (int i = 0; i < rep.dim_h; ++i) log_lambda[i] = std::log(rep.a_eigenvalues[i]);
    for (int n = 0; n <= F.N; ++n) {
        for (std::int64_t w = 0; w < F.levels[n].dim; ++w) {
            double sum_log = 0.0;
            std::int64_t x = w;
            for (int k = 0; k < n; ++k) {
                sum_log += log_lambda[x % F.dim_h];
                x /= F.dim_h;
            }
            diag[F.index(n, w)] = std::exp(-s * sum_log);
        }
    }
    return diag;
}

inline FockOperator delta_power(const TruncatedFockSpace& F, const Representation& rep,
                                Complex s) {
    Matrix m = delta_power_diagonal(F, rep, s).asDiagonal();
    return {&F, std::move(m), "Delta^s"};
}

// J: antilinear; on basis words, reverse the letters and apply I letterwise
// (equivalently letterwise A^{-1/2} on K_R tensors), conjugating coefficients.
inline FockVector modular_conjugation(const TruncatedFockSpace& F, const Representation& rep,
                                      const FockVector& v) {
    if (rep.dim_h != F.dim_h || v.size() != F.total_dim)
        throw std::invalid_argument("modular_conjugation: dimension mismatch");
    FockVector out = FockVector::Zero(F.total_dim);
    for (int n = 0; n <= F.N; ++n) {
        for (std::int64_t w = 0; w < F.levels[n].dim; ++w) {
            auto ls = F.letters(n, w);
            std::vector<int> rev(n);
            for (int k = 0; k < n; ++k) rev[k] = rep.conjugation_pairing[ls[n - 1 - k]];
            out[F.index(n, detail::word_from_letters(rev, F.dim_h))] =
                std::conj(v[F.index(n, w)]);
        }
    }
    return out;
}

// || J Delta^{1/2} (x Omega) - x* Omega ||_q, the Tomita relation S(xOmega) = x*Omega.
inline double tomita_residual(const TruncatedFockSpace& F, const Representation& rep,
                              const FockOperator& x) {
    const Vector half = delta_power_diagonal(F, rep, 0.5);
    FockVector lhs = modular_conjugation(F, rep, FockVector(half.cwiseProduct(x.mat.col(0))));
    FockVector rhs = adjoint_q(F, x).mat.col(0);
    return q_norm(F, FockVector(lhs - rhs));
}

// sigma_t(x) = Delta^{it} x Delta^{-it}.
inline FockOperator modular_flow(const TruncatedFockSpace& F, const Representation& rep,
                                 double t, const FockOperator& x) {
    const Vector u = delta_power_diagonal(F, rep, Complex(0.0, t));
    Matrix m = u.asDiagonal() * x.mat * u.cwiseInverse().asDiagonal();
    return {&F, std::move(m), "sigma_t(" + x.desc + ")"};
}

// |phi(ab) - phi(b Delta a Delta^{-1})|: the KMS boundary value, with the
// analytic continuation sigma_{-i}(a) taken as exact diagonal conjugation.
inline double kms_residual(const TruncatedFockSpace& F, const Representation& rep,
                           const FockOperator& a, const FockOperator& b) {
    const Vector d1 = delta_power_diagonal(F, rep, 1.0);
    Matrix cont = d1.asDiagonal() * a.mat * d1.cwiseInverse().asDiagonal();
    const Complex lhs = (a.mat * b.mat)(0, 0);
    const Complex rhs = (b.mat * cont)(0, 0);
    return std::abs(lhs - rhs);
}

}  // namespace qfock
