#pragma once

// Combinatorial oracle for vacuum moments of Wick letters: pair partitions of
// {1,...,2n} weighted by q^{crossings}, covariance <T xi_l, xi_r> per pair.
// Independent of the dense Fock path it cross-validates.

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "qfock/representation.hpp"

namespace qfock {

inline constexpr int kPairingCap = 8;  // 15!! = 2,027,025 partitions at n=8

struct PairPartition {
    int n_pairs = 0;
    std::vector<std::pair<int, int>> pairs;  // (l, r), l < r, 1-based points
    int crossings = 0;
};

inline int count_crossings(const std::vector<std::pair<int, int>>& pairs) {
    int cr = 0;
    for (std::size_t a = 0; a < pairs.size(); ++a)
        for (std::size_t b = 0; b < pairs.size(); ++b) {
            // (a1,a2), (b1,b2) cross iff a1 < b1 < a2 < b2
            if (pairs[a].first < pairs[b].first && pairs[b].first < pairs[a].second &&
                pairs[a].second < pairs[b].second)
                ++cr;
        }
    return cr;
}

namespace detail {

inline void enumerate_pairings_rec(int two_n, std::uint32_t used,
                                   std::vector<std::pair<int, int>>& acc,
                                   std::vector<PairPartition>& out) {
    int first = -1;
    for (int i = 0; i < two_n; ++i)
        if (!(used & (1u << i))) {
            first = i;
            break;
        }
    if (first < 0) {
        out.push_back({two_n / 2, acc, count_crossings(acc)});
        return;
    }
    for (int j = first + 1; j < two_n; ++j) {
        if (used & (1u << j)) continue;
        acc.emplace_back(first + 1, j + 1);
        enumerate_pairings_rec(two_n, used | (1u << first) | (1u << j), acc, out);
        acc.pop_back();
    }
}

}  // namespace detail

// All (2n-1)!! perfect matchings, deterministic order: the smallest unmatched
// point is paired with partners in increasing order.
inline std::vector<PairPartition> enumerate_pairings(int n) {
    if (n > kPairingCap)
        throw std::invalid_argument("enumerate_pairings: n exceeds cap " +
                                    std::to_string(kPairingCap));
    std::vector<PairPartition> out;
    if (n <= 0) {
        out.push_back({0, {}, 0});
        return out;
    }
    std::vector<std::pair<int, int>> acc;
    detail::enumerate_pairings_rec(2 * n, 0, acc, out);
    return out;
}

// sum over pairings of q^{crossings} times the crossing-free weight
// prod <T xi_l, xi_r>; equals the vacuum moment of W(xi_1)...W(xi_2n).
inline Complex moment_pairing_formula(const Representation& rep, double q,
                                      const std::vector<Vector>& xis) {
    if (xis.size() % 2 != 0)
        throw std::invalid_argument("moment_pairing_formula: odd number of letters");
    const int n = static_cast<int>(xis.size()) / 2;
    std::vector<Vector> t_xis;
    t_xis.reserve(xis.size());
    for (const auto& xi : xis) t_xis.push_back(apply_T(rep, xi));
    Complex total = 0.0;
    for (const auto& pp : enumerate_pairings(n)) {
        Complex term = std::pow(q, pp.crossings);
        for (const auto& [l, r] : pp.pairs) term *= t_xis[l - 1].dot(xis[r - 1]);
        total += term;
    }
    return total;
}

// Odd products of Wick letters have no vacuum component.
inline Complex odd_moment(const Representation&, double, const std::vector<Vector>& xis) {
    if (xis.size() % 2 == 0)
        throw std::invalid_argument("odd_moment: even number of letters");
    return 0.0;
}

// sum over pairings of q^{crossings}; (2n-1)!! at q=1, Catalan C_n at q=0.
inline double crossing_polynomial(int n, double q) {
    double total = 0.0;
    for (const auto& pp : enumerate_pairings(n)) total += std::pow(q, pp.crossings);
    return total;
}

}  // namespace qfock
