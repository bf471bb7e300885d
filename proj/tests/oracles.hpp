#pragma once

// Slow, obviously-correct reference implementations used only by tests.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <utility>
#include <vector>

namespace oracle {

// Rank of each element, ties broken by position (earlier gets the lower rank).
inline std::vector<int> sort_pattern(const std::vector<double>& w) {
    std::vector<int> idx(w.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return w[a] < w[b]; });
    std::vector<int> rank(w.size());
    for (std::size_t r = 0; r < idx.size(); ++r) rank[idx[r]] = static_cast<int>(r);
    return rank;
}

// Every permutation of {0..n-1} in lexicographic order, via std::next_permutation.
inline std::map<std::vector<int>, std::size_t> lexicographic_index(int n) {
    std::vector<int> p(n);
    std::iota(p.begin(), p.end(), 0);
    std::map<std::vector<int>, std::size_t> index;
    std::size_t k = 0;
    do {
        index[p] = k++;
    } while (std::next_permutation(p.begin(), p.end()));
    return index;
}

// Pattern counts indexed by lexicographic position, by sorting every window.
inline std::vector<std::uint64_t> bandt_pompe_counts(const std::vector<double>& seq, int order,
                                                     int delay) {
    const auto index = lexicographic_index(order);
    std::vector<std::uint64_t> counts(index.size(), 0);
    const std::size_t span = static_cast<std::size_t>(order - 1) * delay;
    for (std::size_t s = 0; s + span < seq.size(); ++s) {
        std::vector<double> w;
        for (int k = 0; k < order; ++k) w.push_back(seq[s + static_cast<std::size_t>(k) * delay]);
        ++counts[index.at(sort_pattern(w))];
    }
    return counts;
}

// Level-n Hilbert curve by recursive subdivision of the square, starting at
// (0,0) and leaving along +y.
inline void hilbert_recursive(double x0, double y0, double xi, double xj, double yi, double yj,
                              int n, std::vector<std::pair<int, int>>& out) {
    if (n == 0) {
        out.emplace_back(static_cast<int>(std::floor(x0 + (xi + yi) / 2)),
                         static_cast<int>(std::floor(y0 + (xj + yj) / 2)));
        return;
    }
    hilbert_recursive(x0, y0, yi / 2, yj / 2, xi / 2, xj / 2, n - 1, out);
    hilbert_recursive(x0 + xi / 2, y0 + xj / 2, xi / 2, xj / 2, yi / 2, yj / 2, n - 1, out);
    hilbert_recursive(x0 + xi / 2 + yi / 2, y0 + xj / 2 + yj / 2, xi / 2, xj / 2, yi / 2, yj / 2,
                      n - 1, out);
    hilbert_recursive(x0 + xi / 2 + yi, y0 + xj / 2 + yj, -yi / 2, -yj / 2, -xi / 2, -xj / 2, n - 1,
                      out);
}

inline std::vector<std::pair<int, int>> hilbert_path(int level) {
    const double side = std::ldexp(1.0, level);
    std::vector<std::pair<int, int>> out;
    hilbert_recursive(0, 0, 0, side, side, 0, level, out);
    return out;
}

// Quantifiers written directly from their definitions, on full vectors.
inline double entropy(const std::vector<double>& p) {
    long double s = 0.0L;
    for (double v : p) {
        if (v > 0) s -= static_cast<long double>(v) * std::log(static_cast<long double>(v));
    }
    return static_cast<double>(s);
}

inline double js_to_uniform(const std::vector<double>& p) {
    const double m = static_cast<double>(p.size());
    std::vector<double> mid(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) mid[i] = (p[i] + 1.0 / m) / 2.0;
    return entropy(mid) - entropy(p) / 2.0 - std::log(m) / 2.0;
}

inline std::pair<double, double> entropy_complexity(const std::vector<double>& p) {
    const double m = static_cast<double>(p.size());
    std::vector<double> delta(p.size(), 0.0);
    delta[0] = 1.0;
    const double h = entropy(p) / std::log(m);
    return {h, js_to_uniform(p) / js_to_uniform(delta) * h};
}

inline double fisher(const std::vector<double>& p) {
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
        sum += std::pow(std::sqrt(p[i + 1]) - std::sqrt(p[i]), 2);
    }
    const bool edge_delta = p.front() == 1.0 || p.back() == 1.0;
    return (edge_delta ? 1.0 : 0.5) * sum;
}

// Point on the probability simplex, Dirichlet(alpha) distributed.
template <typename Gen>
std::vector<double> simplex_point(std::size_t m, double alpha, Gen& gen) {
    std::gamma_distribution<double> g(alpha, 1.0);
    std::vector<double> p(m);
    double total = 0.0;
    for (auto& v : p) {
        v = g(gen);
        total += v;
    }
    if (total == 0.0) {
        p.assign(m, 0.0);
        p[0] = 1.0;
        return p;
    }
    for (auto& v : p) v /= total;
    return p;
}

// Binomial cascade on [0,1]: 2^steps cells, left half weighted by p.
inline std::vector<double> binomial_cascade(double p, int steps) {
    std::vector<double> mu{1.0};
    for (int s = 0; s < steps; ++s) {
        std::vector<double> next;
        for (double v : mu) {
            next.push_back(v * p);
            next.push_back(v * (1.0 - p));
        }
        mu = std::move(next);
    }
    return mu;
}

// Quatrinomial cascade by literal recursive subdivision of the square.
inline void cascade_fill(std::vector<double>& grid, std::size_t side, std::size_t x0,
                         std::size_t y0, std::size_t size, double mass,
                         const std::array<double, 4>& p) {
    if (size == 1) {
        grid[y0 * side + x0] = mass;
        return;
    }
    const std::size_t h = size / 2;
    cascade_fill(grid, side, x0, y0, h, mass * p[0], p);
    cascade_fill(grid, side, x0 + h, y0, h, mass * p[1], p);
    cascade_fill(grid, side, x0, y0 + h, h, mass * p[2], p);
    cascade_fill(grid, side, x0 + h, y0 + h, h, mass * p[3], p);
}

// Value multiset {prod p_i^n_i : sum n_i = steps} with multinomial multiplicities.
inline std::vector<std::pair<double, std::uint64_t>> cascade_multiset(const std::array<double, 4>& p,
                                                                      int steps) {
    std::vector<std::uint64_t> fact(steps + 1, 1);
    for (int i = 1; i <= steps; ++i) fact[i] = fact[i - 1] * static_cast<std::uint64_t>(i);
    std::vector<std::pair<double, std::uint64_t>> out;
    for (int a = 0; a <= steps; ++a) {
        for (int b = 0; a + b <= steps; ++b) {
            for (int c = 0; a + b + c <= steps; ++c) {
                const int d = steps - a - b - c;
                const double v = std::pow(p[0], a) * std::pow(p[1], b) * std::pow(p[2], c) *
                                 std::pow(p[3], d);
                out.emplace_back(v, fact[steps] / (fact[a] * fact[b] * fact[c] * fact[d]));
            }
        }
    }
    return out;
}

}  // namespace oracle
