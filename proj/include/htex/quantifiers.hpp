#pragma once

#include <htex/ordinal.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace htex {

/// Normalized permutation entropy, Jensen-Shannon statistical complexity and
/// discrete Fisher information of one distribution. All in [0, 1].
struct InfoTriple {
    double entropy = 0.0;     // H
    double complexity = 0.0;  // C_JS
    double fisher = 0.0;      // F
};

/// Throws std::invalid_argument unless p is a probability vector: at least
/// one entry, all entries finite and >= 0, total 1 within 1e-9.
inline void validate_probabilities(std::span<const double> p) {
    if (p.empty()) throw std::invalid_argument("probability vector is empty");
    double total = 0.0;
    for (double v : p) {
        if (!std::isfinite(v) || v < 0.0) {
            throw std::invalid_argument("probability entries must be finite and non-negative");
        }
        total += v;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw std::invalid_argument("probabilities sum to " + std::to_string(total) +
                                    ", expected 1");
    }
}

namespace detail {

// -sum p ln p with 0 ln 0 = 0, Neumaier-compensated. Every entropy in this
// file goes through here, so equal inputs give bit-identical results.
inline double entropy_sum(std::span<const double> p) noexcept {
    double s = 0.0;
    double c = 0.0;
    for (double v : p) {
        if (!(v > 0.0)) continue;
        const double term = -v * std::log(v);
        const double t = s + term;
        c += std::abs(s) >= std::abs(term) ? (s - t) + term : (term - t) + s;
        s = t;
    }
    return s + c;
}

inline double uniform_entropy(std::size_t m) {
    const std::vector<double> u(m, 1.0 / static_cast<double>(m));
    return entropy_sum(u);
}

inline double js_to_uniform_unchecked(std::span<const double> p, double s_uniform) {
    const double u = 1.0 / static_cast<double>(p.size());
    std::vector<double> mid(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) mid[i] = 0.5 * (p[i] + u);
    return entropy_sum(mid) - 0.5 * entropy_sum(p) - 0.5 * s_uniform;
}

}  // namespace detail

/// Shannon entropy in nats.
inline double shannon(std::span<const double> p) {
    validate_probabilities(p);
    return detail::entropy_sum(p);
}

/// S[P] / S_max with S_max the entropy of the uniform distribution over the
/// same support size.
inline double entropy_normalized(std::span<const double> p) {
    validate_probabilities(p);
    if (p.size() < 2) throw std::invalid_argument("normalized entropy needs at least 2 states");
    const double h = detail::entropy_sum(p) / detail::uniform_entropy(p.size());
    return std::clamp(h, 0.0, 1.0);
}

/// Jensen-Shannon divergence J(P, Pe) between P and the uniform distribution.
inline double js_divergence_to_uniform(std::span<const double> p) {
    validate_probabilities(p);
    return detail::js_to_uniform_unchecked(p, detail::uniform_entropy(p.size()));
}

/// Largest J(P, Pe) over all distributions on m states (reached at any delta).
inline double js_divergence_max(std::size_t m) {
    if (m < 2) throw std::invalid_argument("js_divergence_max: need m >= 2");
    const double n = static_cast<double>(m);
    return -0.5 * (((n + 1.0) / n) * std::log(n + 1.0) - 2.0 * std::log(2.0 * n) + std::log(n));
}

/// C_JS = Q_J * H with Q_J = J(P, Pe) / J_max.
inline double complexity_js(std::span<const double> p) {
    validate_probabilities(p);
    if (p.size() < 2) throw std::invalid_argument("complexity needs at least 2 states");
    const double s_uniform = detail::uniform_entropy(p.size());
    const double h = std::clamp(detail::entropy_sum(p) / s_uniform, 0.0, 1.0);
    const double q = detail::js_to_uniform_unchecked(p, s_uniform) / js_divergence_max(p.size());
    return std::clamp(q * h, 0.0, 1.0);
}

/// Discrete Fisher information F0 * sum_i (sqrt p_{i+1} - sqrt p_i)^2 over the
/// given ordering of states. F0 = 1 for a delta on the first or last state,
/// 1/2 otherwise.
inline double fisher_discrete(std::span<const double> p) {
    validate_probabilities(p);
    if (p.size() < 2) throw std::invalid_argument("fisher needs at least 2 states");
    const auto delta_at = [&](std::size_t k) {
        if (p[k] != 1.0) return false;
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (i != k && p[i] != 0.0) return false;
        }
        return true;
    };
    const double f0 = (delta_at(0) || delta_at(p.size() - 1)) ? 1.0 : 0.5;
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
        const double d = std::sqrt(p[i + 1]) - std::sqrt(p[i]);
        sum += d * d;
    }
    return std::clamp(f0 * sum, 0.0, 1.0);
}

inline double fisher_discrete(const OrdinalDistribution& dist) {
    return fisher_discrete(dist.probs());
}

inline InfoTriple info_triple(std::span<const double> p) {
    return {entropy_normalized(p), complexity_js(p), fisher_discrete(p)};
}

inline InfoTriple info_triple(const OrdinalDistribution& dist) {
    if (dist.samples() == 0) throw std::invalid_argument("info_triple: empty distribution");
    return info_triple(dist.probs());
}

// ---------------------------------------------------------------------------
// Complexity-entropy plane bounds
// ---------------------------------------------------------------------------

struct PlanePoint {
    double entropy = 0.0;
    double complexity = 0.0;
};

/// Lower and upper limit curves of C_JS as functions of H for M states.
struct ComplexityBounds {
    std::size_t states = 0;
    std::vector<PlanePoint> lower;
    std::vector<PlanePoint> upper;
};

namespace detail {

// A distribution described by groups of equal entries: `count` entries of
// value `value`. Keeps the bound families O(1) in M.
struct Group {
    double count;
    double value;
};

inline PlanePoint grouped_point(std::span<const Group> groups, double m) {
    const double log_m = std::log(m);
    double s = 0.0;
    double s_mid = 0.0;
    double covered = 0.0;
    for (const auto& g : groups) {
        if (g.count <= 0.0) continue;
        covered += g.count;
        if (g.value > 0.0) s -= g.count * g.value * std::log(g.value);
        const double mid = 0.5 * (g.value + 1.0 / m);
        s_mid -= g.count * mid * std::log(mid);
    }
    const double zeros = m - covered;
    if (zeros > 0.0) {
        const double mid = 0.5 / m;
        s_mid -= zeros * mid * std::log(mid);
    }
    const double h = std::clamp(s / log_m, 0.0, 1.0);
    const double j = s_mid - 0.5 * s - 0.5 * log_m;
    return {h, std::clamp(j / js_divergence_max(static_cast<std::size_t>(m)) * h, 0.0, 1.0)};
}

// One state with probability p, the other m-1 equal.
inline PlanePoint lower_family(double m, double p) {
    const Group g[] = {{1.0, p}, {m - 1.0, (1.0 - p) / (m - 1.0)}};
    return grouped_point(g, m);
}

// k states carry mass: one with p, k-1 equal; the remaining m-k are empty.
inline PlanePoint upper_family(double m, double k, double p) {
    const Group g[] = {{1.0, p}, {k - 1.0, (1.0 - p) / (k - 1.0)}};
    return grouped_point(g, m);
}

// Parameter in [lo, hi] where a monotone entropy map hits `target`.
inline double solve_monotone(const std::function<double(double)>& entropy_of, double lo,
                             double hi, double target) {
    const bool increasing = entropy_of(hi) >= entropy_of(lo);
    for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if ((entropy_of(mid) < target) == increasing) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

inline void check_bounds_args(std::size_t m, double h) {
    if (m < 2) throw std::invalid_argument("complexity bounds need M >= 2");
    if (!(h >= 0.0 && h <= 1.0)) throw std::invalid_argument("entropy must be in [0, 1]");
}

}  // namespace detail

/// Smallest C_JS attainable at normalized entropy h on m states: one state
/// with probability p in [1/m, 1], the rest uniform.
inline double complexity_min_at(std::size_t m, double h) {
    detail::check_bounds_args(m, h);
    if (h == 0.0 || h == 1.0) return 0.0;
    const auto md = static_cast<double>(m);
    const double p = detail::solve_monotone(
        [md](double x) { return detail::lower_family(md, x).entropy; }, 1.0 / md, 1.0, h);
    return detail::lower_family(md, p).complexity;
}

/// Largest C_JS attainable at normalized entropy h on m states. The family
/// with k non-empty states covers H in [ln(k-1)/ln m, ln k/ln m].
inline double complexity_max_at(std::size_t m, double h) {
    detail::check_bounds_args(m, h);
    if (h == 0.0 || h == 1.0) return 0.0;
    const auto md = static_cast<double>(m);
    const double log_m = std::log(md);
    std::size_t k = 2;
    while (k < m && std::log(static_cast<double>(k)) < h * log_m) ++k;
    const auto kd = static_cast<double>(k);
    const double p = detail::solve_monotone(
        [md, kd](double x) { return detail::upper_family(md, kd, x).entropy; }, 0.0, 1.0 / kd,
        h);
    return detail::upper_family(md, kd, p).complexity;
}

/// Both limit curves sampled at `samples` evenly spaced entropies in [0, 1].
inline ComplexityBounds cecp_bounds(std::size_t m, std::size_t samples) {
    if (m < 2) throw std::invalid_argument("cecp_bounds: need M >= 2");
    if (samples < 2) throw std::invalid_argument("cecp_bounds: need at least 2 samples");
    ComplexityBounds b;
    b.states = m;
    b.lower.reserve(samples);
    b.upper.reserve(samples);
    for (std::size_t i = 0; i < samples; ++i) {
        const double h = static_cast<double>(i) / static_cast<double>(samples - 1);
        b.lower.push_back({h, complexity_min_at(m, h)});
        b.upper.push_back({h, complexity_max_at(m, h)});
    }
    return b;
}

}  // namespace htex
