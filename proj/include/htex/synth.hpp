#pragma once

#include <htex/grid.hpp>
#include <htex/rng.hpp>

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace htex {

// ---------------------------------------------------------------------------
// Multinomial multiplicative cascades
// ---------------------------------------------------------------------------

/// Quatrinomial cascade on the unit square. probs[0..3] are the mass
/// fractions given to the top-left, top-right, bottom-left and bottom-right
/// sub-squares at every subdivision.
struct CascadeSpec {
    std::array<double, 4> probs{0.25, 0.25, 0.25, 0.25};
    int steps = 1;
};

inline void validate(const CascadeSpec& spec) {
    double total = 0.0;
    for (double p : spec.probs) {
        if (!(p > 0.0) || !std::isfinite(p)) {
            throw std::invalid_argument("cascade probabilities must be positive");
        }
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw std::invalid_argument("cascade probabilities must sum to 1, got " +
                                    std::to_string(total));
    }
    if (spec.steps < 1 || spec.steps > 15) {
        throw std::invalid_argument("cascade steps must be in [1, 15]");
    }
}

/// Measure of every cell after `steps` subdivisions. A cell whose nesting
/// chain picks quadrant i n_i times gets p_1^n_1 p_2^n_2 p_3^n_3 p_4^n_4,
/// evaluated in that fixed order so cells with the same counts hold the
/// same double.
inline ScalarGrid cascade(const CascadeSpec& spec) {
    validate(spec);
    const int steps = spec.steps;
    const std::size_t n = std::size_t{1} << steps;

    // powers[i][k] = p_i^k
    std::array<std::vector<double>, 4> powers;
    for (int i = 0; i < 4; ++i) {
        powers[i].resize(steps + 1);
        for (int k = 0; k <= steps; ++k) powers[i][k] = std::pow(spec.probs[i], k);
    }

    ScalarGrid grid(steps);
    for (std::size_t y = 0; y < n; ++y) {
        for (std::size_t x = 0; x < n; ++x) {
            std::array<int, 4> count{};
            for (int b = 0; b < steps; ++b) {
                const std::size_t quadrant = ((y >> b) & 1U) * 2 + ((x >> b) & 1U);
                ++count[quadrant];
            }
            grid(x, y) = ((powers[0][count[0]] * powers[1][count[1]]) * powers[2][count[2]]) *
                         powers[3][count[3]];
        }
    }
    return grid;
}

/// Same values sorted ascending and laid out row-major (left to right, top to
/// bottom).
inline ScalarGrid ordered_variant(const ScalarGrid& grid) {
    std::vector<double> v(grid.values().begin(), grid.values().end());
    std::ranges::sort(v);
    return ScalarGrid(grid.level(), std::move(v));
}

/// Same values in a uniformly random order (Fisher-Yates, seeded).
inline ScalarGrid randomized_variant(const ScalarGrid& grid, std::uint64_t seed) {
    std::vector<double> v(grid.values().begin(), grid.values().end());
    Rng rng(seed);
    for (std::size_t i = v.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.below(i));
        std::swap(v[i - 1], v[j]);
    }
    return ScalarGrid(grid.level(), std::move(v));
}

// ---------------------------------------------------------------------------
// Fractional Brownian surfaces
// ---------------------------------------------------------------------------

struct FbsSpec {
    double hurst = 0.5;
    int level = 9;
    std::uint64_t seed = 0;
};

inline void validate(const FbsSpec& spec) {
    if (!(spec.hurst > 0.0 && spec.hurst < 1.0)) {
        throw std::invalid_argument("Hurst exponent must lie in (0, 1), got " +
                                    std::to_string(spec.hurst));
    }
    if (spec.level < 1 || spec.level > 10) {
        throw std::invalid_argument("fBs level must be in [1, 10]");
    }
}

namespace detail {

// FFTW's planner is not thread-safe; execution is.
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwPlanDeleter {
    void operator()(fftw_plan_s* p) const {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(p);
    }
};
using FftwPlan = std::unique_ptr<fftw_plan_s, FftwPlanDeleter>;

// In-place forward 2D DFT of a rows x cols row-major complex array.
inline void fft2_forward(std::vector<std::complex<double>>& data, int rows, int cols) {
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    FftwPlan plan;
    {
        std::lock_guard lock(fftw_planner_mutex());
        plan.reset(fftw_plan_dft_2d(rows, cols, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE));
    }
    if (!plan) throw std::runtime_error("fftw: could not create plan");
    fftw_execute(plan.get());
}

inline bool is_smooth(std::size_t k) {
    for (std::size_t p : {2U, 3U, 5U}) {
        while (k % p == 0) k /= p;
    }
    return k == 1;
}

// Stationary covariance whose intrinsic embedding reproduces the fBs
// variogram 2 r^alpha exactly for r <= 1 once the c2 |x|^2 correction is
// added back.
struct EmbeddedCovariance {
    double alpha = 1.0;
    double radius = 1.0;  // support [0, R]
    double beta = 0.0;
    double c0 = 0.5;
    double c2 = 0.5;

    explicit EmbeddedCovariance(double hurst) : alpha(2.0 * hurst) {
        if (alpha <= 1.5) {
            radius = 1.0;
            beta = 0.0;
            c2 = alpha / 2.0;
            c0 = 1.0 - alpha / 2.0;
        } else {
            radius = 2.0;
            const double r = radius;
            beta = alpha * (2.0 - alpha) / (3.0 * r * (r * r - 1.0));
            c2 = (alpha - beta * (r - 1.0) * (r - 1.0) * (r + 2.0)) / 2.0;
            c0 = beta * std::pow(r - 1.0, 3) + 1.0 - c2;
        }
    }

    double operator()(double r) const {
        if (r <= 1.0) return c0 - std::pow(r, alpha) + c2 * r * r;
        if (r <= radius) return beta * std::pow(radius - r, 3) / r;
        return 0.0;
    }
};

}  // namespace detail

/// Sample of an index-H fractional Brownian surface on a 2^level square
/// grid, by circulant embedding of an intrinsic stationary covariance
/// (exact in distribution, not a spectral approximation).
///
/// Scaled so that for pixel lags (h, k) the increments satisfy
/// Var[X(x+h, y+k) - X(x, y)] = (h^2 + k^2)^H, and X(0, 0) = 0.
inline ScalarGrid brownian_surface(const FbsSpec& spec) {
    validate(spec);
    const detail::EmbeddedCovariance cov(spec.hurst);
    const std::size_t out = std::size_t{1} << spec.level;

    // Grid spacing small enough that the output square fits in the unit
    // disc (all pairwise distances <= 1), with an FFT-friendly period.
    auto q = static_cast<std::size_t>(
        std::ceil(cov.radius * std::numbers::sqrt2 * static_cast<double>(out - 1)));
    q = std::max<std::size_t>(q, 1);
    while (!detail::is_smooth(q)) ++q;
    const std::size_t m = q + 1;  // lags 0..R
    const double step = cov.radius / static_cast<double>(q);
    const std::size_t period = 2 * q;

    // First row of the block-circulant covariance, mirrored in both axes.
    std::vector<std::complex<double>> c(period * period);
    for (std::size_t i = 0; i < period; ++i) {
        const std::size_t li = i < m ? i : period - i;
        for (std::size_t j = 0; j < period; ++j) {
            const std::size_t lj = j < m ? j : period - j;
            const double r = step * std::hypot(static_cast<double>(li), static_cast<double>(lj));
            c[i * period + j] = cov(r);
        }
    }
    const int n_fft = static_cast<int>(period);
    detail::fft2_forward(c, n_fft, n_fft);

    // Eigenvalues are non-negative for this embedding; rounding can leave
    // tiny negatives which are clipped.
    const double norm = static_cast<double>(period * period);
    Rng rng(spec.seed);
    std::vector<std::complex<double>>& w = c;
    for (auto& v : w) {
        const double a = std::sqrt(std::max(v.real(), 0.0) / norm);
        const double re = rng.normal();
        const double im = rng.normal();
        v = {a * re, a * im};
    }
    detail::fft2_forward(w, n_fft, n_fft);
    const double z1 = rng.normal();
    const double z2 = rng.normal();

    // Real part is a stationary field with covariance `cov`; pin it to zero
    // at the origin and restore the c2 |x|^2 term with a random linear trend.
    // The result has variogram 2 r^alpha in units of `step`; rescale so a
    // one-pixel lag has unit variance.
    const double origin = w[0].real();
    const double trend = std::sqrt(2.0 * cov.c2);
    const double scale = 1.0 / (std::numbers::sqrt2 * std::pow(step, spec.hurst));
    ScalarGrid grid(spec.level);
    for (std::size_t y = 0; y < out; ++y) {
        for (std::size_t x = 0; x < out; ++x) {
            const double v = w[y * period + x].real() - origin +
                             trend * step * (static_cast<double>(x) * z1 +
                                             static_cast<double>(y) * z2);
            grid(x, y) = v * scale;
        }
    }
    return grid;
}

}  // namespace htex
