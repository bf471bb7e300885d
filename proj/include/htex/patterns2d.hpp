#pragma once

#include <htex/grid.hpp>
#include <htex/hilbert.hpp>
#include <htex/ordinal.hpp>
#include <htex/quantifiers.hpp>

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace htex {

/// Row-wise 2D ordinal patches: each `rows` x `cols` sub-matrix (sampled with
/// the given per-axis delays) is flattened left to right, top to bottom and
/// symbolized as one pattern of order rows*cols.
struct PatchSpec {
    int rows = 2;       // D_x
    int cols = 4;       // D_y
    int row_delay = 1;  // tau_x
    int col_delay = 1;  // tau_y

    int order() const noexcept { return rows * cols; }
};

inline void validate(const PatchSpec& spec) {
    if (spec.rows < 1 || spec.cols < 1 || spec.order() < kMinOrder || spec.order() > kMaxOrder) {
        throw std::invalid_argument("patch must have between 2 and 8 cells, got " +
                                    std::to_string(spec.rows) + "x" + std::to_string(spec.cols));
    }
    if (spec.row_delay < 1 || spec.col_delay < 1) {
        throw std::invalid_argument("patch delays must be >= 1");
    }
}

/// Distribution over all patch anchors (stride 1). The returned distribution
/// reports the row delay as its delay.
inline OrdinalDistribution build_distribution_2d(const Matrix& m, const PatchSpec& spec) {
    validate(spec);
    const std::size_t extent_y = static_cast<std::size_t>(spec.rows - 1) * spec.row_delay;
    const std::size_t extent_x = static_cast<std::size_t>(spec.cols - 1) * spec.col_delay;
    if (m.height() <= extent_y || m.width() <= extent_x) {
        throw std::invalid_argument("patch " + std::to_string(spec.rows) + "x" +
                                    std::to_string(spec.cols) + " does not fit in a " +
                                    std::to_string(m.width()) + "x" +
                                    std::to_string(m.height()) + " image");
    }
    const int order = spec.order();
    std::vector<std::uint64_t> counts(factorial(order), 0);
    std::array<double, kMaxOrder> window{};
    for (std::size_t y0 = 0; y0 + extent_y < m.height(); ++y0) {
        for (std::size_t x0 = 0; x0 + extent_x < m.width(); ++x0) {
            int k = 0;
            for (int r = 0; r < spec.rows; ++r) {
                for (int c = 0; c < spec.cols; ++c) {
                    window[k++] = m(x0 + static_cast<std::size_t>(c) * spec.col_delay,
                                    y0 + static_cast<std::size_t>(r) * spec.row_delay);
                }
            }
            ++counts[window_rank(window, 0, order, 1)];
        }
    }
    return OrdinalDistribution(order, spec.row_delay, std::move(counts));
}

inline OrdinalDistribution build_distribution_2d(const ScalarGrid& g, const PatchSpec& spec) {
    return build_distribution_2d(g.matrix(), spec);
}

/// The same image symbolized along its Hilbert path (order D, delay 1) and
/// with 2D row-wise patches.
struct MethodComparison {
    OrdinalDistribution hilbert_dist;
    OrdinalDistribution patch_dist;
    InfoTriple hilbert;
    InfoTriple patch;
};

inline MethodComparison compare_methods(const ScalarGrid& grid, int order, const PatchSpec& spec) {
    validate(spec);
    if (spec.order() != order) {
        throw std::invalid_argument("patch size " + std::to_string(spec.rows) + "x" +
                                    std::to_string(spec.cols) + " does not match D=" +
                                    std::to_string(order));
    }
    const Sequence seq = unfold(grid);
    auto h = build_distribution(seq, order, 1);
    auto p = build_distribution_2d(grid, spec);
    const InfoTriple th = info_triple(h);
    const InfoTriple tp = info_triple(p);
    return {std::move(h), std::move(p), th, tp};
}

}  // namespace htex
