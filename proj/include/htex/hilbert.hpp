#pragma once

#include <htex/errors.hpp>
#include <htex/grid.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

namespace htex {

/// Cell coordinates: x is the column, y the row, origin top-left.
struct Cell {
    std::uint32_t x = 0;
    std::uint32_t y = 0;
    friend bool operator==(const Cell&, const Cell&) = default;
};

/// Planar Hilbert curve of a given level, as a bijection between the step
/// index d in [0, 4^level) and the cells of a 2^level x 2^level grid.
///
/// Orientation: the curve enters at (0, 0) and leaves at (2^level - 1, 0).
/// At level 1 the visiting order is (0,0), (0,1), (1,1), (1,0).
class HilbertMap {
public:
    explicit HilbertMap(int level) : level_(level) {
        if (level < 1 || level > 15) {
            throw std::out_of_range("hilbert level must be in [1, 15], got " +
                                    std::to_string(level));
        }
    }

    int level() const noexcept { return level_; }
    std::uint32_t side() const noexcept { return std::uint32_t{1} << level_; }
    std::uint64_t total() const noexcept { return std::uint64_t{1} << (2 * level_); }

    Cell index_to_xy(std::uint64_t d) const {
        if (d >= total()) {
            throw std::out_of_range("hilbert index " + std::to_string(d) + " outside [0, " +
                                    std::to_string(total()) + ")");
        }
        std::uint32_t x = 0;
        std::uint32_t y = 0;
        std::uint64_t t = d;
        for (std::uint32_t s = 1; s < side(); s <<= 1) {
            const std::uint32_t rx = 1U & static_cast<std::uint32_t>(t >> 1);
            const std::uint32_t ry = 1U & (static_cast<std::uint32_t>(t) ^ rx);
            reflect(s, x, y, rx, ry);
            x += s * rx;
            y += s * ry;
            t >>= 2;
        }
        return {x, y};
    }

    std::uint64_t xy_to_index(std::uint32_t x, std::uint32_t y) const {
        const std::uint32_t n = side();
        if (x >= n || y >= n) {
            throw std::out_of_range("cell (" + std::to_string(x) + ", " + std::to_string(y) +
                                    ") outside a " + std::to_string(n) + "x" +
                                    std::to_string(n) + " grid");
        }
        std::uint64_t d = 0;
        for (std::uint32_t s = n >> 1; s > 0; s >>= 1) {
            const std::uint32_t rx = (x & s) ? 1U : 0U;
            const std::uint32_t ry = (y & s) ? 1U : 0U;
            d += std::uint64_t{s} * s * ((3U * rx) ^ ry);
            reflect(n, x, y, rx, ry);
        }
        return d;
    }

private:
    // Rotates/flips a sub-square so the lower-order bits follow the
    // orientation of the enclosing quadrant.
    static void reflect(std::uint32_t n, std::uint32_t& x, std::uint32_t& y, std::uint32_t rx,
                        std::uint32_t ry) noexcept {
        if (ry == 0) {
            if (rx == 1) {
                x = n - 1 - x;
                y = n - 1 - y;
            }
            std::swap(x, y);
        }
    }

    int level_;
};

/// Reads the grid along its Hilbert curve: result[d] = grid(index_to_xy(d)).
inline Sequence unfold(const ScalarGrid& grid) {
    if (grid.level() < 1) throw shape_error("unfold: grid is empty");
    const HilbertMap map(grid.level());
    Sequence out(map.total());
    for (std::uint64_t d = 0; d < map.total(); ++d) {
        const Cell c = map.index_to_xy(d);
        out[d] = grid(c.x, c.y);
    }
    return out;
}

}  // namespace htex
