#pragma once

#include <htex/errors.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace htex {

/// Dense row-major matrix of real values. Element (x, y) is column x of row y,
/// with the origin at the top-left corner.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t width, std::size_t height, double fill = 0.0)
        : width_(width), height_(height), values_(width * height, fill) {}
    Matrix(std::size_t width, std::size_t height, std::vector<double> values)
        : width_(width), height_(height), values_(std::move(values)) {
        if (values_.size() != width_ * height_) {
            throw shape_error("matrix: value count does not match width*height");
        }
    }

    std::size_t width() const noexcept { return width_; }
    std::size_t height() const noexcept { return height_; }
    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }

    double& operator()(std::size_t x, std::size_t y) { return values_[y * width_ + x]; }
    double operator()(std::size_t x, std::size_t y) const { return values_[y * width_ + x]; }

    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_; }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t width_ = 0;
    std::size_t height_ = 0;
    std::vector<double> values_;
};

/// Square image of side 2^level with finite values; the object every
/// scan and quantifier in this library operates on.
class ScalarGrid {
public:
    ScalarGrid() = default;

    /// Constant grid of side 2^level.
    explicit ScalarGrid(int level, double fill = 0.0) : level_(check_level(level)) {
        const std::size_t n = side();
        data_ = Matrix(n, n, fill);
    }

    /// Wraps a square matrix; throws shape_error unless the side is a power
    /// of two >= 2 and every value is finite.
    explicit ScalarGrid(Matrix m) {
        if (m.width() != m.height()) {
            throw shape_error("grid must be square, got " + std::to_string(m.width()) + "x" +
                              std::to_string(m.height()));
        }
        const std::size_t n = m.width();
        if (n < 2 || (n & (n - 1)) != 0) {
            throw shape_error("grid side must be a power of two >= 2, got " + std::to_string(n));
        }
        if (!std::ranges::all_of(m.values(), [](double v) { return std::isfinite(v); })) {
            throw shape_error("grid values must be finite");
        }
        level_ = 0;
        while ((std::size_t{1} << level_) < n) ++level_;
        data_ = std::move(m);
    }

    /// Grid of side 2^level from row-major values.
    ScalarGrid(int level, std::vector<double> values)
        : ScalarGrid(Matrix(std::size_t{1} << check_level(level), std::size_t{1} << level,
                            std::move(values))) {}

    int level() const noexcept { return level_; }
    std::size_t side() const noexcept { return std::size_t{1} << level_; }
    std::size_t size() const noexcept { return data_.size(); }

    double operator()(std::size_t x, std::size_t y) const { return data_(x, y); }
    double& operator()(std::size_t x, std::size_t y) { return data_(x, y); }

    std::span<const double> values() const noexcept { return data_.values(); }
    std::span<double> values() noexcept { return data_.values(); }
    const Matrix& matrix() const noexcept { return data_; }

    friend bool operator==(const ScalarGrid&, const ScalarGrid&) = default;

private:
    static int check_level(int level) {
        if (level < 1 || level > 15) {
            throw shape_error("grid level must be in [1, 15], got " + std::to_string(level));
        }
        return level;
    }

    int level_ = 0;
    Matrix data_;
};

using Sequence = std::vector<double>;

}  // namespace htex
