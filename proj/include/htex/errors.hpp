#pragma once

#include <stdexcept>
#include <string>

namespace htex {

/// Grid has the wrong geometry for the requested operation (non-square,
/// non-power-of-two side, empty).
class shape_error : public std::invalid_argument {
public:
    explicit shape_error(const std::string& what) : std::invalid_argument(what) {}
};

/// Unreadable, truncated or unsupported image file.
class io_error : public std::runtime_error {
public:
    explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace htex
