#pragma once

#include <htex/errors.hpp>
#include <htex/grid.hpp>

#include <png.h>

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace htex {

struct ImageRecord {
    std::string label;
    std::string source_path;
    std::size_t width = 0;
    std::size_t height = 0;
    int channels = 1;    // 1 (gray) or 3 (RGB)
    int bit_depth = 8;   // 8 or 16
};

/// Decoded image: pixels are row-major, channels interleaved, each value in
/// [0, 2^bit_depth).
struct Image {
    ImageRecord record;
    std::vector<std::uint16_t> pixels;
};

namespace detail {

inline std::vector<unsigned char> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// ---- PNM (P2, P3, P5, P6) --------------------------------------------------

class PnmReader {
public:
    PnmReader(const std::vector<unsigned char>& bytes, std::string name)
        : bytes_(bytes), name_(std::move(name)) {}

    Image read() {
        if (bytes_.size() < 2 || bytes_[0] != 'P') fail("not a PNM file");
        const char kind = static_cast<char>(bytes_[1]);
        if (kind != '2' && kind != '3' && kind != '5' && kind != '6') {
            fail(std::string("unsupported PNM variant P") + kind + " (expected P2, P3, P5 or P6)");
        }
        pos_ = 2;
        const bool ascii = kind == '2' || kind == '3';
        const int channels = (kind == '3' || kind == '6') ? 3 : 1;
        const auto width = header_int();
        const auto height = header_int();
        const auto maxval = header_int();
        if (width == 0 || height == 0) fail("zero image dimension");
        if (maxval == 0 || maxval > 65535) fail("maxval out of range");

        Image img;
        img.record.width = width;
        img.record.height = height;
        img.record.channels = channels;
        img.record.bit_depth = maxval > 255 ? 16 : 8;
        const std::size_t count = width * height * static_cast<std::size_t>(channels);
        img.pixels.resize(count);

        if (ascii) {
            for (auto& v : img.pixels) v = checked(header_int(), maxval);
        } else {
            // exactly one whitespace byte separates the header from the raster
            if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) fail("malformed header");
            ++pos_;
            const std::size_t bpv = maxval > 255 ? 2 : 1;
            if (bytes_.size() - pos_ < count * bpv) {
                fail("truncated raster: expected " + std::to_string(count * bpv) +
                     " bytes, found " + std::to_string(bytes_.size() - pos_));
            }
            for (std::size_t i = 0; i < count; ++i) {
                unsigned v = bytes_[pos_++];
                if (bpv == 2) v = (v << 8) | bytes_[pos_++];
                img.pixels[i] = checked(v, maxval);
            }
        }
        return img;
    }

private:
    [[noreturn]] void fail(const std::string& why) const { throw io_error(name_ + ": " + why); }

    void skip_space_and_comments() {
        while (pos_ < bytes_.size()) {
            if (bytes_[pos_] == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
            } else if (std::isspace(bytes_[pos_])) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    std::size_t header_int() {
        skip_space_and_comments();
        if (pos_ >= bytes_.size()) fail("truncated file");
        if (!std::isdigit(bytes_[pos_])) fail("expected a decimal number");
        std::size_t v = 0;
        while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
            v = v * 10 + (bytes_[pos_++] - '0');
            if (v > (std::size_t{1} << 31)) fail("number too large");
        }
        return v;
    }

    std::uint16_t checked(std::size_t v, std::size_t maxval) const {
        if (v > maxval) fail("sample exceeds maxval");
        return static_cast<std::uint16_t>(v);
    }

    const std::vector<unsigned char>& bytes_;
    std::string name_;
    std::size_t pos_ = 0;
};

// ---- PNG (libpng) -----------------------------------------------------------

struct PngSource {
    const unsigned char* data;
    std::size_t size;
    std::size_t pos;
};

extern "C" inline void htex_png_read(png_structp png, png_bytep out, png_size_t len) {
    auto* src = static_cast<PngSource*>(png_get_io_ptr(png));
    if (src->size - src->pos < len) png_error(png, "truncated PNG stream");
    std::memcpy(out, src->data + src->pos, len);
    src->pos += len;
}

extern "C" inline void htex_png_error(png_structp png, png_const_charp msg) {
    auto* buf = static_cast<char*>(png_get_error_ptr(png));
    std::strncpy(buf, msg, 255);
    buf[255] = '\0';
    png_longjmp(png, 1);
}

extern "C" inline void htex_png_warning(png_structp, png_const_charp) {}

struct PngResult {
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    int channels = 0;
    int bit_depth = 0;
    std::vector<unsigned char> raster;  // rows, big-endian for 16-bit
    std::vector<png_bytep> rows;
};

// Returns false and fills `err` on failure. No objects with destructors are
// created after setjmp, so longjmp leaves nothing to unwind.
inline bool decode_png(const std::vector<unsigned char>& bytes, PngResult& out, char (&err)[256]) {
    PngSource src{bytes.data(), bytes.size(), 0};
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, err, htex_png_error,
                                             htex_png_warning);
    if (!png) {
        std::strcpy(err, "libpng initialisation failed");
        return false;
    }
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        std::strcpy(err, "libpng initialisation failed");
        return false;
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        return false;
    }
    png_set_read_fn(png, &src, htex_png_read);
    png_read_info(png, info);

    const auto color = png_get_color_type(png, info);
    const auto depth = png_get_bit_depth(png, info);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
    png_set_interlace_handling(png);
    png_read_update_info(png, info);

    out.width = png_get_image_width(png, info);
    out.height = png_get_image_height(png, info);
    out.channels = png_get_channels(png, info);
    out.bit_depth = png_get_bit_depth(png, info);
    const std::size_t rowbytes = png_get_rowbytes(png, info);
    out.raster.resize(rowbytes * out.height);
    out.rows.resize(out.height);
    for (std::uint32_t y = 0; y < out.height; ++y) out.rows[y] = out.raster.data() + y * rowbytes;
    png_read_image(png, out.rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return true;
}

inline Image read_png(const std::vector<unsigned char>& bytes, const std::string& name) {
    PngResult res;
    char err[256] = {0};
    if (!decode_png(bytes, res, err)) throw io_error(name + ": PNG decode failed: " + err);
    if (res.channels != 1 && res.channels != 3) {
        throw io_error(name + ": unsupported PNG channel count " + std::to_string(res.channels));
    }
    if (res.bit_depth != 8 && res.bit_depth != 16) {
        throw io_error(name + ": unsupported PNG bit depth " + std::to_string(res.bit_depth));
    }
    Image img;
    img.record.width = res.width;
    img.record.height = res.height;
    img.record.channels = res.channels;
    img.record.bit_depth = res.bit_depth;
    const std::size_t count = std::size_t{res.width} * res.height * res.channels;
    img.pixels.resize(count);
    if (res.bit_depth == 8) {
        for (std::size_t i = 0; i < count; ++i) img.pixels[i] = res.raster[i];
    } else {
        for (std::size_t i = 0; i < count; ++i) {
            img.pixels[i] = static_cast<std::uint16_t>((res.raster[2 * i] << 8) | res.raster[2 * i + 1]);
        }
    }
    return img;
}

}  // namespace detail

/// Loads a PNM (P2/P3/P5/P6) or PNG file. The format is detected from the
/// file contents, not the extension.
inline Image load_image(const std::filesystem::path& path) {
    const auto bytes = detail::read_file(path);
    const std::string name = path.string();
    static constexpr unsigned char png_magic[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    Image img;
    if (bytes.size() >= 8 && std::equal(std::begin(png_magic), std::end(png_magic), bytes.begin())) {
        img = detail::read_png(bytes, name);
    } else if (bytes.size() >= 2 && bytes[0] == 'P') {
        img = detail::PnmReader(bytes, name).read();
    } else if (bytes.empty()) {
        throw io_error(name + ": empty file");
    } else {
        throw io_error(name + ": unrecognised format (expected PGM/PPM or PNG)");
    }
    img.record.source_path = name;
    img.record.label = path.stem().string();
    return img;
}

/// Gray images pass through; RGB is reduced to luma 0.299 R + 0.587 G + 0.114 B.
inline Matrix to_scalar(const Image& img) {
    const auto& r = img.record;
    Matrix m(r.width, r.height);
    auto out = m.values();
    if (r.channels == 1) {
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = img.pixels[i];
    } else if (r.channels == 3) {
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i] = 0.299 * img.pixels[3 * i] + 0.587 * img.pixels[3 * i + 1] +
                     0.114 * img.pixels[3 * i + 2];
        }
    } else {
        throw std::invalid_argument("to_scalar: channels must be 1 or 3");
    }
    return m;
}

// ---- Cropping and rigid transforms ---------------------------------------

struct CropResult {
    ScalarGrid grid;
    std::size_t offset_x = 0;
    std::size_t offset_y = 0;
};

inline std::size_t floor_pow2(std::size_t n) {
    return n == 0 ? 0 : std::bit_floor(n);
}

/// Centered square crop whose side is the largest power of two that fits.
inline CropResult center_crop_pow2(const Matrix& m) {
    const std::size_t shortest = std::min(m.width(), m.height());
    if (shortest < 2) throw shape_error("image too small to crop: need at least 2x2");
    const std::size_t side = floor_pow2(shortest);
    CropResult res;
    res.offset_x = (m.width() - side) / 2;
    res.offset_y = (m.height() - side) / 2;
    Matrix out(side, side);
    for (std::size_t y = 0; y < side; ++y) {
        for (std::size_t x = 0; x < side; ++x) out(x, y) = m(res.offset_x + x, res.offset_y + y);
    }
    res.grid = ScalarGrid(std::move(out));
    return res;
}

enum class RigidOp { identity, rot90, rot180, rot270, mirror };

inline std::string_view to_string(RigidOp op) {
    switch (op) {
        case RigidOp::identity: return "id";
        case RigidOp::rot90: return "rot90";
        case RigidOp::rot180: return "rot180";
        case RigidOp::rot270: return "rot270";
        case RigidOp::mirror: return "mirror";
    }
    return "id";
}

inline std::optional<RigidOp> parse_rigid_op(std::string_view s) {
    for (auto op : {RigidOp::identity, RigidOp::rot90, RigidOp::rot180, RigidOp::rot270,
                    RigidOp::mirror}) {
        if (s == to_string(op)) return op;
    }
    if (s == "identity") return RigidOp::identity;
    return std::nullopt;
}

/// Lossless quarter-turn rotations (clockwise as displayed) and left-right
/// mirror. rot90 maps [[a, b], [c, d]] to [[c, a], [d, b]].
inline ScalarGrid transform(const ScalarGrid& g, RigidOp op) {
    const std::size_t n = g.side();
    Matrix out(n, n);
    for (std::size_t y = 0; y < n; ++y) {
        for (std::size_t x = 0; x < n; ++x) {
            double v = 0.0;
            switch (op) {
                case RigidOp::identity: v = g(x, y); break;
                case RigidOp::rot90: v = g(y, n - 1 - x); break;
                case RigidOp::rot180: v = g(n - 1 - x, n - 1 - y); break;
                case RigidOp::rot270: v = g(n - 1 - y, x); break;
                case RigidOp::mirror: v = g(n - 1 - x, y); break;
            }
            out(x, y) = v;
        }
    }
    return ScalarGrid(std::move(out));
}

/// Nearest-neighbour rotation by `degrees` (clockwise as displayed, so 90
/// agrees with RigidOp::rot90) about the image centre, followed by a centered
/// crop to the largest power-of-two square lying entirely inside the rotated
/// image. Lossy for angles that are not multiples of 90.
inline ScalarGrid rotate_arbitrary(const Matrix& m, double degrees) {
    if (!std::isfinite(degrees)) throw std::invalid_argument("rotation angle must be finite");
    if (m.width() < 2 || m.height() < 2) throw shape_error("image too small to rotate");
    double a = std::fmod(degrees, 360.0);
    if (a < 0.0) a += 360.0;
    double c = std::cos(a * std::numbers::pi / 180.0);
    double s = std::sin(a * std::numbers::pi / 180.0);
    // exact values at quarter turns keep those rotations lossless
    if (a == 0.0) { c = 1.0; s = 0.0; }
    if (a == 90.0) { c = 0.0; s = 1.0; }
    if (a == 180.0) { c = -1.0; s = 0.0; }
    if (a == 270.0) { c = 0.0; s = -1.0; }

    const double shortest = static_cast<double>(std::min(m.width(), m.height()));
    const auto inscribed =
        static_cast<std::size_t>(std::floor(shortest / (std::abs(c) + std::abs(s)) + 1e-9));
    const std::size_t side = floor_pow2(inscribed);
    if (side < 2) throw shape_error("rotated image too small to crop");

    const double cx = (static_cast<double>(m.width()) - 1.0) / 2.0;
    const double cy = (static_cast<double>(m.height()) - 1.0) / 2.0;
    const double half = (static_cast<double>(side) - 1.0) / 2.0;
    const auto clamp_index = [](double v, std::size_t n) {
        const double r = std::nearbyint(v);
        return static_cast<std::size_t>(std::clamp(r, 0.0, static_cast<double>(n - 1)));
    };
    Matrix out(side, side);
    for (std::size_t y = 0; y < side; ++y) {
        for (std::size_t x = 0; x < side; ++x) {
            const double u = static_cast<double>(x) - half;
            const double v = static_cast<double>(y) - half;
            const double su = u * c + v * s;
            const double sv = -u * s + v * c;
            out(x, y) = m(clamp_index(cx + su, m.width()), clamp_index(cy + sv, m.height()));
        }
    }
    return ScalarGrid(std::move(out));
}

// ---- Output ------------------------------------------------------------------

struct Quantization {
    double min = 0.0;
    double max = 0.0;
};

/// Binary 16-bit PGM, values mapped linearly from [min, max] onto [0, 65535].
inline Quantization write_pgm16(const ScalarGrid& g, const std::filesystem::path& path) {
    const auto vals = g.values();
    const auto [lo, hi] = std::ranges::minmax_element(vals);
    Quantization q{*lo, *hi};
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write " + path.string());
    out << "P5\n" << g.side() << ' ' << g.side() << "\n65535\n";
    const double range = q.max - q.min;
    std::vector<unsigned char> buf(vals.size() * 2);
    for (std::size_t i = 0; i < vals.size(); ++i) {
        const double t = range > 0.0 ? (vals[i] - q.min) / range : 0.0;
        const auto v = static_cast<std::uint16_t>(std::lround(std::clamp(t, 0.0, 1.0) * 65535.0));
        buf[2 * i] = static_cast<unsigned char>(v >> 8);
        buf[2 * i + 1] = static_cast<unsigned char>(v & 0xFF);
    }
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!out) throw io_error("write failed: " + path.string());
    return q;
}

/// Lossless companion format: the grid values as little-endian IEEE-754
/// doubles, row-major, no header.
inline void write_raw_f64(const ScalarGrid& g, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write " + path.string());
    std::vector<unsigned char> buf(g.size() * 8);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto bits = std::bit_cast<std::uint64_t>(g.values()[i]);
        for (int b = 0; b < 8; ++b) buf[8 * i + b] = static_cast<unsigned char>(bits >> (8 * b));
    }
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!out) throw io_error("write failed: " + path.string());
}

inline ScalarGrid read_raw_f64(const std::filesystem::path& path, int level) {
    const auto bytes = detail::read_file(path);
    const std::size_t n = std::size_t{1} << (2 * level);
    if (bytes.size() != n * 8) {
        throw io_error(path.string() + ": expected " + std::to_string(n * 8) + " bytes, found " +
                       std::to_string(bytes.size()));
    }
    std::vector<double> vals(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::uint64_t bits = 0;
        for (int b = 0; b < 8; ++b) bits |= std::uint64_t{bytes[8 * i + b]} << (8 * b);
        vals[i] = std::bit_cast<double>(bits);
    }
    return ScalarGrid(level, std::move(vals));
}

}  // namespace htex
