#include <htex/hilbert.hpp>
#include <htex/imageio.hpp>

#include <png.h>

#include <gtest/gtest.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <string>
#include <vector>

namespace {

namespace fs = std::filesystem;

class TempDir {
public:
    TempDir() {
        path_ = fs::temp_directory_path() /
                ("htex_imageio_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                 "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    fs::path file(const std::string& name) const { return path_ / name; }

private:
    fs::path path_;
};

void write_bytes(const fs::path& p, const std::string& bytes) {
    std::ofstream out(p, std::ios::binary);
    out << bytes;
}

// Minimal libpng writer for fixtures.
void write_png(const fs::path& p, int width, int height, int color_type, int bit_depth,
               const std::vector<unsigned char>& rows_data,
               const std::vector<png_color>& palette = {}) {
    FILE* fp = std::fopen(p.string().c_str(), "wb");
    ASSERT_NE(fp, nullptr);
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png_create_info_struct(png);
    png_init_io(png, fp);
    png_set_IHDR(png, info, width, height, bit_depth, color_type, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    if (!palette.empty()) {
        png_set_PLTE(png, info, palette.data(), static_cast<int>(palette.size()));
    }
    png_write_info(png, info);
    const std::size_t stride = rows_data.size() / height;
    for (int y = 0; y < height; ++y) {
        png_write_row(png, rows_data.data() + y * stride);
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
}

std::vector<double> values(const htex::Matrix& m) { return {m.values().begin(), m.values().end()}; }

TEST(LoadImage, BinaryPgm8) {
    TempDir dir;
    write_bytes(dir.file("a.pgm"), std::string("P5\n# comment\n3 2\n255\n") + std::string("\x00\x01\x02\x7f\x80\xff", 6));
    const auto img = htex::load_image(dir.file("a.pgm"));
    EXPECT_EQ(img.record.width, 3U);
    EXPECT_EQ(img.record.height, 2U);
    EXPECT_EQ(img.record.channels, 1);
    EXPECT_EQ(img.record.bit_depth, 8);
    EXPECT_EQ(img.record.label, "a");
    EXPECT_EQ(img.pixels, (std::vector<std::uint16_t>{0, 1, 2, 127, 128, 255}));
}

TEST(LoadImage, BinaryPgm16IsBigEndian) {
    TempDir dir;
    write_bytes(dir.file("b.pgm"), std::string("P5 2 1 65535\n") + std::string("\x01\x02\xff\xfe", 4));
    const auto img = htex::load_image(dir.file("b.pgm"));
    EXPECT_EQ(img.record.bit_depth, 16);
    EXPECT_EQ(img.pixels, (std::vector<std::uint16_t>{0x0102, 0xfffe}));
}

TEST(LoadImage, AsciiPgmAndPpm) {
    TempDir dir;
    write_bytes(dir.file("c.pgm"), "P2\n2 2\n# max\n15\n0 5\n10 15\n");
    const auto g = htex::load_image(dir.file("c.pgm"));
    EXPECT_EQ(g.pixels, (std::vector<std::uint16_t>{0, 5, 10, 15}));
    write_bytes(dir.file("d.ppm"), "P3 1 2 255  1 2 3  4 5 6\n");
    const auto c = htex::load_image(dir.file("d.ppm"));
    EXPECT_EQ(c.record.channels, 3);
    EXPECT_EQ(c.pixels, (std::vector<std::uint16_t>{1, 2, 3, 4, 5, 6}));
}

TEST(LoadImage, BinaryPpmKnownBytes) {
    TempDir dir;
    const std::string px("\xff\x00\x00\x00\xff\x00\x00\x00\xff\x10\x20\x30", 12);
    write_bytes(dir.file("e.ppm"), "P6\n2 2\n255\n" + px);
    const auto img = htex::load_image(dir.file("e.ppm"));
    EXPECT_EQ(img.record.channels, 3);
    EXPECT_EQ(img.pixels, (std::vector<std::uint16_t>{255, 0, 0, 0, 255, 0, 0, 0, 255, 16, 32, 48}));
    const auto m = htex::to_scalar(img);
    EXPECT_NEAR(m(0, 0), 76.245, 1e-12);
    EXPECT_NEAR(m(1, 0), 0.587 * 255, 1e-12);
    EXPECT_NEAR(m(0, 1), 0.114 * 255, 1e-12);
}

TEST(LoadImage, TruncatedAndMalformedFilesRaiseIoError) {
    TempDir dir;
    write_bytes(dir.file("t1.pgm"), std::string("P5\n4 4\n255\n") + std::string(10, 'x'));
    write_bytes(dir.file("t2.ppm"), "P3 2 2 255 1 2 3 4");
    write_bytes(dir.file("t3.pgm"), "P5\n4");
    write_bytes(dir.file("t4.pgm"), "P2 1 1 255 300");
    write_bytes(dir.file("t5.bin"), "GIF89a");
    write_bytes(dir.file("t6.pgm"), "");
    write_bytes(dir.file("t7.png"), "\x89PNG\r\n\x1a\n\x00\x00");
    for (const char* name : {"t1.pgm", "t2.ppm", "t3.pgm", "t4.pgm", "t5.bin", "t6.pgm", "t7.png"}) {
        EXPECT_THROW(htex::load_image(dir.file(name)), htex::io_error) << name;
    }
    EXPECT_THROW(htex::load_image(dir.file("missing.pgm")), htex::io_error);
}

TEST(LoadImage, PngGray8Gray16AndRgb) {
    TempDir dir;
    write_png(dir.file("g8.png"), 2, 2, PNG_COLOR_TYPE_GRAY, 8, {0, 10, 200, 255});
    const auto g8 = htex::load_image(dir.file("g8.png"));
    EXPECT_EQ(g8.record.channels, 1);
    EXPECT_EQ(g8.record.bit_depth, 8);
    EXPECT_EQ(g8.pixels, (std::vector<std::uint16_t>{0, 10, 200, 255}));

    write_png(dir.file("g16.png"), 2, 1, PNG_COLOR_TYPE_GRAY, 16, {0x12, 0x34, 0xff, 0x00});
    const auto g16 = htex::load_image(dir.file("g16.png"));
    EXPECT_EQ(g16.record.bit_depth, 16);
    EXPECT_EQ(g16.pixels, (std::vector<std::uint16_t>{0x1234, 0xff00}));

    write_png(dir.file("rgb.png"), 1, 2, PNG_COLOR_TYPE_RGB, 8, {1, 2, 3, 4, 5, 6});
    const auto rgb = htex::load_image(dir.file("rgb.png"));
    EXPECT_EQ(rgb.record.channels, 3);
    EXPECT_EQ(rgb.pixels, (std::vector<std::uint16_t>{1, 2, 3, 4, 5, 6}));
}

TEST(LoadImage, PngPaletteAlphaAndLowBitDepth) {
    TempDir dir;
    write_png(dir.file("pal.png"), 2, 1, PNG_COLOR_TYPE_PALETTE, 8, {1, 0},
              {{10, 20, 30}, {40, 50, 60}});
    const auto pal = htex::load_image(dir.file("pal.png"));
    EXPECT_EQ(pal.record.channels, 3);
    EXPECT_EQ(pal.pixels, (std::vector<std::uint16_t>{40, 50, 60, 10, 20, 30}));

    write_png(dir.file("rgba.png"), 1, 1, PNG_COLOR_TYPE_RGB_ALPHA, 8, {7, 8, 9, 128});
    const auto rgba = htex::load_image(dir.file("rgba.png"));
    EXPECT_EQ(rgba.record.channels, 3);
    EXPECT_EQ(rgba.pixels, (std::vector<std::uint16_t>{7, 8, 9}));

    write_png(dir.file("g1.png"), 8, 1, PNG_COLOR_TYPE_GRAY, 1, {0b10100000});
    const auto g1 = htex::load_image(dir.file("g1.png"));
    EXPECT_EQ(g1.record.channels, 1);
    EXPECT_EQ(g1.pixels, (std::vector<std::uint16_t>{255, 0, 255, 0, 0, 0, 0, 0}));
}

TEST(ToScalar, GrayPassesThroughAndGrayRgbIsIdentity) {
    htex::Image gray;
    gray.record = {"g", "", 2, 1, 1, 8};
    gray.pixels = {3, 250};
    EXPECT_EQ(values(htex::to_scalar(gray)), (std::vector<double>{3, 250}));
    htex::Image rgb;
    rgb.record = {"c", "", 1, 1, 3, 16};
    rgb.pixels = {40000, 40000, 40000};
    EXPECT_NEAR(htex::to_scalar(rgb)(0, 0), 40000.0, 1e-9);
}

htex::Matrix ramp(std::size_t w, std::size_t h) {
    htex::Matrix m(w, h);
    std::iota(m.values().begin(), m.values().end(), 0.0);
    return m;
}

TEST(Crop, CenteredPowerOfTwo) {
    const auto c640 = htex::center_crop_pow2(ramp(640, 640));
    EXPECT_EQ(c640.grid.side(), 512U);
    EXPECT_EQ(c640.offset_x, 64U);
    EXPECT_EQ(c640.offset_y, 64U);
    EXPECT_EQ(c640.grid(0, 0), 64.0 * 640 + 64);

    const auto c512 = htex::center_crop_pow2(ramp(512, 512));
    EXPECT_EQ(c512.grid.matrix(), ramp(512, 512));
    EXPECT_EQ(c512.offset_x, 0U);

    EXPECT_EQ(htex::center_crop_pow2(ramp(1023, 1023)).grid.side(), 512U);
    const auto wide = htex::center_crop_pow2(ramp(300, 130));
    EXPECT_EQ(wide.grid.side(), 128U);
    EXPECT_EQ(wide.offset_x, 86U);
    EXPECT_EQ(wide.offset_y, 1U);
    EXPECT_THROW(htex::center_crop_pow2(ramp(1, 5)), htex::shape_error);
}

TEST(Crop, Deterministic) {
    const auto a = htex::center_crop_pow2(ramp(700, 600));
    const auto b = htex::center_crop_pow2(ramp(700, 600));
    EXPECT_EQ(a.grid, b.grid);
    EXPECT_EQ(a.offset_x, b.offset_x);
}

TEST(Transform, TwoByTwoQuarterTurn) {
    // [[a,b],[c,d]] -> [[c,a],[d,b]]
    const htex::ScalarGrid g(htex::Matrix(2, 2, {1, 2, 3, 4}));
    EXPECT_EQ(values(htex::transform(g, htex::RigidOp::rot90).matrix()), (std::vector<double>{3, 1, 4, 2}));
    EXPECT_EQ(values(htex::transform(g, htex::RigidOp::mirror).matrix()), (std::vector<double>{2, 1, 4, 3}));
}

TEST(Transform, GroupLaws) {
    const htex::ScalarGrid g(5, std::vector<double>([] {
        std::vector<double> v(1024);
        std::iota(v.begin(), v.end(), 0.0);
        return v;
    }()));
    using htex::RigidOp;
    const auto r1 = htex::transform(g, RigidOp::rot90);
    const auto r2 = htex::transform(r1, RigidOp::rot90);
    const auto r3 = htex::transform(r2, RigidOp::rot90);
    EXPECT_EQ(r2, htex::transform(g, RigidOp::rot180));
    EXPECT_EQ(r3, htex::transform(g, RigidOp::rot270));
    EXPECT_EQ(htex::transform(r3, RigidOp::rot90), g);
    EXPECT_EQ(htex::transform(htex::transform(g, RigidOp::mirror), RigidOp::mirror), g);
    EXPECT_EQ(htex::transform(g, RigidOp::identity), g);
    EXPECT_NE(r1, g);
}

TEST(Transform, QuarterTurnsPermuteTheUnfoldedSequence) {
    std::vector<double> v(4096);
    std::iota(v.begin(), v.end(), 0.0);
    const htex::ScalarGrid g(6, v);
    auto base = htex::unfold(g);
    std::ranges::sort(base);
    for (auto op : {htex::RigidOp::rot90, htex::RigidOp::rot180, htex::RigidOp::rot270, htex::RigidOp::mirror}) {
        auto seq = htex::unfold(htex::transform(g, op));
        std::ranges::sort(seq);
        EXPECT_EQ(seq, base);
    }
}

TEST(Transform, Names) {
    for (auto op : {htex::RigidOp::identity, htex::RigidOp::rot90, htex::RigidOp::rot180,
                    htex::RigidOp::rot270, htex::RigidOp::mirror}) {
        EXPECT_EQ(htex::parse_rigid_op(htex::to_string(op)), op);
    }
    EXPECT_EQ(htex::parse_rigid_op("identity"), htex::RigidOp::identity);
    EXPECT_FALSE(htex::parse_rigid_op("rot45").has_value());
}

TEST(RotateArbitrary, ZeroDegreesIsTheCenterCrop) {
    const auto m = ramp(300, 260);
    EXPECT_EQ(htex::rotate_arbitrary(m, 0.0), htex::center_crop_pow2(m).grid);
}

TEST(RotateArbitrary, QuarterTurnsMatchRigidTransforms) {
    std::vector<double> v(64 * 64);
    std::iota(v.begin(), v.end(), 0.0);
    const htex::ScalarGrid g(6, v);
    EXPECT_EQ(htex::rotate_arbitrary(g.matrix(), 90.0), htex::transform(g, htex::RigidOp::rot90));
    EXPECT_EQ(htex::rotate_arbitrary(g.matrix(), 180.0), htex::transform(g, htex::RigidOp::rot180));
    EXPECT_EQ(htex::rotate_arbitrary(g.matrix(), -90.0), htex::transform(g, htex::RigidOp::rot270));
    EXPECT_EQ(htex::rotate_arbitrary(g.matrix(), 450.0), htex::transform(g, htex::RigidOp::rot90));
}

TEST(RotateArbitrary, ObliqueAnglesKeepOriginalValuesAndFitInside) {
    const auto m = ramp(512, 512);
    for (double deg : {30.0, 60.0, 120.0, 150.0, 200.0}) {
        const auto r = htex::rotate_arbitrary(m, deg);
        EXPECT_EQ(r.side(), 256U) << deg;
        for (double v : r.values()) {
            ASSERT_EQ(v, std::floor(v));
            ASSERT_GE(v, 0.0);
            ASSERT_LT(v, 512.0 * 512.0);
        }
    }
}

TEST(RotateArbitrary, NearestNeighbourFollowsTheRotation) {
    // Clockwise: the top-right quadrant ends up bottom-right.
    htex::Matrix m(64, 64, 0.0);
    for (std::size_t y = 0; y < 64; ++y) {
        for (std::size_t x = 0; x < 64; ++x) m(x, y) = x >= 32 && y < 32 ? 1.0 : 0.0;
    }
    const auto r = htex::rotate_arbitrary(m, 90.0);
    EXPECT_EQ(r(40, 40), 1.0);
    EXPECT_EQ(r(20, 20), 0.0);
    EXPECT_EQ(r(40, 20), 0.0);
}

TEST(Persistence, Pgm16RoundTripQuantization) {
    TempDir dir;
    const htex::ScalarGrid g(htex::Matrix(2, 2, {-1.0, 0.0, 0.5, 1.0}));
    const auto q = htex::write_pgm16(g, dir.file("q.pgm"));
    EXPECT_EQ(q.min, -1.0);
    EXPECT_EQ(q.max, 1.0);
    const auto img = htex::load_image(dir.file("q.pgm"));
    EXPECT_EQ(img.record.bit_depth, 16);
    EXPECT_EQ(img.pixels, (std::vector<std::uint16_t>{0, 32768, 49151, 65535}));
}

TEST(Persistence, RawF64RoundTripIsExact) {
    TempDir dir;
    std::vector<double> v(256);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::sin(static_cast<double>(i)) * 1e-7;
    const htex::ScalarGrid g(4, v);
    htex::write_raw_f64(g, dir.file("g.f64"));
    EXPECT_EQ(htex::read_raw_f64(dir.file("g.f64"), 4), g);
    EXPECT_THROW(htex::read_raw_f64(dir.file("g.f64"), 5), htex::io_error);
}

}  // namespace
