#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "taskchain/core/errors.hpp"
#include "taskchain/env/raster.hpp"

namespace taskchain {
namespace {

Raster noise(int w, int h, std::uint64_t seed) {
    Raster r(w, h);
    std::mt19937_64 rng(seed);
    for (auto& v : r.rgb) v = static_cast<std::uint8_t>(rng());
    return r;
}

// Continuous-area oracle: each destination pixel averages the source square
// it covers, weighting partially covered source pixels by overlap area.
double oracle_pixel(const Raster& src, int w, int h, int dx, int dy, int c) {
    const double sx = static_cast<double>(src.width) / w, sy = static_cast<double>(src.height) / h;
    const double x0 = dx * sx, x1 = (dx + 1) * sx, y0 = dy * sy, y1 = (dy + 1) * sy;
    double acc = 0;
    for (int y = static_cast<int>(std::floor(y0)); y < static_cast<int>(std::ceil(y1)) && y < src.height; ++y) {
        double oy = std::min(y1, y + 1.0) - std::max(y0, static_cast<double>(y));
        for (int x = static_cast<int>(std::floor(x0)); x < static_cast<int>(std::ceil(x1)) && x < src.width; ++x) {
            double ox = std::min(x1, x + 1.0) - std::max(x0, static_cast<double>(x));
            acc += ox * oy * src.rgb[src.index(x, y) + c];
        }
    }
    return acc / (sx * sy);
}

TEST(Raster, DownsampleMatchesAreaOracle) {
    struct Case {
        int sw, sh, w, h;
    };
    for (auto [sw, sh, w, h] : {Case{64, 36, 32, 18}, Case{50, 30, 17, 11}, Case{7, 5, 3, 2}, Case{40, 40, 40, 13}}) {
        Raster src = noise(sw, sh, sw * 31 + w);
        Raster out = downsample(src, w, h);
        ASSERT_EQ(out.width, w);
        ASSERT_EQ(out.height, h);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                for (int c = 0; c < 3; ++c)
                    ASSERT_NEAR(out.rgb[out.index(x, y) + c], oracle_pixel(src, w, h, x, y, c), 0.5 + 1e-9)
                        << sw << "x" << sh << " -> " << w << "x" << h << " at " << x << "," << y;
    }
}

TEST(Raster, NativeToVerifierResolutionIsExactTwoByTwoMean) {
    Raster src = noise(1920, 1080, 3);
    Raster out = downsample(src, 960, 540);
    for (int y : {0, 100, 539})
        for (int x : {0, 477, 959})
            for (int c = 0; c < 3; ++c) {
                int sum = src.rgb[src.index(2 * x, 2 * y) + c] + src.rgb[src.index(2 * x + 1, 2 * y) + c] +
                          src.rgb[src.index(2 * x, 2 * y + 1) + c] + src.rgb[src.index(2 * x + 1, 2 * y + 1) + c];
                EXPECT_EQ(out.rgb[out.index(x, y) + c], (sum + 2) / 4);
            }
}

TEST(Raster, DownsampleIdentityAndErrors) {
    Raster src = noise(10, 6, 1);
    EXPECT_EQ(downsample(src, 10, 6), src);
    EXPECT_THROW(downsample(src, 11, 6), UpscaleRequested);
    EXPECT_THROW(downsample(src, 10, 7), UpscaleRequested);
    EXPECT_THROW(downsample(src, 0, 3), PreconditionViolation);
    Raster flat(30, 20, 9, 200, 77);
    EXPECT_EQ(downsample(flat, 7, 3), Raster(7, 3, 9, 200, 77));
}

TEST(Raster, PngRoundTripAndContentAddress) {
    Raster src = noise(33, 17, 5);
    auto png = encode_png(src);
    EXPECT_EQ(decode_png(png), src);
    EXPECT_EQ(raster_ref(src), raster_ref(decode_png(png)));
    EXPECT_NE(raster_ref(src), raster_ref(noise(33, 17, 6)));
    EXPECT_NE(raster_ref(Raster(2, 3)), raster_ref(Raster(3, 2)));
    std::vector<std::uint8_t> junk = {1, 2, 3, 4};
    EXPECT_THROW(decode_png(junk), DecodeError);
}

TEST(Raster, Sha256KnownVector) {
    std::string abc = "abc";
    EXPECT_EQ(sha256_hex({reinterpret_cast<const std::uint8_t*>(abc.data()), abc.size()}),
              "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

}  // namespace
}  // namespace taskchain
