#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "taskchain/core/types.hpp"

namespace taskchain {

// Native capture size of the desktop the pipeline drives.
inline constexpr Resolution kNativeResolution{1920, 1080};

// Packed 8-bit RGB, row-major, no padding.
struct Raster {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgb;

    Raster() = default;
    Raster(int w, int h, std::uint8_t r = 0, std::uint8_t g = 0, std::uint8_t b = 0);

    std::size_t index(int x, int y) const noexcept {
        return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)) * 3;
    }
    friend bool operator==(const Raster&, const Raster&) = default;
};

struct Observation {
    std::shared_ptr<const Raster> image;
    MetaMap meta;

    int width() const noexcept { return image ? image->width : 0; }
    int height() const noexcept { return image ? image->height : 0; }
};

std::vector<std::uint8_t> encode_png(const Raster& raster);
// Throws DecodeError on anything libpng rejects.
Raster decode_png(std::span<const std::uint8_t> bytes);

// Lowercase hex SHA-256.
std::string sha256_hex(std::span<const std::uint8_t> bytes);

// Content address of a frame: SHA-256 over a "rgb8 WxH\n" header and the
// pixels, so it does not depend on the PNG encoder.
std::string raster_ref(const Raster& raster);

// Area-averaging (box filter) resize with exact integer weights; identical
// input gives identical output. Throws UpscaleRequested when either target
// dimension exceeds the source, PreconditionViolation for empty targets.
Raster downsample(const Raster& src, int width, int height);
Observation downsample(const Observation& obs, int width, int height);

}  // namespace taskchain
