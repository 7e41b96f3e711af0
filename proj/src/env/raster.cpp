#include "taskchain/env/raster.hpp"

#include <openssl/evp.h>
#include <png.h>

#include <cstring>
#include <string>

#include "taskchain/core/errors.hpp"

namespace taskchain {

Raster::Raster(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b) : width(w), height(h) {
    rgb.resize(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 3);
    for (std::size_t i = 0; i < rgb.size(); i += 3) {
        rgb[i] = r;
        rgb[i + 1] = g;
        rgb[i + 2] = b;
    }
}

std::vector<std::uint8_t> encode_png(const Raster& raster) {
    png_image image;
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(raster.width);
    image.height = static_cast<png_uint_32>(raster.height);
    image.format = PNG_FORMAT_RGB;
    image.flags = PNG_IMAGE_FLAG_FAST;

    png_alloc_size_t size = 0;
    if (!png_image_write_to_memory(&image, nullptr, &size, 0, raster.rgb.data(), 0, nullptr)) {
        std::string msg = image.message;
        png_image_free(&image);
        throw IoError("png sizing failed: " + msg);
    }
    std::vector<std::uint8_t> out(size);
    if (!png_image_write_to_memory(&image, out.data(), &size, 0, raster.rgb.data(), 0, nullptr)) {
        std::string msg = image.message;
        png_image_free(&image);
        throw IoError("png encode failed: " + msg);
    }
    out.resize(size);
    return out;
}

Raster decode_png(std::span<const std::uint8_t> bytes) {
    png_image image;
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
        throw DecodeError(std::string("png header: ") + image.message);
    }
    image.format = PNG_FORMAT_RGB;
    Raster out;
    out.width = static_cast<int>(image.width);
    out.height = static_cast<int>(image.height);
    out.rgb.resize(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, out.rgb.data(), 0, nullptr)) {
        std::string msg = image.message;
        png_image_free(&image);
        throw DecodeError("png body: " + msg);
    }
    return out;
}

namespace {

std::string digest_hex(const std::vector<std::span<const std::uint8_t>>& parts) {
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (ctx == nullptr) throw Error("EVP_MD_CTX_new failed");
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    bool ok = EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) == 1;
    for (const auto& p : parts) ok = ok && EVP_DigestUpdate(ctx, p.data(), p.size()) == 1;
    ok = ok && EVP_DigestFinal_ex(ctx, digest, &len) == 1;
    EVP_MD_CTX_free(ctx);
    if (!ok) throw Error("sha256 failed");
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out += kHex[digest[i] >> 4];
        out += kHex[digest[i] & 0xf];
    }
    return out;
}

}  // namespace

std::string sha256_hex(std::span<const std::uint8_t> bytes) { return digest_hex({bytes}); }

std::string raster_ref(const Raster& raster) {
    std::string header = "rgb8 " + std::to_string(raster.width) + "x" + std::to_string(raster.height) + "\n";
    std::span<const std::uint8_t> head(reinterpret_cast<const std::uint8_t*>(header.data()), header.size());
    return digest_hex({head, std::span<const std::uint8_t>(raster.rgb)});
}

namespace {

// Overlap, in units of 1/dst, between destination cell `d` and source cell
// `s` along one axis. Destination cell d spans [d*src, (d+1)*src) and source
// cell s spans [s*dst, (s+1)*dst) on that common grid.
struct AxisWeight {
    int source = 0;
    std::int64_t weight = 0;
};

std::vector<std::vector<AxisWeight>> axis_weights(int src, int dst) {
    std::vector<std::vector<AxisWeight>> out(static_cast<std::size_t>(dst));
    for (int d = 0; d < dst; ++d) {
        std::int64_t lo = static_cast<std::int64_t>(d) * src;
        std::int64_t hi = lo + src;
        int first = static_cast<int>(lo / dst);
        int last = static_cast<int>((hi - 1) / dst);
        for (int s = first; s <= last; ++s) {
            std::int64_t s_lo = static_cast<std::int64_t>(s) * dst;
            std::int64_t s_hi = s_lo + dst;
            std::int64_t w = std::min(hi, s_hi) - std::max(lo, s_lo);
            if (w > 0) out[static_cast<std::size_t>(d)].push_back({s, w});
        }
    }
    return out;
}

}  // namespace

Raster downsample(const Raster& src, int width, int height) {
    if (width < 1 || height < 1) throw PreconditionViolation("downsample target must be positive");
    if (width > src.width || height > src.height) {
        throw UpscaleRequested("cannot resize " + std::to_string(src.width) + "x" + std::to_string(src.height) +
                               " up to " + std::to_string(width) + "x" + std::to_string(height));
    }
    if (width == src.width && height == src.height) return src;

    auto wx = axis_weights(src.width, width);
    auto wy = axis_weights(src.height, height);
    const std::int64_t total = static_cast<std::int64_t>(src.width) * src.height;

    Raster out(width, height);
    std::vector<std::int64_t> row(static_cast<std::size_t>(width) * 3);
    for (int y = 0; y < height; ++y) {
        std::fill(row.begin(), row.end(), 0);
        for (const auto& [sy, ky] : wy[static_cast<std::size_t>(y)]) {
            for (int x = 0; x < width; ++x) {
                std::int64_t acc[3] = {0, 0, 0};
                for (const auto& [sx, kx] : wx[static_cast<std::size_t>(x)]) {
                    const std::uint8_t* p = &src.rgb[src.index(sx, sy)];
                    acc[0] += kx * p[0];
                    acc[1] += kx * p[1];
                    acc[2] += kx * p[2];
                }
                for (int c = 0; c < 3; ++c) row[static_cast<std::size_t>(x) * 3 + c] += ky * acc[c];
            }
        }
        for (int x = 0; x < width; ++x) {
            for (int c = 0; c < 3; ++c) {
                std::int64_t v = row[static_cast<std::size_t>(x) * 3 + c];
                out.rgb[out.index(x, y) + c] = static_cast<std::uint8_t>((v + total / 2) / total);
            }
        }
    }
    return out;
}

Observation downsample(const Observation& obs, int width, int height) {
    if (!obs.image) throw PreconditionViolation("observation has no image");
    Observation out;
    out.image = std::make_shared<const Raster>(downsample(*obs.image, width, height));
    out.meta = obs.meta;
    return out;
}

}  // namespace taskchain
