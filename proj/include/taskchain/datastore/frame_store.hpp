#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "taskchain/env/raster.hpp"

namespace taskchain {

// Content-addressed PNG frames keyed by raster_ref. Identical frames are
// stored once. Thread-safe.
class FrameStore {
public:
    // Returns the frame's ref; encodes only the first time a ref is seen.
    std::string put(const Raster& raster);
    // Same, for a caller that already knows raster_ref(raster).
    void put(const std::string& ref, const Raster& raster);
    void put_png(const std::string& ref, std::vector<std::uint8_t> png);

    bool contains(const std::string& ref) const;
    std::optional<std::vector<std::uint8_t>> png(const std::string& ref) const;
    // Throws IoError for an unknown ref.
    Raster load(const std::string& ref) const;
    std::vector<std::string> refs() const;
    std::size_t size() const;

private:
    mutable std::mutex mu_;
    std::map<std::string, std::vector<std::uint8_t>> frames_;
};

}  // namespace taskchain
