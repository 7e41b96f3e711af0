#include "taskchain/datastore/frame_store.hpp"

#include "taskchain/core/errors.hpp"

namespace taskchain {

std::string FrameStore::put(const Raster& raster) {
    std::string ref = raster_ref(raster);
    put(ref, raster);
    return ref;
}

void FrameStore::put(const std::string& ref, const Raster& raster) {
    {
        std::lock_guard lock(mu_);
        if (frames_.contains(ref)) return;
    }
    auto png = encode_png(raster);
    std::lock_guard lock(mu_);
    frames_.try_emplace(ref, std::move(png));
}

void FrameStore::put_png(const std::string& ref, std::vector<std::uint8_t> png) {
    std::lock_guard lock(mu_);
    frames_.try_emplace(ref, std::move(png));
}

bool FrameStore::contains(const std::string& ref) const {
    std::lock_guard lock(mu_);
    return frames_.contains(ref);
}

std::optional<std::vector<std::uint8_t>> FrameStore::png(const std::string& ref) const {
    std::lock_guard lock(mu_);
    auto it = frames_.find(ref);
    if (it == frames_.end()) return std::nullopt;
    return it->second;
}

Raster FrameStore::load(const std::string& ref) const {
    auto bytes = png(ref);
    if (!bytes) throw IoError("frame " + ref + " not in store");
    return decode_png(*bytes);
}

std::vector<std::string> FrameStore::refs() const {
    std::lock_guard lock(mu_);
    std::vector<std::string> out;
    out.reserve(frames_.size());
    for (const auto& [ref, _] : frames_) out.push_back(ref);
    return out;
}

std::size_t FrameStore::size() const {
    std::lock_guard lock(mu_);
    return frames_.size();
}

}  // namespace taskchain
