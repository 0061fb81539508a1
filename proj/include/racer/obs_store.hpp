#ifndef RACER_OBS_STORE_HPP_
#define RACER_OBS_STORE_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "racer/render.hpp"

namespace racer {

// Flat collection of equally-sized RGB frames, persisted as a "ROBS" binary
// (magic, count/h/w/c header, contiguous u8 frames) plus a JSON sidecar with
// the domain id and collection metadata.
class ObservationStore {
public:
    ObservationStore() = default;
    ObservationStore(int height, int width, std::string domain_id)
        : h_(height), w_(width), domain_(std::move(domain_id)) {}

    void add(const Observation& obs);
    // Raw append used by reservoir sampling: overwrite slot i.
    void replace(std::size_t i, const Observation& obs);

    std::size_t count() const { return ids_.size(); }
    int height() const { return h_; }
    int width() const { return w_; }
    const std::string& domain() const { return domain_; }

    const uint8_t* frame_data(std::size_t i) const {
        return frames_.data() + i * frame_bytes();
    }
    std::size_t frame_bytes() const { return static_cast<std::size_t>(h_) * w_ * 3; }
    Observation frame(std::size_t i) const;
    uint64_t frame_id(std::size_t i) const { return ids_[i]; }

    uint64_t collect_seed = 0;     // metadata, persisted in the sidecar
    uint64_t collect_target = 0;   // frames seen before subsampling

    void save(const std::filesystem::path& path) const;
    static ObservationStore load(const std::filesystem::path& path);

private:
    int h_ = 0, w_ = 0;
    std::string domain_;
    std::vector<uint8_t> frames_;
    std::vector<uint64_t> ids_;       // original collection index of each frame
    std::vector<float> progress_;
};

// Binary PPM (P6) writer for previews and rendered samples.
void write_ppm(const std::filesystem::path& path, const Observation& obs);

}  // namespace racer

#endif  // RACER_OBS_STORE_HPP_
