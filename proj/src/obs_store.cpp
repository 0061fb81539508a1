#include "racer/obs_store.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace racer {

namespace {
void write_u32(std::ofstream& f, uint32_t v) {
    f.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
uint32_t read_u32(std::ifstream& f) {
    uint32_t v = 0;
    f.read(reinterpret_cast<char*>(&v), sizeof(v));
    return v;
}
}  // namespace

void ObservationStore::add(const Observation& obs) {
    if (obs.height != h_ || obs.width != w_)
        throw std::invalid_argument("observation store: frame resolution mismatch");
    frames_.insert(frames_.end(), obs.rgb.begin(), obs.rgb.end());
    ids_.push_back(obs.frame_id);
    progress_.push_back(obs.progress);
}

void ObservationStore::replace(std::size_t i, const Observation& obs) {
    if (i >= count()) throw std::out_of_range("observation store: replace out of range");
    if (obs.height != h_ || obs.width != w_)
        throw std::invalid_argument("observation store: frame resolution mismatch");
    std::memcpy(frames_.data() + i * frame_bytes(), obs.rgb.data(), frame_bytes());
    ids_[i] = obs.frame_id;
    progress_[i] = obs.progress;
}

Observation ObservationStore::frame(std::size_t i) const {
    if (i >= count()) throw std::out_of_range("observation store: frame out of range");
    Observation obs;
    obs.width = w_;
    obs.height = h_;
    obs.rgb.assign(frame_data(i), frame_data(i) + frame_bytes());
    obs.frame_id = ids_[i];
    obs.domain = domain_;
    obs.progress = progress_[i];
    return obs;
}

void ObservationStore::save(const std::filesystem::path& path) const {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("observation store: cannot write " + path.string());
    f.write("ROBS", 4);
    write_u32(f, static_cast<uint32_t>(count()));
    write_u32(f, static_cast<uint32_t>(h_));
    write_u32(f, static_cast<uint32_t>(w_));
    write_u32(f, 3);
    f.write(reinterpret_cast<const char*>(frames_.data()),
            static_cast<std::streamsize>(frames_.size()));
    if (!f) throw std::runtime_error("observation store: write failed " + path.string());
    f.close();

    nlohmann::json side{{"domain", domain_},
                        {"count", count()},
                        {"height", h_},
                        {"width", w_},
                        {"channels", 3},
                        {"collect_seed", collect_seed},
                        {"collect_target", collect_target},
                        {"frame_ids", ids_}};
    std::ofstream sf(path.string() + ".json", std::ios::trunc);
    sf << side.dump() << "\n";
}

ObservationStore ObservationStore::load(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("observation store: cannot open " + path.string());
    char magic[4];
    f.read(magic, 4);
    if (!f || std::memcmp(magic, "ROBS", 4) != 0)
        throw std::runtime_error("observation store: bad magic " + path.string());
    const uint32_t count = read_u32(f);
    const uint32_t h = read_u32(f);
    const uint32_t w = read_u32(f);
    const uint32_t c = read_u32(f);
    if (c != 3) throw std::runtime_error("observation store: expected 3 channels");

    ObservationStore store(static_cast<int>(h), static_cast<int>(w), "");
    store.frames_.resize(static_cast<std::size_t>(count) * store.frame_bytes());
    f.read(reinterpret_cast<char*>(store.frames_.data()),
           static_cast<std::streamsize>(store.frames_.size()));
    if (!f) throw std::runtime_error("observation store: truncated " + path.string());

    std::ifstream sf(path.string() + ".json");
    if (sf) {
        nlohmann::json side = nlohmann::json::parse(sf);
        store.domain_ = side.value("domain", "");
        store.collect_seed = side.value("collect_seed", uint64_t{0});
        store.collect_target = side.value("collect_target", uint64_t{0});
        if (side.contains("frame_ids"))
            store.ids_ = side.at("frame_ids").get<std::vector<uint64_t>>();
    }
    if (store.ids_.size() != count) store.ids_.assign(count, 0);
    store.progress_.assign(count, 0.f);
    return store;
}

void write_ppm(const std::filesystem::path& path, const Observation& obs) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write image: " + path.string());
    f << "P6\n" << obs.width << " " << obs.height << "\n255\n";
    f.write(reinterpret_cast<const char*>(obs.rgb.data()),
            static_cast<std::streamsize>(obs.rgb.size()));
}

}  // namespace racer
