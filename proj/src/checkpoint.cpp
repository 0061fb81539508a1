#include "racer/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace racer {

namespace {

using njson = nlohmann::json;

void write_u32(std::ofstream& f, uint32_t v) {
    f.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

uint32_t read_u32(std::ifstream& f) {
    uint32_t v = 0;
    f.read(reinterpret_cast<char*>(&v), sizeof(v));
    return v;
}

njson spec_to_json(const NetSpec& s) {
    njson conv = njson::array();
    for (const auto& c : s.conv)
        conv.push_back({{"filters", c.filters}, {"kernel", c.kernel}, {"stride", c.stride}});
    return njson{{"input_h", s.input_h},     {"input_w", s.input_w}, {"input_c", s.input_c},
                 {"conv", conv},             {"fc_hidden", s.fc_hidden},
                 {"outputs", s.outputs}};
}

NetSpec spec_from_json(const njson& j) {
    NetSpec s;
    s.input_h = j.at("input_h").get<int>();
    s.input_w = j.at("input_w").get<int>();
    s.input_c = j.value("input_c", 1);
    for (const auto& c : j.at("conv"))
        s.conv.push_back({c.at("filters").get<int>(), c.at("kernel").get<int>(),
                          c.at("stride").get<int>()});
    s.fc_hidden = j.at("fc_hidden").get<std::vector<int>>();
    s.outputs = j.at("outputs").get<int>();
    return s;
}

}  // namespace

void save_checkpoint(const PolicyNet& net, const std::filesystem::path& path, uint64_t rng_seed) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("checkpoint: cannot open for write: " + path.string());
    f.write("RDNN", 4);
    write_u32(f, kCheckpointVersion);
    write_u32(f, static_cast<uint32_t>(net.params.size()));
    for (const auto& t : net.params) {
        write_u32(f, static_cast<uint32_t>(t.shape.size()));
        for (int d : t.shape) write_u32(f, static_cast<uint32_t>(d));
        f.write(reinterpret_cast<const char*>(t.data.data()),
                static_cast<std::streamsize>(t.data.size() * sizeof(float)));
    }
    if (!f) throw std::runtime_error("checkpoint: write failed: " + path.string());
    f.close();

    njson side{{"format", "RDNN"},
               {"version", kCheckpointVersion},
               {"arch", spec_to_json(net.spec)},
               {"rng_seed", rng_seed}};
    std::ofstream sf(path.string() + ".json", std::ios::trunc);
    if (!sf) throw std::runtime_error("checkpoint: cannot write sidecar: " + path.string());
    sf << side.dump(2) << "\n";
}

PolicyNet load_checkpoint(const std::filesystem::path& path, uint64_t* rng_seed_out) {
    std::ifstream sf(path.string() + ".json");
    if (!sf) throw std::runtime_error("checkpoint: missing sidecar: " + path.string() + ".json");
    njson side = njson::parse(sf);
    NetSpec spec = spec_from_json(side.at("arch"));
    if (rng_seed_out) *rng_seed_out = side.value("rng_seed", uint64_t{0});

    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("checkpoint: cannot open: " + path.string());
    char magic[4];
    f.read(magic, 4);
    if (!f || std::memcmp(magic, "RDNN", 4) != 0)
        throw std::runtime_error("checkpoint: bad magic: " + path.string());
    const uint32_t version = read_u32(f);
    if (version != kCheckpointVersion)
        throw std::runtime_error("checkpoint: unsupported version " + std::to_string(version));
    const uint32_t count = read_u32(f);

    PolicyNet net;
    net.spec = spec;
    for (uint32_t i = 0; i < count; ++i) {
        const uint32_t ndim = read_u32(f);
        std::vector<int> dims(ndim);
        for (auto& d : dims) d = static_cast<int>(read_u32(f));
        TensorT<float> t(dims);
        f.read(reinterpret_cast<char*>(t.data.data()),
               static_cast<std::streamsize>(t.data.size() * sizeof(float)));
        if (!f) throw std::runtime_error("checkpoint: truncated: " + path.string());
        net.params.push_back(std::move(t));
    }

    // Cross-check the tensor chain against the sidecar architecture.
    PolicyNet ref = glorot_init(spec, 0);
    if (ref.params.size() != net.params.size())
        throw std::runtime_error("checkpoint: tensor count does not match architecture");
    for (std::size_t i = 0; i < ref.params.size(); ++i)
        if (ref.params[i].shape != net.params[i].shape)
            throw std::runtime_error("checkpoint: tensor shape does not match architecture");
    return net;
}

}  // namespace racer
