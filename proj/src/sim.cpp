#include "racer/sim.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace racer {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

CarState step_dynamics(const CarState& state, const DiscreteAction& action, double dt,
                       double wheelbase, double speed_tau) {
    if (dt <= 0) throw std::invalid_argument("step_dynamics: dt must be positive");
    if (wheelbase <= 0) throw std::invalid_argument("step_dynamics: wheelbase must be positive");

    CarState next = state;
    const double steer = action.steering_deg * kPi / 180.0;
    const double cmd = action.speed_mps;
    const double v =
        speed_tau > 0 ? cmd + (state.speed - cmd) * std::exp(-dt / speed_tau) : cmd;

    const double omega = v * std::tan(steer) / wheelbase;
    if (std::fabs(omega * dt) < 1e-12) {
        next.x += v * dt * std::cos(state.heading);
        next.y += v * dt * std::sin(state.heading);
    } else {
        const double h2 = state.heading + omega * dt;
        const double r = v / omega;
        next.x += r * (std::sin(h2) - std::sin(state.heading));
        next.y -= r * (std::cos(h2) - std::cos(state.heading));
        next.heading = h2;
    }
    next.speed = v;
    next.steering = steer;
    next.time += dt;
    return next;
}

bool is_off_track(const Track& track, const CarState& state) {
    return track.project(state.x, state.y).dist > track.half_width();
}

double reward(const Track& track, const CarState& prev, const CarState& curr, bool off_track,
              bool lap_complete, const SimParams& params) {
    if (off_track) return -params.crash_penalty;
    double r = track.wrap_delta(prev.progress, curr.progress) - params.step_cost;
    if (lap_complete) r += params.lap_bonus;
    return r;
}

const char* terminal_name(Terminal t) {
    switch (t) {
        case Terminal::lap_complete: return "lap_complete";
        case Terminal::off_track: return "off_track";
        case Terminal::timeout: return "timeout";
    }
    return "?";
}

CarState start_state(const Track& track) {
    CarState s;
    const double s0 = track.start_s();
    const Vec2 p = track.point_at(s0);
    s.x = p[0];
    s.y = p[1];
    s.heading = track.heading_at(s0 + 1e-9);
    s.progress = s0;
    return s;
}

namespace {

#pragma pack(push, 1)
struct TrajRecordRaw {
    uint64_t obs_id;
    double x, y, heading, speed, steering, time, progress;
    int32_t action;
    float reward;
    float dt;
};
#pragma pack(pop)

}  // namespace

void save_trajectory(const Trajectory& traj, const std::filesystem::path& file,
                     const std::string& track_name, const std::string& domain_id) {
    std::ofstream f(file, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write trajectory: " + file.string());
    for (const auto& st : traj.steps) {
        TrajRecordRaw r{st.obs_id,       st.state.x,     st.state.y,
                        st.state.heading, st.state.speed, st.state.steering,
                        st.state.time,   st.state.progress,
                        static_cast<int32_t>(st.action), static_cast<float>(st.reward),
                        static_cast<float>(st.dt)};
        f.write(reinterpret_cast<const char*>(&r), sizeof(r));
    }
    f.close();

    nlohmann::json idx{{"count", traj.steps.size()},
                       {"terminal", terminal_name(traj.terminal)},
                       {"lap_time_s", traj.lap_time},
                       {"coverage_m", traj.coverage},
                       {"total_reward", traj.total_reward},
                       {"track", track_name},
                       {"domain", domain_id},
                       {"record_bytes", sizeof(TrajRecordRaw)}};
    std::ofstream jf(file.string() + ".json", std::ios::trunc);
    jf << idx.dump(2) << "\n";
}

Trajectory load_trajectory(const std::filesystem::path& file) {
    std::ifstream jf(file.string() + ".json");
    if (!jf) throw std::runtime_error("missing trajectory index: " + file.string() + ".json");
    nlohmann::json idx = nlohmann::json::parse(jf);

    Trajectory traj;
    const std::string term = idx.at("terminal").get<std::string>();
    traj.terminal = term == "lap_complete" ? Terminal::lap_complete
                   : term == "off_track"   ? Terminal::off_track
                                           : Terminal::timeout;
    traj.lap_time = idx.value("lap_time_s", -1.0);
    traj.coverage = idx.value("coverage_m", 0.0);
    traj.total_reward = idx.value("total_reward", 0.0);

    std::ifstream f(file, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open trajectory: " + file.string());
    const std::size_t count = idx.at("count").get<std::size_t>();
    traj.steps.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        TrajRecordRaw r;
        f.read(reinterpret_cast<char*>(&r), sizeof(r));
        if (!f) throw std::runtime_error("truncated trajectory: " + file.string());
        StepRecord& st = traj.steps[i];
        st.obs_id = r.obs_id;
        st.state = {r.x, r.y, r.heading, r.speed, r.steering, r.time, r.progress};
        st.action = r.action;
        st.reward = r.reward;
        st.dt = r.dt;
    }
    return traj;
}

}  // namespace racer
