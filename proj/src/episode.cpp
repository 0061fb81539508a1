#include "racer/episode.hpp"

#include <cmath>

namespace racer {

namespace {
constexpr double kPi = 3.14159265358979323846;

double wrap_angle(double a) {
    while (a > kPi) a -= 2 * kPi;
    while (a < -kPi) a += 2 * kPi;
    return a;
}
}  // namespace

int PurePursuitAgent::act(const Tensor*, const CarState& state, Rng&) {
    const auto proj = track_->project(state.x, state.y);
    const double la = lookahead_ * (0.6 + 0.22 * state.speed);
    const Vec2 target = track_->point_at(proj.s + la);
    const double alpha =
        wrap_angle(std::atan2(target[1] - state.y, target[0] - state.x) - state.heading);
    const double steer = std::atan2(2.0 * wheelbase_ * std::sin(alpha), la);
    const double steer_deg = steer * 180.0 / kPi;

    // Commanded speed: slow when a corner sits within braking distance, or
    // while off the racing line recovering.
    const double horizon = 0.5 + 0.55 * state.speed;
    double turn = 0;
    const double h0 = track_->heading_at(proj.s + 0.1);
    for (double ahead = 0.4; ahead <= horizon; ahead += 0.3)
        turn = std::max(turn,
                        std::fabs(wrap_angle(track_->heading_at(proj.s + ahead) - h0)));
    const auto& speeds = actions_->speeds();
    double want = speeds.back();
    if (turn * corner_slowdown_ > 0.35 || proj.dist > 0.6 * track_->half_width())
        want = speeds.front();
    else if (turn * corner_slowdown_ > 0.15 && speeds.size() > 1)
        want = speeds[speeds.size() / 2];
    return actions_->nearest(steer_deg, want);
}

Trajectory run_episode(Agent& agent, const DiscreteActionSpace& actions, const Track& track,
                       const SceneRenderer& renderer, const VisualDomain& domain,
                       const SimParams& sim, Rng& rng, EpisodeSinks sinks) {
    Trajectory traj;
    CarState state = start_state(track);
    const double L = track.length();
    const double start_s = track.start_s();

    const bool need_render = agent.wants_pixels() || sinks.raw_frames != nullptr ||
                             sinks.model_inputs != nullptr;
    auto [in_h, in_w] = agent.input_hw();
    if (in_h <= 0 || in_w <= 0) {
        in_h = renderer.params().height;
        in_w = renderer.params().width;
    }

    uint64_t frame = 0;
    for (;;) {
        const double dt = (1.0 / sim.fps) * (1.0 + rng.uniform(-sim.jitter, sim.jitter));

        Tensor input;
        const Tensor* input_ptr = nullptr;
        if (need_render) {
            Observation obs = renderer.render(state, domain);
            obs.frame_id = frame;
            if (agent.wants_pixels() || sinks.model_inputs != nullptr) {
                input = to_model_input(obs, in_h, in_w);
                input_ptr = &input;
            }
            if (sinks.model_inputs) sinks.model_inputs->push_back(input);
            if (sinks.raw_frames) sinks.raw_frames->push_back(std::move(obs));
        }

        const int action = agent.act(input_ptr, state, rng);
        const CarState prev = state;
        state = step_dynamics(state, actions[action], dt, sim.wheelbase, sim.speed_tau);
        state.progress = track.project(state.x, state.y).s;

        const double delta = track.wrap_delta(prev.progress, state.progress);
        traj.coverage += delta;

        const bool off = is_off_track(track, state);
        bool lap = false;
        if (!off) {
            double rel = prev.progress - start_s;
            while (rel < 0) rel += L;
            while (rel >= L) rel -= L;
            lap = (rel + delta >= L) && (traj.coverage >= sim.lap_min_coverage * L);
        }

        const double r = reward(track, prev, state, off, lap, sim);
        traj.steps.push_back({frame, prev, action, r, dt});
        traj.total_reward += r;
        ++frame;

        if (off) {
            traj.terminal = Terminal::off_track;
            break;
        }
        if (lap) {
            traj.terminal = Terminal::lap_complete;
            traj.lap_time = state.time;
            break;
        }
        if (state.time >= sim.timeout) {
            traj.terminal = Terminal::timeout;
            break;
        }
    }
    return traj;
}

}  // namespace racer
