#ifndef RACER_SIM_HPP_
#define RACER_SIM_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "racer/action_space.hpp"
#include "racer/track.hpp"

namespace racer {

struct CarState {
    double x = 0, y = 0;      // m
    double heading = 0;       // rad, CCW from +x, unwrapped
    double speed = 0;         // m/s, >= 0
    double steering = 0;      // rad, current commanded steer
    double time = 0;          // s since episode start
    double progress = 0;      // arc-length position on the centerline, [0, L)
};

struct SimParams {
    double wheelbase = 0.16;      // m (1/18-scale car)
    double speed_tau = 0.15;      // s, first-order speed response
    double fps = 15.0;
    double jitter = 0.05;         // dt = (1/fps) * (1 + U[-jitter, jitter])
    double timeout = 30.0;        // s simulated time
    double step_cost = 0.01;
    double crash_penalty = 10.0;
    double lap_bonus = 10.0;
    double lap_min_coverage = 0.95;  // fraction of L that must be covered
};

// Kinematic bicycle step: the speed relaxes first-order toward the command,
// then the pose advances along the exact circular arc of the commanded steer
// (straight line at zero steer). Progress is not touched here; episode code
// re-projects onto the centerline.
CarState step_dynamics(const CarState& state, const DiscreteAction& action, double dt,
                       double wheelbase, double speed_tau = 0.15);

// True iff the perpendicular distance to the centerline exceeds the half
// width. The boundary itself counts as on-track.
bool is_off_track(const Track& track, const CarState& state);

// Wrap-aware centerline progress delta minus a per-step cost; a flat crash
// penalty replaces everything on an off-track step; a terminal bonus is added
// on lap completion.
double reward(const Track& track, const CarState& prev, const CarState& curr, bool off_track,
              bool lap_complete, const SimParams& params);

enum class Terminal { lap_complete, off_track, timeout };

const char* terminal_name(Terminal t);

struct StepRecord {
    uint64_t obs_id = 0;
    CarState state;   // state the observation was rendered from
    int action = -1;
    double reward = 0;
    double dt = 0;    // actual (jittered) frame interval
};

struct Trajectory {
    std::vector<StepRecord> steps;
    Terminal terminal = Terminal::timeout;
    double lap_time = -1;   // accumulated dt at completion; < 0 unless lap_complete
    double coverage = 0;    // signed arc length covered
    double total_reward = 0;
};

// Binary step records plus a JSON index describing the episode.
void save_trajectory(const Trajectory& traj, const std::filesystem::path& file,
                     const std::string& track_name, const std::string& domain_id);
Trajectory load_trajectory(const std::filesystem::path& file);

// Start pose: on the centerline at the start waypoint, facing along it.
CarState start_state(const Track& track);

}  // namespace racer

#endif  // RACER_SIM_HPP_
