#ifndef RACER_ACTION_SPACE_HPP_
#define RACER_ACTION_SPACE_HPP_

#include <optional>
#include <vector>

namespace racer {

struct DiscreteAction {
    double steering_deg = 0;  // positive = left
    double speed_mps = 0;
};

// DeepRacer-style discrete action set generated from (max_speed, max_angle,
// speed granularity, angle granularity). Ordering is angle-major ascending,
// speed ascending within an angle; immutable once built.
class DiscreteActionSpace {
public:
    static DiscreteActionSpace build(double max_speed, double max_angle_deg, int speed_gran,
                                     int angle_gran);

    // Replaces the generated speed set with an explicit list (the published
    // experiment uses {3, 5, 8} which even spacing from (8, 3) cannot produce).
    DiscreteActionSpace with_speeds(const std::vector<double>& speeds) const;

    int size() const { return static_cast<int>(actions_.size()); }
    const DiscreteAction& operator[](int i) const { return actions_[static_cast<std::size_t>(i)]; }
    const std::vector<DiscreteAction>& actions() const { return actions_; }
    const std::vector<double>& angles() const { return angles_; }
    const std::vector<double>& speeds() const { return speeds_; }

    double max_speed() const { return max_speed_; }
    double max_angle_deg() const { return max_angle_; }
    int speed_granularity() const { return speed_gran_; }
    int angle_granularity() const { return angle_gran_; }

    // Index of the action closest to (angle, speed); used by scripted agents.
    int nearest(double steering_deg, double speed_mps) const;

private:
    DiscreteActionSpace() = default;
    void enumerate();

    double max_speed_ = 0, max_angle_ = 0;
    int speed_gran_ = 0, angle_gran_ = 0;
    std::vector<double> angles_, speeds_;
    std::vector<DiscreteAction> actions_;
};

}  // namespace racer

#endif  // RACER_ACTION_SPACE_HPP_
