#include "racer/action_space.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace racer {

DiscreteActionSpace DiscreteActionSpace::build(double max_speed, double max_angle_deg,
                                               int speed_gran, int angle_gran) {
    if (max_speed <= 0) throw std::invalid_argument("action space: max_speed must be positive");
    if (max_angle_deg < 0) throw std::invalid_argument("action space: max_angle must be >= 0");
    if (speed_gran < 1 || angle_gran < 1)
        throw std::invalid_argument("action space: granularities must be >= 1");
    if (angle_gran % 2 == 0)
        throw std::invalid_argument(
            "action space: angle granularity must be odd (straight-ahead action required)");

    DiscreteActionSpace s;
    s.max_speed_ = max_speed;
    s.max_angle_ = max_angle_deg;
    s.speed_gran_ = speed_gran;
    s.angle_gran_ = angle_gran;

    if (angle_gran == 1) {
        s.angles_ = {0.0};
    } else {
        // max_angle * (2k/(g-1) - 1); built mirrored so negation symmetry is exact.
        s.angles_.assign(static_cast<std::size_t>(angle_gran), 0.0);
        const int mid = angle_gran / 2;
        for (int k = mid + 1; k < angle_gran; ++k) {
            const double a = max_angle_deg * (2.0 * k - (angle_gran - 1)) / (angle_gran - 1);
            s.angles_[static_cast<std::size_t>(k)] = a;
            s.angles_[static_cast<std::size_t>(angle_gran - 1 - k)] = -a;
        }
    }
    for (int i = 1; i <= speed_gran; ++i) s.speeds_.push_back(max_speed * i / speed_gran);
    s.enumerate();
    return s;
}

DiscreteActionSpace DiscreteActionSpace::with_speeds(const std::vector<double>& speeds) const {
    if (speeds.empty()) throw std::invalid_argument("action space: speed override is empty");
    for (double v : speeds)
        if (v <= 0 || v > max_speed_)
            throw std::invalid_argument("action space: override speed outside (0, max_speed]");
    DiscreteActionSpace s = *this;
    s.speeds_ = speeds;
    std::sort(s.speeds_.begin(), s.speeds_.end());
    for (std::size_t i = 1; i < s.speeds_.size(); ++i)
        if (s.speeds_[i] == s.speeds_[i - 1])
            throw std::invalid_argument("action space: duplicate override speed");
    s.speed_gran_ = static_cast<int>(s.speeds_.size());
    s.enumerate();
    return s;
}

void DiscreteActionSpace::enumerate() {
    actions_.clear();
    for (double a : angles_)
        for (double v : speeds_) actions_.push_back({a, v});
}

int DiscreteActionSpace::nearest(double steering_deg, double speed_mps) const {
    int best = 0;
    double best_cost = std::numeric_limits<double>::max();
    const double angle_scale = max_angle_ > 0 ? max_angle_ : 1.0;
    for (int i = 0; i < size(); ++i) {
        const auto& a = actions_[static_cast<std::size_t>(i)];
        const double da = (a.steering_deg - steering_deg) / angle_scale;
        const double dv = (a.speed_mps - speed_mps) / max_speed_;
        const double cost = da * da + dv * dv;
        if (cost < best_cost) {
            best_cost = cost;
            best = i;
        }
    }
    return best;
}

}  // namespace racer
