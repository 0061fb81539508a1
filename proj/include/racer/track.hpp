#ifndef RACER_TRACK_HPP_
#define RACER_TRACK_HPP_

#include <array>
#include <filesystem>
#include <string>
#include <vector>

namespace racer {

using Vec2 = std::array<double, 2>;

// Closed centerline polyline with uniform half-width. Waypoints are stored
// without the duplicate closing point; segment i runs waypoint i -> i+1 mod N.
class Track {
public:
    struct Projection {
        double s = 0;        // arc-length position of the nearest centerline point
        double dist = 0;     // perpendicular (minimum) distance to the centerline
        int segment = 0;
        Vec2 closest{0, 0};
    };

    static Track from_waypoints(std::string name, std::vector<Vec2> waypoints, double half_width,
                                int start_index);
    static Track load(const std::filesystem::path& file);
    void save(const std::filesystem::path& file) const;

    const std::string& name() const { return name_; }
    double half_width() const { return half_width_; }
    const std::vector<Vec2>& waypoints() const { return waypoints_; }
    int start_index() const { return start_index_; }
    double length() const { return total_len_; }
    double start_s() const { return cum_len_[static_cast<std::size_t>(start_index_)]; }

    Projection project(double x, double y) const;
    Vec2 point_at(double s) const;
    double heading_at(double s) const;

    // Signed shortest arc-length step from s_from to s_to (wrap-aware, in
    // (-L/2, L/2]); positive = forward along the waypoint direction.
    double wrap_delta(double s_from, double s_to) const;

    // Axis-aligned bounds of the centerline.
    void bounds(double& min_x, double& min_y, double& max_x, double& max_y) const;

private:
    Track() = default;
    void finalize();   // cumulative lengths
    void validate() const;

    std::string name_;
    double half_width_ = 0;
    std::vector<Vec2> waypoints_;
    int start_index_ = 0;
    std::vector<double> cum_len_;  // cum_len_[i] = arc length at waypoint i; size N+1
    double total_len_ = 0;
};

}  // namespace racer

#endif  // RACER_TRACK_HPP_
