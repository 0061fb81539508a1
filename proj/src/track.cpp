#include "racer/track.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace racer {

namespace {

using njson = nlohmann::json;

double seg_len(const Vec2& a, const Vec2& b) { return std::hypot(b[0] - a[0], b[1] - a[1]); }

// Proper intersection test for open segments (shared endpoints don't count).
bool segments_cross(const Vec2& p1, const Vec2& p2, const Vec2& q1, const Vec2& q2) {
    auto orient = [](const Vec2& a, const Vec2& b, const Vec2& c) {
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
    };
    const double o1 = orient(p1, p2, q1);
    const double o2 = orient(p1, p2, q2);
    const double o3 = orient(q1, q2, p1);
    const double o4 = orient(q1, q2, p2);
    return ((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0)) && o1 != 0 && o2 != 0 && o3 != 0 &&
           o4 != 0;
}

bool polyline_self_intersects(const std::vector<Vec2>& pts) {
    const std::size_t n = pts.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 2; j < n; ++j) {
            if (i == 0 && j == n - 1) continue;  // closing neighbours
            if (segments_cross(pts[i], pts[(i + 1) % n], pts[j], pts[(j + 1) % n])) return true;
        }
    }
    return false;
}

double point_segment_dist(const Vec2& p, const Vec2& a, const Vec2& b) {
    const double dx = b[0] - a[0], dy = b[1] - a[1];
    const double len2 = dx * dx + dy * dy;
    double t = len2 > 0 ? ((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return std::hypot(p[0] - (a[0] + t * dx), p[1] - (a[1] + t * dy));
}

double segment_segment_dist(const Vec2& p1, const Vec2& p2, const Vec2& q1, const Vec2& q2) {
    if (segments_cross(p1, p2, q1, q2)) return 0.0;
    return std::min(std::min(point_segment_dist(p1, q1, q2), point_segment_dist(p2, q1, q2)),
                    std::min(point_segment_dist(q1, p1, p2), point_segment_dist(q2, p1, p2)));
}

}  // namespace

Track Track::from_waypoints(std::string name, std::vector<Vec2> waypoints, double half_width,
                            int start_index) {
    Track t;
    t.name_ = std::move(name);
    t.waypoints_ = std::move(waypoints);
    // Tolerate an explicitly closed polyline in input data.
    if (t.waypoints_.size() >= 2 && t.waypoints_.front() == t.waypoints_.back())
        t.waypoints_.pop_back();
    t.half_width_ = half_width;
    t.start_index_ = start_index;
    t.finalize();
    t.validate();
    return t;
}

Track Track::load(const std::filesystem::path& file) {
    std::ifstream f(file);
    if (!f) throw std::runtime_error("track file not found: " + file.string());
    njson j = njson::parse(f);
    std::vector<Vec2> wps;
    for (const auto& p : j.at("waypoints"))
        wps.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    return from_waypoints(j.value("name", file.stem().string()), std::move(wps),
                          j.at("half_width_m").get<double>(), j.value("start_index", 0));
}

void Track::save(const std::filesystem::path& file) const {
    njson wps = njson::array();
    for (const auto& p : waypoints_) wps.push_back({p[0], p[1]});
    njson j{{"name", name_},
            {"half_width_m", half_width_},
            {"waypoints", wps},
            {"start_index", start_index_}};
    std::ofstream f(file, std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write track file: " + file.string());
    f << j.dump(2) << "\n";
}

void Track::finalize() {
    const std::size_t n = waypoints_.size();
    cum_len_.assign(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        cum_len_[i + 1] = cum_len_[i] + seg_len(waypoints_[i], waypoints_[(i + 1) % n]);
    total_len_ = cum_len_[n];
}

void Track::validate() const {
    if (waypoints_.size() < 8) throw std::runtime_error("track: needs at least 8 waypoints");
    if (half_width_ <= 0) throw std::runtime_error("track: half width must be positive");
    if (start_index_ < 0 || start_index_ >= static_cast<int>(waypoints_.size()))
        throw std::runtime_error("track: start index out of range");
    if (total_len_ <= 0) throw std::runtime_error("track: degenerate centerline");
    for (std::size_t i = 0; i + 1 < cum_len_.size(); ++i)
        if (cum_len_[i + 1] - cum_len_[i] < 1e-9)
            throw std::runtime_error("track: duplicate adjacent waypoints");

    // The widened band must not fold onto itself: offset both edges along
    // vertex normals (miter) and check for self-intersection.
    const std::size_t n = waypoints_.size();
    for (double side : {+1.0, -1.0}) {
        std::vector<Vec2> edge(n);
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2& prev = waypoints_[(i + n - 1) % n];
            const Vec2& cur = waypoints_[i];
            const Vec2& next = waypoints_[(i + 1) % n];
            const double l1 = seg_len(prev, cur), l2 = seg_len(cur, next);
            // normals of adjacent segments (left-hand normal of direction)
            const double n1x = -(cur[1] - prev[1]) / l1, n1y = (cur[0] - prev[0]) / l1;
            const double n2x = -(next[1] - cur[1]) / l2, n2y = (next[0] - cur[0]) / l2;
            double mx = n1x + n2x, my = n1y + n2y;
            const double m = std::hypot(mx, my);
            if (m < 1e-9) throw std::runtime_error("track: hairpin fold at waypoint");
            mx /= m;
            my /= m;
            // miter length so the offset edge stays half_width from both segments
            const double cos_half = mx * n2x + my * n2y;
            const double miter = half_width_ / std::max(cos_half, 0.1);
            edge[i] = {cur[0] + side * mx * miter, cur[1] + side * my * miter};
        }
        if (polyline_self_intersects(edge))
            throw std::runtime_error("track: widened band self-intersects");
    }
    // Far-field clearance: distant parts of the loop must not bring their
    // bands into overlap.
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 3; j < n; ++j) {
            const std::size_t ring = std::min(j - i, n - (j - i));
            if (ring < 3) continue;
            if (segment_segment_dist(waypoints_[i], waypoints_[(i + 1) % n], waypoints_[j],
                                     waypoints_[(j + 1) % n]) < 2 * half_width_)
                throw std::runtime_error("track: widened band self-intersects");
        }
    }
}

Track::Projection Track::project(double x, double y) const {
    const std::size_t n = waypoints_.size();
    Projection best;
    best.dist = std::numeric_limits<double>::max();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = waypoints_[i];
        const Vec2& b = waypoints_[(i + 1) % n];
        const double abx = b[0] - a[0], aby = b[1] - a[1];
        const double len2 = abx * abx + aby * aby;
        double t = ((x - a[0]) * abx + (y - a[1]) * aby) / len2;
        t = std::clamp(t, 0.0, 1.0);
        const double cx = a[0] + t * abx, cy = a[1] + t * aby;
        const double d = std::hypot(x - cx, y - cy);
        if (d < best.dist) {
            best.dist = d;
            best.segment = static_cast<int>(i);
            best.closest = {cx, cy};
            best.s = cum_len_[i] + t * (cum_len_[i + 1] - cum_len_[i]);
        }
    }
    if (best.s >= total_len_) best.s -= total_len_;
    return best;
}

Vec2 Track::point_at(double s) const {
    s = std::fmod(s, total_len_);
    if (s < 0) s += total_len_;
    const std::size_t n = waypoints_.size();
    // cum_len_ is sorted; linear scan is fine at these sizes
    std::size_t i = 0;
    while (i + 1 < cum_len_.size() && cum_len_[i + 1] < s) ++i;
    const double t = (s - cum_len_[i]) / (cum_len_[i + 1] - cum_len_[i]);
    const Vec2& a = waypoints_[i % n];
    const Vec2& b = waypoints_[(i + 1) % n];
    return {a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])};
}

double Track::heading_at(double s) const {
    s = std::fmod(s, total_len_);
    if (s < 0) s += total_len_;
    const std::size_t n = waypoints_.size();
    std::size_t i = 0;
    while (i + 1 < cum_len_.size() && cum_len_[i + 1] < s) ++i;
    const Vec2& a = waypoints_[i % n];
    const Vec2& b = waypoints_[(i + 1) % n];
    return std::atan2(b[1] - a[1], b[0] - a[0]);
}

double Track::wrap_delta(double s_from, double s_to) const {
    double d = s_to - s_from;
    while (d > total_len_ / 2) d -= total_len_;
    while (d <= -total_len_ / 2) d += total_len_;
    return d;
}

void Track::bounds(double& min_x, double& min_y, double& max_x, double& max_y) const {
    min_x = min_y = std::numeric_limits<double>::max();
    max_x = max_y = std::numeric_limits<double>::lowest();
    for (const auto& p : waypoints_) {
        min_x = std::min(min_x, p[0]);
        min_y = std::min(min_y, p[1]);
        max_x = std::max(max_x, p[0]);
        max_y = std::max(max_y, p[1]);
    }
}

}  // namespace racer
