#include "racer/render.hpp"

#include <algorithm>
#include <cmath>

#include "racer/rng.hpp"

namespace racer {

namespace {

constexpr double kPi = 3.14159265358979323846;

double hash01(uint64_t a, uint64_t b = 0, uint64_t c = 0, uint64_t d = 0) {
    return static_cast<double>(hash_mix(a, b, c, d) >> 11) * 0x1.0p-53;
}

uint8_t clamp_u8(double v) { return static_cast<uint8_t>(std::clamp(v, 0.0, 255.0)); }

Rgb lerp_rgb(Rgb a, Rgb b, double t) {
    return {clamp_u8(a.r + (b.r - a.r) * t), clamp_u8(a.g + (b.g - a.g) * t),
            clamp_u8(a.b + (b.b - a.b) * t)};
}

int64_t cell_of(double v, double size) { return static_cast<int64_t>(std::floor(v / size)); }

// Grid-cell key made non-negative for hashing.
uint64_t ckey(int64_t c) { return static_cast<uint64_t>(c + (1ll << 32)); }

}  // namespace

VisualDomain VisualDomain::train_preset() { return VisualDomain{}; }

VisualDomain VisualDomain::test_preset() {
    VisualDomain d;
    d.id = "test";
    // Background replaced by a cluttered photo-wall analog; lighting brighter
    // with a directional component; track surface tone shifted.
    d.background_seed = 9120;
    d.clutter = 1.0;
    d.floor_color = {126, 130, 140};
    d.floor_noise = 11.0;
    d.floor_seed = 55;
    d.track_color = {82, 72, 92};
    d.track_noise = 8.0;
    d.line_color = {250, 246, 232};
    d.center_color = {205, 168, 82};
    d.light_gain = 1.3;
    d.light_gradient = 0.20;
    d.light_dir_deg = 90.0;
    d.noise_floor = 5.0;
    return d;
}

namespace {

void rgb_to_json(nlohmann::json& j, const char* key, Rgb v) {
    j[key] = {v.r, v.g, v.b};
}

Rgb rgb_from_json(const nlohmann::json& j, const char* key, Rgb fallback) {
    if (!j.contains(key)) return fallback;
    const auto& a = j.at(key);
    return {a.at(0).get<uint8_t>(), a.at(1).get<uint8_t>(), a.at(2).get<uint8_t>()};
}

}  // namespace

void to_json(nlohmann::json& j, const VisualDomain& d) {
    j = nlohmann::json{{"id", d.id},
                       {"background_seed", d.background_seed},
                       {"clutter", d.clutter},
                       {"skyline_min", d.skyline_min},
                       {"skyline_max", d.skyline_max},
                       {"floor_noise", d.floor_noise},
                       {"floor_seed", d.floor_seed},
                       {"track_noise", d.track_noise},
                       {"light_gain", d.light_gain},
                       {"light_gradient", d.light_gradient},
                       {"light_dir_deg", d.light_dir_deg},
                       {"noise_floor", d.noise_floor}};
    rgb_to_json(j, "sky_top", d.sky_top);
    rgb_to_json(j, "sky_bottom", d.sky_bottom);
    rgb_to_json(j, "building_a", d.building_a);
    rgb_to_json(j, "building_b", d.building_b);
    rgb_to_json(j, "wall_a", d.wall_a);
    rgb_to_json(j, "wall_b", d.wall_b);
    rgb_to_json(j, "wall_c", d.wall_c);
    rgb_to_json(j, "wall_d", d.wall_d);
    rgb_to_json(j, "floor_color", d.floor_color);
    rgb_to_json(j, "track_color", d.track_color);
    rgb_to_json(j, "line_color", d.line_color);
    rgb_to_json(j, "center_color", d.center_color);
}

void from_json(const nlohmann::json& j, VisualDomain& d) {
    VisualDomain def;
    d.id = j.value("id", def.id);
    d.background_seed = j.value("background_seed", def.background_seed);
    d.clutter = j.value("clutter", def.clutter);
    d.skyline_min = j.value("skyline_min", def.skyline_min);
    d.skyline_max = j.value("skyline_max", def.skyline_max);
    d.floor_noise = j.value("floor_noise", def.floor_noise);
    d.floor_seed = j.value("floor_seed", def.floor_seed);
    d.track_noise = j.value("track_noise", def.track_noise);
    d.light_gain = j.value("light_gain", def.light_gain);
    d.light_gradient = j.value("light_gradient", def.light_gradient);
    d.light_dir_deg = j.value("light_dir_deg", def.light_dir_deg);
    d.noise_floor = j.value("noise_floor", def.noise_floor);
    d.sky_top = rgb_from_json(j, "sky_top", def.sky_top);
    d.sky_bottom = rgb_from_json(j, "sky_bottom", def.sky_bottom);
    d.building_a = rgb_from_json(j, "building_a", def.building_a);
    d.building_b = rgb_from_json(j, "building_b", def.building_b);
    d.wall_a = rgb_from_json(j, "wall_a", def.wall_a);
    d.wall_b = rgb_from_json(j, "wall_b", def.wall_b);
    d.wall_c = rgb_from_json(j, "wall_c", def.wall_c);
    d.wall_d = rgb_from_json(j, "wall_d", def.wall_d);
    d.floor_color = rgb_from_json(j, "floor_color", def.floor_color);
    d.track_color = rgb_from_json(j, "track_color", def.track_color);
    d.line_color = rgb_from_json(j, "line_color", def.line_color);
    d.center_color = rgb_from_json(j, "center_color", def.center_color);
}

void to_json(nlohmann::json& j, const RenderParams& p) {
    j = nlohmann::json{{"height", p.height},
                       {"width", p.width},
                       {"cam_height", p.cam_height},
                       {"cam_pitch_deg", p.cam_pitch_deg},
                       {"hfov_deg", p.hfov_deg},
                       {"line_width", p.line_width},
                       {"center_width", p.center_width}};
}

void from_json(const nlohmann::json& j, RenderParams& p) {
    RenderParams def;
    p.height = j.value("height", def.height);
    p.width = j.value("width", def.width);
    p.cam_height = j.value("cam_height", def.cam_height);
    p.cam_pitch_deg = j.value("cam_pitch_deg", def.cam_pitch_deg);
    p.hfov_deg = j.value("hfov_deg", def.hfov_deg);
    p.line_width = j.value("line_width", def.line_width);
    p.center_width = j.value("center_width", def.center_width);
}

SceneRenderer::SceneRenderer(const Track& track, RenderParams params)
    : track_(&track), params_(params) {
    const int h = params_.height, w = params_.width;
    const double tx = std::tan(params_.hfov_deg / 2 * kPi / 180.0);
    const double ty = tx * h / w;
    const double pitch = params_.cam_pitch_deg * kPi / 180.0;
    const double cp = std::cos(pitch), sp = std::sin(pitch);

    rays_.resize(static_cast<std::size_t>(h) * w);
    for (int r = 0; r < h; ++r) {
        const double ndc_y = 1.0 - 2.0 * (r + 0.5) / h;
        for (int c = 0; c < w; ++c) {
            const double ndc_x = 2.0 * (c + 0.5) / w - 1.0;
            const double du = ndc_y * ty;     // up in unpitched camera frame
            const double dr = ndc_x * tx;     // right
            Ray& ray = rays_[static_cast<std::size_t>(r) * w + c];
            ray.fwd = cp - du * sp;
            ray.right = dr;
            ray.up = sp + du * cp;
        }
    }

    // Sampled distance field over the track bounding box.
    double x0, y0, x1, y1;
    track.bounds(x0, y0, x1, y1);
    const double margin = track.half_width() + 2.5;
    grid_x0_ = x0 - margin;
    grid_y0_ = y0 - margin;
    grid_w_ = static_cast<int>(std::ceil((x1 - x0 + 2 * margin) / cell_)) + 1;
    grid_h_ = static_cast<int>(std::ceil((y1 - y0 + 2 * margin) / cell_)) + 1;
    grid_dist_.resize(static_cast<std::size_t>(grid_w_) * grid_h_);
    for (int gy = 0; gy < grid_h_; ++gy)
        for (int gx = 0; gx < grid_w_; ++gx) {
            const double px = grid_x0_ + gx * cell_;
            const double py = grid_y0_ + gy * cell_;
            grid_dist_[static_cast<std::size_t>(gy) * grid_w_ + gx] =
                static_cast<float>(track.project(px, py).dist);
        }
}

double SceneRenderer::centerline_dist(double x, double y) const {
    const double fx = (x - grid_x0_) / cell_;
    const double fy = (y - grid_y0_) / cell_;
    if (fx < 0 || fy < 0 || fx >= grid_w_ - 1 || fy >= grid_h_ - 1) return 1e9;
    const int ix = static_cast<int>(fx), iy = static_cast<int>(fy);
    const double tx = fx - ix, ty = fy - iy;
    const float* g = grid_dist_.data();
    const std::size_t i00 = static_cast<std::size_t>(iy) * grid_w_ + ix;
    const double d00 = g[i00], d01 = g[i00 + 1];
    const double d10 = g[i00 + grid_w_], d11 = g[i00 + grid_w_ + 1];
    return (d00 * (1 - tx) + d01 * tx) * (1 - ty) + (d10 * (1 - tx) + d11 * tx) * ty;
}

SurfaceClass SceneRenderer::classify_ground(double x, double y) const {
    const double d = centerline_dist(x, y);
    const double hw = track_->half_width();
    if (std::fabs(d - hw) <= params_.line_width / 2) return SurfaceClass::line;
    if (d <= params_.center_width / 2) return SurfaceClass::center;
    if (d <= hw) return SurfaceClass::track;
    return SurfaceClass::floor;
}

Observation SceneRenderer::render(const CarState& state, const VisualDomain& dom) const {
    const int h = params_.height, w = params_.width;
    Observation obs;
    obs.width = w;
    obs.height = h;
    obs.rgb.resize(static_cast<std::size_t>(h) * w * 3);
    obs.domain = dom.id;
    obs.progress = static_cast<float>(state.progress);

    const double ch = std::cos(state.heading), sh = std::sin(state.heading);
    const double light_dir = dom.light_dir_deg * kPi / 180.0;
    const double lx = std::cos(light_dir), ly = std::sin(light_dir);

    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            const Ray& ray = rays_[static_cast<std::size_t>(r) * w + c];
            // world direction: right axis of heading th is (sin th, -cos th)
            const double dx = ray.fwd * ch + ray.right * sh;
            const double dy = ray.fwd * sh - ray.right * ch;

            Rgb col;
            if (ray.up >= -1e-6) {
                // background band
                const double az = std::atan2(dy, dx);
                const double elev = std::atan2(ray.up, std::hypot(dx, dy));
                if (dom.clutter < 0.5) {
                    // open sky with a building silhouette
                    const int64_t blk = cell_of(az, 0.07);
                    const double hmin = dom.skyline_min * 0.5, hmax = dom.skyline_max * 0.5;
                    const double sky_h =
                        hmin + (hmax - hmin) * hash01(dom.background_seed, ckey(blk), 1);
                    if (elev < sky_h) {
                        col = lerp_rgb(dom.building_a, dom.building_b,
                                       hash01(dom.background_seed, ckey(blk), 2));
                        const int64_t eb = cell_of(elev, 0.045);
                        if (hash01(dom.background_seed, ckey(blk), ckey(eb), 5) > 0.86) {
                            col.r = clamp_u8(col.r + 55.0);
                            col.g = clamp_u8(col.g + 55.0);
                            col.b = clamp_u8(col.b + 45.0);
                        }
                    } else {
                        col = lerp_rgb(dom.sky_bottom, dom.sky_top, std::min(1.0, elev / 0.7));
                    }
                } else {
                    // photo-wall clutter: two block scales over a 4-colour palette
                    const int64_t bx = cell_of(az, 0.11), by = cell_of(elev, 0.13);
                    const double pick = hash01(dom.background_seed, ckey(bx), ckey(by), 3);
                    const Rgb base = pick < 0.25   ? dom.wall_a
                                     : pick < 0.5  ? dom.wall_b
                                     : pick < 0.75 ? dom.wall_c
                                                   : dom.wall_d;
                    const int64_t sx = cell_of(az, 0.028), sy = cell_of(elev, 0.034);
                    const double amp =
                        (hash01(dom.background_seed, ckey(sx), ckey(sy), 4) - 0.5) * 90.0;
                    col = {clamp_u8(base.r + amp), clamp_u8(base.g + amp),
                           clamp_u8(base.b + amp)};
                }
            } else {
                const double t = params_.cam_height / -ray.up;
                const double px = state.x + t * dx;
                const double py = state.y + t * dy;
                switch (classify_ground(px, py)) {
                    case SurfaceClass::line:
                        col = dom.line_color;
                        break;
                    case SurfaceClass::center:
                        col = dom.center_color;
                        break;
                    case SurfaceClass::track: {
                        const double n =
                            (hash01(dom.floor_seed, ckey(cell_of(px, 0.05)),
                                    ckey(cell_of(py, 0.05)), 9) -
                             0.5) *
                            2 * dom.track_noise;
                        col = {clamp_u8(dom.track_color.r + n), clamp_u8(dom.track_color.g + n),
                               clamp_u8(dom.track_color.b + n)};
                        break;
                    }
                    default: {
                        const double n =
                            (hash01(dom.floor_seed, ckey(cell_of(px, 0.08)),
                                    ckey(cell_of(py, 0.08)), 2) -
                             0.5) *
                            2 * dom.floor_noise;
                        col = {clamp_u8(dom.floor_color.r + n), clamp_u8(dom.floor_color.g + n),
                               clamp_u8(dom.floor_color.b + n)};
                        break;
                    }
                }
            }

            // lighting: global gain with a directional component
            double gain = dom.light_gain;
            if (dom.light_gradient != 0) {
                const double inv = 1.0 / std::hypot(dx, dy);
                gain *= 1.0 + dom.light_gradient * (dx * inv * lx + dy * inv * ly);
            }
            const double noise =
                (hash01(dom.background_seed ^ 0xabcdefull, static_cast<uint64_t>(r),
                        static_cast<uint64_t>(c)) -
                 0.5) *
                2 * dom.noise_floor;
            uint8_t* px_out = obs.pixel(r, c);
            px_out[0] = clamp_u8(col.r * gain + noise);
            px_out[1] = clamp_u8(col.g * gain + noise);
            px_out[2] = clamp_u8(col.b * gain + noise);
        }
    }
    return obs;
}

std::vector<uint8_t> SceneRenderer::class_map(const CarState& state) const {
    const int h = params_.height, w = params_.width;
    std::vector<uint8_t> out(static_cast<std::size_t>(h) * w);
    const double ch = std::cos(state.heading), sh = std::sin(state.heading);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            const Ray& ray = rays_[static_cast<std::size_t>(r) * w + c];
            SurfaceClass cls = SurfaceClass::background;
            if (ray.up < -1e-6) {
                const double dx = ray.fwd * ch + ray.right * sh;
                const double dy = ray.fwd * sh - ray.right * ch;
                const double t = params_.cam_height / -ray.up;
                cls = classify_ground(state.x + t * dx, state.y + t * dy);
            }
            out[static_cast<std::size_t>(r) * w + c] = static_cast<uint8_t>(cls);
        }
    }
    return out;
}

Tensor to_model_input(const Observation& obs, int target_h, int target_w) {
    const int h = obs.height, w = obs.width;
    std::vector<float> luma(static_cast<std::size_t>(h) * w);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            const uint8_t* p = obs.pixel(r, c);
            luma[static_cast<std::size_t>(r) * w + c] =
                0.299f * p[0] + 0.587f * p[1] + 0.114f * p[2];
        }

    Tensor out({target_h, target_w});
    if (target_h == h && target_w == w) {
        for (std::size_t i = 0; i < luma.size(); ++i) out.data[i] = luma[i] / 255.0f;
        return out;
    }
    // bilinear resize
    const double sy = static_cast<double>(h) / target_h;
    const double sx = static_cast<double>(w) / target_w;
    for (int r = 0; r < target_h; ++r) {
        const double fy = std::clamp((r + 0.5) * sy - 0.5, 0.0, h - 1.0);
        const int y0 = static_cast<int>(fy);
        const int y1 = std::min(y0 + 1, h - 1);
        const double ty = fy - y0;
        for (int c = 0; c < target_w; ++c) {
            const double fx = std::clamp((c + 0.5) * sx - 0.5, 0.0, w - 1.0);
            const int x0 = static_cast<int>(fx);
            const int x1 = std::min(x0 + 1, w - 1);
            const double tx = fx - x0;
            const double v =
                (luma[static_cast<std::size_t>(y0) * w + x0] * (1 - tx) +
                 luma[static_cast<std::size_t>(y0) * w + x1] * tx) *
                    (1 - ty) +
                (luma[static_cast<std::size_t>(y1) * w + x0] * (1 - tx) +
                 luma[static_cast<std::size_t>(y1) * w + x1] * tx) *
                    ty;
            out.data[static_cast<std::size_t>(r) * target_w + c] =
                static_cast<float>(v / 255.0);
        }
    }
    return out;
}

}  // namespace racer
