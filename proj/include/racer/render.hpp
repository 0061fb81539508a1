#ifndef RACER_RENDER_HPP_
#define RACER_RENDER_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "racer/sim.hpp"
#include "racer/tensor.hpp"
#include "racer/track.hpp"

namespace racer {

struct Rgb {
    uint8_t r = 0, g = 0, b = 0;
};

// Rendering style of one environment. Train and test presets share every
// geometric property and differ only in background, lighting and surface
// texture.
struct VisualDomain {
    std::string id = "train";

    // background band (above the horizon)
    uint64_t background_seed = 101;
    double clutter = 0.0;        // 0 = open sky + skyline, 1 = photo-wall clutter
    Rgb sky_top{148, 186, 222};
    Rgb sky_bottom{216, 224, 230};
    Rgb building_a{96, 102, 112};
    Rgb building_b{58, 62, 72};
    double skyline_min = 0.20;   // silhouette height range, fraction of the band
    double skyline_max = 0.62;
    Rgb wall_a{170, 144, 110};   // clutter palette (photo-wall style)
    Rgb wall_b{96, 88, 76};
    Rgb wall_c{128, 140, 120};
    Rgb wall_d{60, 56, 64};

    // ground surfaces
    Rgb floor_color{152, 144, 132};
    double floor_noise = 6.0;
    uint64_t floor_seed = 7;
    Rgb track_color{56, 58, 62};
    double track_noise = 4.0;
    Rgb line_color{245, 245, 245};
    Rgb center_color{198, 178, 64};

    // lighting
    double light_gain = 1.0;
    double light_gradient = 0.0;   // directional gain modulation strength
    double light_dir_deg = 0.0;    // world direction of the bright side
    double noise_floor = 2.0;      // per-pixel deterministic sensor noise

    static VisualDomain train_preset();
    static VisualDomain test_preset();
};

void to_json(nlohmann::json& j, const VisualDomain& d);
void from_json(const nlohmann::json& j, VisualDomain& d);

struct RenderParams {
    int height = 64;
    int width = 84;
    double cam_height = 0.11;     // m above ground
    double cam_pitch_deg = -15.0; // negative = looking down
    double hfov_deg = 120.0;
    double line_width = 0.06;     // painted boundary line, m (full width)
    double center_width = 0.03;   // painted centerline stripe, m (full width)
};

void to_json(nlohmann::json& j, const RenderParams& p);
void from_json(const nlohmann::json& j, RenderParams& p);

struct Observation {
    int width = 0, height = 0;          // 3 channels, RGB interleaved
    std::vector<uint8_t> rgb;
    uint64_t frame_id = 0;
    std::string domain;
    float progress = 0;

    uint8_t* pixel(int row, int col) { return &rgb[(static_cast<std::size_t>(row) * width + col) * 3]; }
    const uint8_t* pixel(int row, int col) const {
        return &rgb[(static_cast<std::size_t>(row) * width + col) * 3];
    }
};

enum class SurfaceClass : uint8_t { background = 0, floor = 1, track = 2, line = 3, center = 4 };

// Perspective ground-plane camera mounted on the car. Pure view: rendering
// never mutates simulator state, and the output is a deterministic function
// of (state, domain, resolution).
class SceneRenderer {
public:
    SceneRenderer(const Track& track, RenderParams params);

    Observation render(const CarState& state, const VisualDomain& domain) const;

    // Per-pixel geometry classes; domain-independent by construction.
    std::vector<uint8_t> class_map(const CarState& state) const;

    const RenderParams& params() const { return params_; }

private:
    struct Ray {
        double fwd, right, up;  // camera-frame direction components
    };
    double centerline_dist(double x, double y) const;
    SurfaceClass classify_ground(double x, double y) const;

    const Track* track_;
    RenderParams params_;
    std::vector<Ray> rays_;   // per pixel, row-major

    // sampled unsigned distance field around the track
    double grid_x0_ = 0, grid_y0_ = 0, cell_ = 0.025;
    int grid_w_ = 0, grid_h_ = 0;
    std::vector<float> grid_dist_;
};

// Rec.601 grayscale in [0,1], bilinear-resized to (target_h, target_w).
Tensor to_model_input(const Observation& obs, int target_h, int target_w);

}  // namespace racer

#endif  // RACER_RENDER_HPP_
