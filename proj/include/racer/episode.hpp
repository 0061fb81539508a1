#ifndef RACER_EPISODE_HPP_
#define RACER_EPISODE_HPP_

#include <utility>
#include <vector>

#include "racer/action_space.hpp"
#include "racer/nn.hpp"
#include "racer/render.hpp"
#include "racer/rng.hpp"
#include "racer/sim.hpp"

namespace racer {

class Agent {
public:
    virtual ~Agent() = default;
    virtual bool wants_pixels() const { return true; }
    virtual std::pair<int, int> input_hw() const { return {0, 0}; }
    // model_input is null when wants_pixels() is false.
    virtual int act(const Tensor* model_input, const CarState& state, Rng& rng) = 0;
};

// Acts from policy logits: softmax sampling during training rollouts,
// argmax during evaluation.
class PolicyAgent : public Agent {
public:
    PolicyAgent(const PolicyNet& net, bool greedy) : net_(&net), greedy_(greedy) {}
    std::pair<int, int> input_hw() const override {
        return {net_->spec.input_h, net_->spec.input_w};
    }
    int act(const Tensor* input, const CarState&, Rng& rng) override {
        Tensor logits = forward(*net_, *input);
        std::vector<float> z(logits.data.begin(), logits.data.end());
        if (greedy_) return argmax_index(z);
        return sample_index(softmax(z), rng);
    }

    // per-step log-prob and value bookkeeping is done by the PPO rollout,
    // which drives the net directly; this agent is for plain episodes.

private:
    const PolicyNet* net_;
    bool greedy_;
};

// Scripted pure-pursuit waypoint follower; oracle controller for tests.
class PurePursuitAgent : public Agent {
public:
    PurePursuitAgent(const Track& track, const DiscreteActionSpace& actions, double wheelbase,
                     double lookahead = 0.7, double corner_slowdown = 1.0)
        : track_(&track),
          actions_(&actions),
          wheelbase_(wheelbase),
          lookahead_(lookahead),
          corner_slowdown_(corner_slowdown) {}

    bool wants_pixels() const override { return false; }
    int act(const Tensor*, const CarState& state, Rng&) override;

private:
    const Track* track_;
    const DiscreteActionSpace* actions_;
    double wheelbase_, lookahead_, corner_slowdown_;
};

// Always picks a fixed action index.
class ConstantAgent : public Agent {
public:
    explicit ConstantAgent(int action) : action_(action) {}
    bool wants_pixels() const override { return false; }
    int act(const Tensor*, const CarState&, Rng&) override { return action_; }

private:
    int action_;
};

struct EpisodeSinks {
    std::vector<Tensor>* model_inputs = nullptr;
    std::vector<Observation>* raw_frames = nullptr;
};

// One episode: render -> preprocess -> act -> step at jittered 1/fps
// intervals until lap completion, off-track or timeout.
Trajectory run_episode(Agent& agent, const DiscreteActionSpace& actions, const Track& track,
                       const SceneRenderer& renderer, const VisualDomain& domain,
                       const SimParams& sim, Rng& rng, EpisodeSinks sinks = {});

}  // namespace racer

#endif  // RACER_EPISODE_HPP_
