#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>

#include "racer/checkpoint.hpp"
#include "racer/nn.hpp"

using namespace racer;

namespace {

NetSpec micro_spec() {
    NetSpec s;
    s.input_h = 4;
    s.input_w = 5;
    s.conv = {{2, 2, 1}};
    s.fc_hidden = {4};
    s.outputs = 3;
    return s;
}

// Scalar probe loss L = c . logits, so dL/dlogits = c.
template <typename S>
double probe_loss(const PolicyNetT<S>& net, const TensorT<S>& obs, const std::vector<S>& c) {
    TensorT<S> logits = forward(net, obs);
    double l = 0;
    for (int i = 0; i < logits.size(); ++i) l += static_cast<double>(c[i]) * logits.data[i];
    return l;
}

}  // namespace

TEST_CASE("glorot init: biases zero, bound respected, deterministic") {
    NetSpec s;
    s.input_h = 2;
    s.input_w = 2;
    s.fc_hidden = {};
    s.outputs = 2;
    // fc layer fan_in = 4, fan_out = 2 -> limit sqrt(6/6) = 1
    PolicyNet net = glorot_init(s, 42);
    REQUIRE(net.params.size() == 2);
    for (float w : net.params[0].data) {
        CHECK(w <= 1.0f);
        CHECK(w >= -1.0f);
    }
    for (float b : net.params[1].data) CHECK(b == 0.0f);

    PolicyNet again = glorot_init(s, 42);
    for (std::size_t i = 0; i < net.params.size(); ++i)
        CHECK(std::memcmp(net.params[i].data.data(), again.params[i].data.data(),
                          net.params[i].data.size() * sizeof(float)) == 0);

    PolicyNet other = glorot_init(s, 43);
    bool any_diff = false;
    for (std::size_t i = 0; i < net.params[0].data.size(); ++i)
        any_diff |= net.params[0].data[i] != other.params[0].data[i];
    CHECK(any_diff);

    PolicyNet full = glorot_init(NetSpec::policy_default(64, 84, 15), 7);
    float max_bias = 0;
    for (std::size_t i = 1; i < full.params.size(); i += 2)
        for (float b : full.params[i].data) max_bias = std::max(max_bias, std::fabs(b));
    CHECK(max_bias == 0.0f);
}

TEST_CASE("glorot init: inconsistent layer chain rejected") {
    NetSpec s;
    s.input_h = 4;
    s.input_w = 4;
    s.conv = {{4, 8, 1}};  // kernel larger than input
    s.outputs = 2;
    CHECK_THROWS_AS(glorot_init(s, 1), std::invalid_argument);

    NetSpec bad;
    bad.input_h = 4;
    bad.input_w = 4;
    bad.outputs = 0;
    CHECK_THROWS_AS(glorot_init(bad, 1), std::invalid_argument);
}

TEST_CASE("forward: zero net gives zero logits; pure function") {
    NetSpec s = micro_spec();
    PolicyNet net = glorot_init(s, 3);
    for (auto& p : net.params) p.fill(0.0f);
    Tensor obs({4, 5});
    for (int i = 0; i < obs.size(); ++i) obs.data[i] = 0.05f * static_cast<float>(i);
    Tensor logits = forward(net, obs);
    for (float v : logits.data) CHECK(v == 0.0f);

    PolicyNet net2 = glorot_init(s, 9);
    Tensor a = forward(net2, obs);
    Tensor b = forward(net2, obs);
    CHECK(std::memcmp(a.data.data(), b.data.data(), a.data.size() * sizeof(float)) == 0);
}

TEST_CASE("forward: micro net matches hand-computed convolution") {
    NetSpec s;
    s.input_h = 3;
    s.input_w = 3;
    s.conv = {{1, 2, 1}};
    s.fc_hidden = {};
    s.outputs = 2;
    PolicyNet net = glorot_init(s, 1);
    net.params[0].data = {1.0f, 0.5f, -1.0f, 2.0f};  // conv kernel
    net.params[1].data = {0.5f};                     // conv bias
    net.params[2].data = {1.0f, -1.0f, 0.5f, 0.0f,   // fc row 0
                          0.0f, 0.25f, -0.5f, 1.0f}; // fc row 1
    net.params[3].data = {1.0f, -2.0f};

    Tensor obs({3, 3}, {0, 1, 2, 3, 4, 5, 6, 7, 8});
    Tensor logits = forward(net, obs);
    // conv outputs (valid, stride 1): 5.5, 8, 13, 15.5; +0.5 bias -> 6, 8.5, 13.5, 16
    CHECK(logits.data[0] == doctest::Approx(5.25).epsilon(1e-6));
    CHECK(logits.data[1] == doctest::Approx(9.375).epsilon(1e-6));

    // Negative pre-activations must be ReLU-clamped: bias -9 -> acts {0,0,4,6.5}.
    net.params[1].data = {-9.0f};
    logits = forward(net, obs);
    CHECK(logits.data[0] == doctest::Approx(3.0).epsilon(1e-6));
    CHECK(logits.data[1] == doctest::Approx(2.5).epsilon(1e-6));

    Tensor wrong({3, 4});
    CHECK_THROWS_AS(forward(net, wrong), std::invalid_argument);
}

TEST_CASE("softmax: symmetry, closed form, shift invariance") {
    std::vector<float> u = softmax(std::vector<float>{0.f, 0.f, 0.f});
    for (float v : u) CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-7));
    std::vector<double> ud = softmax(std::vector<double>{0., 0., 0.});
    for (double v : ud) CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

    const float c = 4.2f;
    std::vector<float> two = softmax(std::vector<float>{c, c + std::log(2.0f)});
    CHECK(two[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-7));
    CHECK(two[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-7));

    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> z(7);
        for (auto& v : z) v = rng.uniform(-30, 30);
        std::vector<double> shifted = z;
        for (auto& v : shifted) v += 100.0;
        auto p = softmax(z);
        auto q = softmax(shifted);
        double sum = 0;
        for (std::size_t i = 0; i < p.size(); ++i) {
            CHECK(p[i] >= 0.0);
            CHECK(std::fabs(p[i] - q[i]) < 1e-9);
            sum += p[i];
        }
        CHECK(std::fabs(sum - 1.0) < 1e-9);
    }

    std::vector<float> bad = {1.0f, std::numeric_limits<float>::quiet_NaN()};
    CHECK_THROWS_AS(softmax(bad), std::domain_error);
    std::vector<float> inf = {1.0f, std::numeric_limits<float>::infinity()};
    CHECK_THROWS_AS(softmax(inf), std::domain_error);
}

TEST_CASE("backward: zero upstream grad yields zero parameter grads") {
    NetSpec s = micro_spec();
    PolicyNet net = glorot_init(s, 5);
    Tensor obs({4, 5});
    Rng rng(2);
    for (auto& v : obs.data) v = static_cast<float>(rng.uniform01());
    Tensor dlogits({3});
    Grads g = backward(net, obs, dlogits);
    for (const auto& t : g)
        for (float v : t.data) CHECK(v == 0.0f);
}

TEST_CASE("backward: analytic gradient matches central finite differences") {
    // Double instantiation: h = 1e-5 central differences need f64 headroom.
    NetSpec s = micro_spec();
    PolicyNetT<double> net = glorot_init<double>(s, 17);
    REQUIRE(net.param_count() <= 200);

    const double h = 1e-5;
    int checked = 0;
    for (int input_i = 0; input_i < 20; ++input_i) {
        Rng rng(100 + input_i);
        TensorT<double> obs({4, 5});
        for (auto& v : obs.data) v = rng.uniform01();
        std::vector<double> c(3);
        for (auto& v : c) v = rng.uniform(-1, 1);

        TensorT<double> dl({3}, c);
        GradsT<double> analytic = backward(net, obs, dl);

        for (std::size_t pi = 0; pi < net.params.size(); ++pi) {
            for (std::size_t j = 0; j < net.params[pi].data.size(); ++j) {
                double& w = net.params[pi].data[j];
                const double keep = w;
                w = keep + h;
                const double lp = probe_loss(net, obs, c);
                w = keep - h;
                const double lm = probe_loss(net, obs, c);
                w = keep;
                const double numeric = (lp - lm) / (2 * h);
                const double a = analytic[pi].data[j];
                const double scale = std::max({std::fabs(a), std::fabs(numeric), 1e-8});
                CHECK(std::fabs(a - numeric) / scale < 1e-4);
                ++checked;
            }
        }
    }
    CHECK(checked == 20 * 125);
}

TEST_CASE("backward: per-sample grads sum to batch grad") {
    NetSpec s = micro_spec();
    PolicyNet net = glorot_init(s, 23);
    Rng rng(4);
    Tensor o1({4, 5}), o2({4, 5});
    for (auto& v : o1.data) v = static_cast<float>(rng.uniform01());
    for (auto& v : o2.data) v = static_cast<float>(rng.uniform01());
    Tensor d1({3}), d2({3});
    for (auto& v : d1.data) v = static_cast<float>(rng.uniform(-1, 1));
    for (auto& v : d2.data) v = static_cast<float>(rng.uniform(-1, 1));

    Grads ga = backward(net, o1, d1);
    Grads gb = backward(net, o2, d2);
    Grads batch = zero_grads_like(net.params);
    auto c1 = forward_cached(net, o1);
    backward_into(net, c1, d1, batch);
    auto c2 = forward_cached(net, o2);
    backward_into(net, c2, d2, batch);

    for (std::size_t i = 0; i < batch.size(); ++i)
        for (std::size_t j = 0; j < batch[i].data.size(); ++j)
            CHECK(batch[i].data[j] ==
                  doctest::Approx(ga[i].data[j] + gb[i].data[j]).epsilon(1e-5));
}

TEST_CASE("clip_grad_norm: threshold, scaling, degenerate zero") {
    Grads g;
    g.emplace_back(std::vector<int>{2}, std::vector<float>{3.0f, 0.0f});
    double norm = clip_grad_norm(g, 5.0);
    CHECK(norm == doctest::Approx(3.0));
    CHECK(g[0].data[0] == 3.0f);  // under threshold: untouched

    Grads big;
    big.emplace_back(std::vector<int>{2}, std::vector<float>{30.0f, 40.0f});
    norm = clip_grad_norm(big, 5.0);
    CHECK(norm == doctest::Approx(50.0));
    CHECK(big[0].data[0] == doctest::Approx(3.0f));
    CHECK(big[0].data[1] == doctest::Approx(4.0f));

    Grads zero;
    zero.emplace_back(std::vector<int>{3});
    clip_grad_norm(zero, 5.0);
    for (float v : zero[0].data) CHECK(v == 0.0f);
}

TEST_CASE("clip_grad_norm: never increases norm and is idempotent") {
    Rng rng(77);
    for (int t = 0; t < 30; ++t) {
        Grads g;
        g.emplace_back(std::vector<int>{7});
        g.emplace_back(std::vector<int>{3});
        for (auto& tens : g)
            for (auto& v : tens.data) v = static_cast<float>(rng.uniform(-20, 20));
        const double before = clip_grad_norm(g, 4.0);
        double after_sq = 0;
        for (const auto& tens : g)
            for (float v : tens.data) after_sq += static_cast<double>(v) * v;
        const double after = std::sqrt(after_sq);
        CHECK(after <= std::max(before, 4.0) * (1 + 1e-6));

        Grads copy = g;
        clip_grad_norm(g, 4.0);
        for (std::size_t i = 0; i < g.size(); ++i)
            for (std::size_t j = 0; j < g[i].data.size(); ++j)
                CHECK(g[i].data[j] == doctest::Approx(copy[i].data[j]).epsilon(1e-6));
    }
}

TEST_CASE("optimizer: momentum with zero grads leaves params unchanged") {
    NetSpec s = micro_spec();
    PolicyNet net = glorot_init(s, 31);
    PolicyNet before = net;
    std::vector<Tensor*> ps;
    for (auto& p : net.params) ps.push_back(&p);
    auto st = OptimizerState::make(OptimizerKind::momentum, LrSchedule{0.01, 1.0, 0, -1}, ps);
    Grads g = zero_grads_like(net.params);
    optimizer_step(st, net, g);
    for (std::size_t i = 0; i < net.params.size(); ++i)
        CHECK(std::memcmp(net.params[i].data.data(), before.params[i].data.data(),
                          net.params[i].data.size() * sizeof(float)) == 0);
}

TEST_CASE("optimizer: adam first step approaches -lr * sign(g)") {
    NetSpec s;
    s.input_h = 1;
    s.input_w = 1;
    s.fc_hidden = {};
    s.outputs = 1;
    PolicyNet net = glorot_init(s, 3);
    net.params[0].data[0] = 1.0f;
    const double lr = 0.01;
    std::vector<Tensor*> ps;
    for (auto& p : net.params) ps.push_back(&p);
    auto st = OptimizerState::make(OptimizerKind::adam, LrSchedule{lr, 1.0, 0, -1}, ps);
    Grads g = zero_grads_like(net.params);
    g[0].data[0] = 10.0f;  // |g| >> eps
    optimizer_step(st, net, g);
    CHECK(net.params[0].data[0] == doctest::Approx(1.0 - lr).epsilon(1e-6));
    CHECK(st.step == 1);
}

TEST_CASE("optimizer: momentum recurrence over two constant-grad steps") {
    NetSpec s;
    s.input_h = 1;
    s.input_w = 1;
    s.fc_hidden = {};
    s.outputs = 1;
    PolicyNet net = glorot_init(s, 3);
    net.params[0].data[0] = 0.0f;
    net.params[1].data[0] = 0.0f;
    const double lr = 0.1, muv = 0.9, gval = 2.0;
    std::vector<Tensor*> ps;
    for (auto& p : net.params) ps.push_back(&p);
    auto st = OptimizerState::make(OptimizerKind::momentum, LrSchedule{lr, 1.0, 0, -1}, ps);
    Grads g = zero_grads_like(net.params);
    g[0].data[0] = static_cast<float>(gval);

    optimizer_step(st, net, g);
    const double after1 = net.params[0].data[0];
    CHECK(after1 == doctest::Approx(-lr * gval).epsilon(1e-7));
    optimizer_step(st, net, g);
    const double delta2 = net.params[0].data[0] - after1;
    CHECK(delta2 == doctest::Approx(-lr * gval * (1 + muv)).epsilon(1e-7));
}

TEST_CASE("lr schedule: decay events and cutoff") {
    LrSchedule lrs{5e-4, 0.5, 4e6, 12e6};
    CHECK(lrs.at(0) == doctest::Approx(5e-4));
    CHECK(lrs.at(3.9e6) == doctest::Approx(5e-4));
    CHECK(lrs.at(4e6) == doctest::Approx(2.5e-4));
    CHECK(lrs.at(8.1e6) == doctest::Approx(1.25e-4));
    CHECK(lrs.at(12e6) == doctest::Approx(6.25e-5));
    CHECK(lrs.at(40e6) == doctest::Approx(6.25e-5));  // frozen past cutoff
}

TEST_CASE("determinism: identical seeds give bit-identical forward/backward/update") {
    NetSpec s = micro_spec();
    Tensor obs({4, 5});
    Rng rng(6);
    for (auto& v : obs.data) v = static_cast<float>(rng.uniform01());
    Tensor dl({3}, {0.3f, -1.0f, 0.25f});

    auto run = [&](uint64_t seed) {
        PolicyNet net = glorot_init(s, seed);
        Tensor lg = forward(net, obs);
        Grads g = backward(net, obs, dl);
        std::vector<Tensor*> ps;
        for (auto& p : net.params) ps.push_back(&p);
        auto st = OptimizerState::make(OptimizerKind::adam, LrSchedule{1e-3, 1.0, 0, -1}, ps);
        optimizer_step(st, net, g);
        return std::make_pair(lg, net);
    };
    auto [l1, n1] = run(99);
    auto [l2, n2] = run(99);
    CHECK(std::memcmp(l1.data.data(), l2.data.data(), l1.data.size() * sizeof(float)) == 0);
    for (std::size_t i = 0; i < n1.params.size(); ++i)
        CHECK(std::memcmp(n1.params[i].data.data(), n2.params[i].data.data(),
                          n1.params[i].data.size() * sizeof(float)) == 0);
}

TEST_CASE("checkpoint: save/load round-trip is bit-identical") {
    NetSpec s;
    s.input_h = 16;
    s.input_w = 20;
    s.conv = {{4, 3, 2}, {8, 3, 1}};
    s.fc_hidden = {32};
    s.outputs = 5;
    PolicyNet net = glorot_init(s, 1234);
    const auto path = std::filesystem::temp_directory_path() / "racer_ckpt_test.rdnn";
    save_checkpoint(net, path, 1234);
    uint64_t seed = 0;
    PolicyNet loaded = load_checkpoint(path, &seed);
    CHECK(seed == 1234);
    REQUIRE(loaded.params.size() == net.params.size());
    for (std::size_t i = 0; i < net.params.size(); ++i) {
        REQUIRE(loaded.params[i].shape == net.params[i].shape);
        CHECK(std::memcmp(loaded.params[i].data.data(), net.params[i].data.data(),
                          net.params[i].data.size() * sizeof(float)) == 0);
    }
    Tensor obs({16, 20});
    Rng rng(8);
    for (auto& v : obs.data) v = static_cast<float>(rng.uniform01());
    Tensor a = forward(net, obs);
    Tensor b = forward(loaded, obs);
    CHECK(std::memcmp(a.data.data(), b.data.data(), a.data.size() * sizeof(float)) == 0);
    std::filesystem::remove(path);
    std::filesystem::remove(path.string() + ".json");
}
