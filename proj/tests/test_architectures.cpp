// SPDX-License-Identifier: Apache-2.0
#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "layerlab/architectures.hpp"
#include "layerlab/error.hpp"
#include "layerlab/synthesis.hpp"

using namespace layerlab;

namespace {

LayerSpec zero_layer(LayerName name, int T = 0)
{
    return {name, T, QuantizerSpec::none(), ControllerSpec::zero()};
}

Disturbances zeros(int n)
{
    return {Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n)};
}

Disturbances random_bumps(int n, std::uint64_t seed, double bound = 1.0)
{
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(-bound, bound);
    Disturbances d = zeros(n);
    for (int t = 0; t < n; ++t) d.v[t] = u(gen);
    return d;
}

}  // namespace

TEST_CASE("unforced plant holds its initial state")
{
    PlantConfig c;
    c.horizon = 12;
    c.x0 = 0.75;
    const Trajectory tr = simulate_layered(c, zero_layer(LayerName::low), zero_layer(LayerName::high), zeros(12));
    CHECK((tr.x.array() == 0.75).all());
}

TEST_CASE("exact trail cancellation keeps the state at zero")
{
    PlantConfig c;
    c.horizon = 10;
    c.T_r = 2;
    c.r_step_bound = 1.0;
    Disturbances d = zeros(10);
    d.r.setOnes();
    const LayerSpec high = synthesize_trail_layer(2, 1, QuantizerSpec::none());
    const Trajectory tr = simulate_layered(c, zero_layer(LayerName::low), high, d);
    CHECK(tr.x.cwiseAbs().maxCoeff() == 0.0);
    CHECK(tr.u_H[2] == -1.0);
}

TEST_CASE("delay not shorter than the horizon is rejected")
{
    PlantConfig c;
    c.horizon = 3;
    CHECK_THROWS_AS(simulate_layered(c, zero_layer(LayerName::low, 3), zero_layer(LayerName::high), zeros(3)),
                    ConfigError);
    CHECK_THROWS_AS(simulate_layered(c, zero_layer(LayerName::low), zero_layer(LayerName::high, 4), zeros(3)),
                    ConfigError);
}

TEST_CASE("layers add at the actuator")
{
    PlantConfig c;
    c.a = 1.0;
    c.horizon = 40;
    c.T_r = 2;
    c.w_bound = 1.0;
    c.r_step_bound = 0.5;
    const LayerSpec low = synthesize_bump_layer(1.0, 1, QuantizerSpec::none(), 1.0);
    const LayerSpec high = synthesize_trail_layer(2, 1, QuantizerSpec::none());
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        DisturbanceSpec s;
        s.seed = seed;
        const Disturbances d = make_disturbances(s, c);
        const Trajectory joint = simulate_layered(c, low, high, d);
        const Trajectory lo = simulate_layered(c, low, zero_layer(LayerName::high), Disturbances{d.v, zeros(40).r});
        const Trajectory hi = simulate_layered(c, zero_layer(LayerName::low), high, Disturbances{zeros(40).v, d.r});
        CHECK((joint.u_L - lo.u_L).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK((joint.u_H - hi.u_H).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK((joint.x - (lo.x + hi.x)).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("bump predictor gives the deadbeat response")
{
    PlantConfig c;
    c.horizon = 30;
    for (int T = 0; T <= 3; ++T) {
        const LayerSpec low = synthesize_bump_layer(1.0, T, QuantizerSpec::none(), 1.0);
        const Disturbances d = random_bumps(30, 40 + T);
        const Trajectory tr = simulate_layered(c, low, zero_layer(LayerName::high), d);
        // x(t+1) is the sum of the last T+1 bumps.
        for (int t = 0; t < 30; ++t) {
            double expect = 0.0;
            for (int j = std::max(0, t - T); j <= t; ++j) expect += d.v[j];
            REQUIRE(tr.x[t + 1] == Catch::Approx(expect).margin(1e-12));
        }
    }
}

TEST_CASE("bump predictor uses the known initial state before samples arrive")
{
    PlantConfig c;
    c.horizon = 6;
    c.x0 = 2.0;
    c.a = 1.5;
    const LayerSpec low = synthesize_bump_layer(1.5, 2, QuantizerSpec::none(), 1.0);
    const Trajectory tr = simulate_layered(c, low, zero_layer(LayerName::high), zeros(6));
    CHECK(tr.x.tail(6).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("arch1 mode quantizes the low action and leaves the trail exact")
{
    PlantConfig c;
    c.horizon = 8;
    c.T_r = 1;
    c.r_step_bound = 0.3;
    Disturbances d = random_bumps(8, 3);
    for (int t = 1; t < 8; ++t) d.r[t] = d.r[t - 1] + 0.3 * (t % 2 ? 1 : -1);
    const LayerSpec low{LayerName::low, 0, QuantizerSpec::uniform(3, 4.0), ControllerSpec::custom_linear({-1.0})};
    const LayerSpec high = synthesize_trail_layer(1, 0, QuantizerSpec::uniform(1, 1.0));
    const Trajectory tr = simulate_layered(c, low, high, d, LayeredMode::arch1);
    for (int t = 0; t < 8; ++t) {
        CHECK(tr.u_L[t] == quantize_uniform(-tr.x[t], 3, 4.0).value);
        CHECK(tr.u_H[t] == (t >= 1 ? -d.r[t - 1] : 0.0));
    }
}

TEST_CASE("arch2 equilibrium")
{
    PlantConfig c;
    c.horizon = 20;
    const Arch2Result r = simulate_arch2(Arch2Params{1.0, 0.5, 0.5, true}, zeros(20), c);
    CHECK(r.traj.x.cwiseAbs().maxCoeff() == 0.0);
    CHECK(r.x_hat.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("unquantized arch2 matches the companion matrix iteration")
{
    PlantConfig c;
    c.horizon = 100;
    Disturbances d = zeros(100);
    d.v[0] = 1.0;
    const Arch2Result r = simulate_arch2(Arch2Params{1.0, 0.5, 0.5, false}, d, c);
    Eigen::Matrix2d A;
    A << 1.5, -0.5, 1.0, 0.0;
    Eigen::Vector2d s(1.0, 0.0);
    for (int t = 1; t <= 100; ++t) {
        REQUIRE(std::abs(r.traj.x[t] - s[0]) <= 1e-12);
        REQUIRE(std::abs(r.x_hat[t] - s[1]) <= 1e-12);
        s = A * s;
    }

    // Random disturbances and other gains, against the same iteration.
    for (double k : {-0.7, 0.2, 0.9}) {
        const double a = 0.8;
        const Disturbances w = random_bumps(100, 9);
        const Arch2Result q = simulate_arch2(Arch2Params{a, k, 0.5, false}, w, c);
        Eigen::Matrix2d B;
        B << a + k, -k, 1.0, 0.0;
        Eigen::Vector2d z(0.0, 0.0);
        for (int t = 0; t < 100; ++t) {
            z = B * z + Eigen::Vector2d(w.v[t], 0.0);
            REQUIRE(std::abs(q.traj.x[t + 1] - z[0]) <= 1e-12);
        }
    }
}

TEST_CASE("certified-stable arch2 stays bounded")
{
    PlantConfig c;
    c.a = 0.5;
    c.horizon = 200;
    REQUIRE(stability_arch2(0.5, 0.2, 0.5).stable);
    DisturbanceSpec s;
    s.seed = 17;
    const Arch2Result r = simulate_arch2(Arch2Params{0.5, 0.2, 0.5, true}, s, c);
    CHECK(r.traj.x.cwiseAbs().maxCoeff() < 10.0);
    CHECK(r.symbols.size() == 200);
    CHECK(r.w_hat.size() == 200);
}

TEST_CASE("arch2 parameter validation")
{
    PlantConfig c;
    CHECK_THROWS_AS(simulate_arch2(Arch2Params{1.0, 0.5, 1.2, true}, zeros(1), c), ConfigError);
    CHECK_THROWS_AS(simulate_arch2(Arch2Params{1.0, 0.5, 0.0, true}, zeros(1), c), ConfigError);
}

TEST_CASE("arch3 with no disturbance stays at rest")
{
    PlantConfig c;
    c.horizon = 15;
    const LayerSpec fast{LayerName::low, 1, QuantizerSpec::uniform(2, 2.0), ControllerSpec::zero()};
    const LayerSpec slow{LayerName::high, 3, QuantizerSpec::none(), ControllerSpec::zero()};
    const Arch3Result r = simulate_arch3(c, fast, slow, zeros(15));
    CHECK(r.traj.x.cwiseAbs().maxCoeff() == 0.0);
    CHECK(r.traj.u_H.cwiseAbs().maxCoeff() == 0.0);
    CHECK(r.ifp_log.empty());
}

TEST_CASE("arch3 configuration errors")
{
    PlantConfig c;
    c.horizon = 10;
    const LayerSpec a{LayerName::low, 2, QuantizerSpec::uniform(2, 2.0), ControllerSpec::zero()};
    const LayerSpec b{LayerName::high, 2, QuantizerSpec::none(), ControllerSpec::zero()};
    CHECK_THROWS_AS(simulate_arch3(c, a, b, zeros(10)), ConfigError);
    const LayerSpec q{LayerName::high, 4, QuantizerSpec::uniform(2, 2.0), ControllerSpec::zero()};
    CHECK_THROWS_AS(simulate_arch3(c, a, q, zeros(10)), ConfigError);
}

TEST_CASE("arch3 removes an impulse's quantization error one step after the slow delay")
{
    for (double a : {1.0, 0.7, -1.2}) {
        for (auto [Tf, Ts] : {std::pair{0, 1}, std::pair{1, 3}, std::pair{0, 4}, std::pair{2, 5}}) {
            PlantConfig c;
            c.a = a;
            c.horizon = Ts + 6;
            const LayerSpec fast{LayerName::low, Tf, QuantizerSpec::uniform(2, 2.0), ControllerSpec::zero()};
            const LayerSpec exact{LayerName::low, Tf, QuantizerSpec::none(), ControllerSpec::zero()};
            const LayerSpec slow{LayerName::high, Ts, QuantizerSpec::none(), ControllerSpec::zero()};
            Disturbances d = zeros(c.horizon);
            d.v[0] = 0.37;
            const Arch3Result q = simulate_arch3(c, fast, slow, d);
            const Arch3Result e = simulate_arch3(c, exact, slow, d);
            const Eigen::VectorXd diff = q.traj.x - e.traj.x;
            const double err = 0.37 - quantize_uniform(0.37, 2, 2.0).value;
            for (int t = 0; t <= c.horizon; ++t) {
                if (t >= Tf + 2 && t <= Ts + 1)
                    REQUIRE(diff[t] == Catch::Approx(std::pow(a, t - 1) * err).margin(1e-12));
                else
                    REQUIRE(std::abs(diff[t]) <= 1e-15);
            }
            CHECK(q.ifp_log.size() == 1);
            CHECK(q.ifp_log[0].t_sent == Tf + 1);
        }
    }
}

TEST_CASE("arch3 error at time t only depends on the last slow window")
{
    // x_arch3 - x_exact_fast at t collects errors of w(j), j in [t-Ts-1, t-Tf-2].
    PlantConfig c;
    c.horizon = 60;
    const int Tf = 1, Ts = 4;
    const LayerSpec fast{LayerName::low, Tf, QuantizerSpec::uniform(3, 0.0), ControllerSpec::zero()};
    const LayerSpec exact{LayerName::low, Tf, QuantizerSpec::none(), ControllerSpec::zero()};
    const LayerSpec slow{LayerName::high, Ts, QuantizerSpec::none(), ControllerSpec::zero()};
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Disturbances d = random_bumps(60, 100 + seed);
        const Arch3Result q = simulate_arch3(c, fast, slow, d);
        const Arch3Result e = simulate_arch3(c, exact, slow, d);
        for (int t = 0; t <= 60; ++t) {
            double expect = 0.0;
            for (int j = std::max(0, t - Ts - 1); j <= t - Tf - 2; ++j)
                expect += d.v[j] - quantize_uniform(d.v[j], 3, 1.0).value;
            REQUIRE(q.traj.x[t] - e.traj.x[t] == Catch::Approx(expect).margin(1e-12));
        }
        std::size_t acted = 0;
        for (int j = 0; j + Tf + 1 < 60; ++j) acted += d.v[j] != 0.0;
        CHECK(q.ifp_log.size() == acted);
    }
}

TEST_CASE("architecture graph census")
{
    ArchitectureSpecs s;
    s.low = synthesize_bump_layer(1.0, 0, QuantizerSpec::uniform(2, 0.0), 1.0);
    s.high = synthesize_trail_layer(3, 2, QuantizerSpec::uniform(6, 7.0));
    s.fast = {LayerName::low, 1, QuantizerSpec::uniform(2, 2.0), ControllerSpec::zero()};
    s.slow = {LayerName::high, 3, QuantizerSpec::none(), ControllerSpec::zero()};
    CHECK(architecture_graph(ArchitectureTag::layered, s).ifp_count() == 0);
    const ArchitectureGraph g2 = architecture_graph(ArchitectureTag::arch2, s);
    REQUIRE(g2.ifp_count() == 1);
    for (const GraphEdge& e : g2.edges) {
        if (e.label != EdgeLabel::ifp) continue;
        CHECK(e.from == "estimator");
        CHECK(e.to == "sensor");
    }
    const ArchitectureGraph g3 = architecture_graph(ArchitectureTag::arch3, s);
    CHECK(g3.ifp_count() >= 2);
    bool fast_to_slow = false;
    for (const GraphEdge& e : g3.edges)
        fast_to_slow |= e.label == EdgeLabel::ifp && e.from == "controller_fast" && e.to == "controller_slow";
    CHECK(fast_to_slow);
    s.fast.quantizer = QuantizerSpec::dynamic_interval(0.3);
    CHECK(architecture_graph(ArchitectureTag::arch3, s).ifp_count() == 3);
}

TEST_CASE("every IFP edge opposes the forward loop")
{
    ArchitectureSpecs s;
    s.fast = {LayerName::low, 1, QuantizerSpec::uniform(2, 2.0), ControllerSpec::zero()};
    s.slow = {LayerName::high, 3, QuantizerSpec::none(), ControllerSpec::zero()};
    for (auto tag : {ArchitectureTag::layered, ArchitectureTag::arch2, ArchitectureTag::arch3}) {
        const ArchitectureGraph g = architecture_graph(tag, s);
        CHECK_NOTHROW(validate_graph(g));
        for (const GraphEdge& e : g.edges) {
            if (e.label == EdgeLabel::ifp) CHECK(g.node(e.from).stage > g.node(e.to).stage);
        }
    }
}

TEST_CASE("graph validator rejects malformed graphs")
{
    const ArchitectureGraph good = architecture_graph(ArchitectureTag::arch2, {});
    ArchitectureGraph bad = good;
    bad.edges.push_back({"sensor", "controller", EdgeLabel::ifp, 0, std::nullopt, "wrong way"});
    CHECK_THROWS_AS(validate_graph(bad), ConfigError);
    bad = good;
    bad.edges.push_back({"plant", "sensor", EdgeLabel::ifp, 0, std::nullopt, "loop closure is not internal"});
    CHECK_THROWS_AS(validate_graph(bad), ConfigError);
    bad = good;
    bad.edges.push_back({"actuator", "controller", EdgeLabel::forward, 0, std::nullopt, "backwards"});
    CHECK_THROWS_AS(validate_graph(bad), ConfigError);
    bad = good;
    bad.nodes.push_back({"plant2", NodeRole::plant, 5});
    CHECK_THROWS_AS(validate_graph(bad), ConfigError);
    bad = good;
    bad.nodes.push_back({"island", NodeRole::sensor, 0});
    CHECK_THROWS_AS(validate_graph(bad), ConfigError);
}

TEST_CASE("architecture tags")
{
    CHECK(parse_architecture_tag("arch3") == ArchitectureTag::arch3);
    CHECK(to_string(ArchitectureTag::arch2) == "arch2");
    CHECK_THROWS_AS(parse_architecture_tag("arch4"), ConfigError);
}

TEST_CASE("dot export marks internal feedback")
{
    const std::string dot = to_dot(architecture_graph(ArchitectureTag::arch2, {}));
    CHECK(dot.rfind("digraph", 0) == 0);
    CHECK(dot.find("\"estimator\" -> \"sensor\"") != std::string::npos);
    CHECK(dot.find("style=dashed") != std::string::npos);
}

TEST_CASE("arch3 sends no message once the bumps stop")
{
    PlantConfig c;
    c.horizon = 24;
    const LayerSpec fast{LayerName::low, 1, QuantizerSpec::uniform(3, 1.0), ControllerSpec::zero()};
    const LayerSpec slow{LayerName::high, 3, QuantizerSpec::none(), ControllerSpec::zero()};
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        Disturbances d = random_bumps(24, 500 + seed);
        for (int t = 10; t < 24; ++t) d.v[t] = 0.0;
        const Arch3Result r = simulate_arch3(c, fast, slow, d);
        for (const IfpMessage& m : r.ifp_log) CHECK(m.disturbance_step < 10);
        for (int t = 15; t <= 24; ++t) CHECK(r.traj.x[t] == Catch::Approx(r.traj.x[14]).margin(1e-12));
    }
}
