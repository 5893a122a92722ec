// SPDX-License-Identifier: Apache-2.0
// Writes the checked-in session-log fixtures: make_session_fixtures <dir>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "layerlab/controllers.hpp"
#include "layerlab/session.hpp"

using namespace layerlab;

namespace {

SessionConfig base_config()
{
    SessionConfig c;
    c.plant.a = 1.0;
    c.plant.w_bound = 1.0;
    c.plant.r_step_bound = 0.5;
    c.plant.T_r = 3;
    c.plant.horizon = 40;
    c.seed = 42;
    c.T_L = 1;
    c.T_H = 2;
    c.quantizer_L = QuantizerSpec::uniform(3, 0.0);
    c.quantizer_H = QuantizerSpec::uniform(4, 0.0);
    return c;
}

void write(const std::filesystem::path& p, const Json& j)
{
    std::ofstream(p, std::ios::binary) << j.dump(1) << "\n";
    std::cout << "wrote " << p.string() << "\n";
}

}  // namespace

int main(int argc, char** argv)
{
    if (argc != 2) {
        std::cerr << "usage: make_session_fixtures <dir>\n";
        return 64;
    }
    const std::filesystem::path dir = argv[1];
    std::filesystem::create_directories(dir);

    const SessionConfig cfg = base_config();
    const SessionLog zero = record_session(cfg, std::vector<double>(40, 0.0));
    write(dir / "zero_input.json", to_json(zero));

    LayerRuntime low(session_low_layer(cfg), cfg.plant.x0);
    LayerRuntime high(session_high_layer(cfg), 0.0);
    const SessionLog perfect =
        record_session(cfg, [&](const SessionFrame& f) { return low.act(f.x) + high.act(f.r); });
    write(dir / "perfect_player.json", to_json(perfect));

    SessionConfig lagged = cfg;
    lagged.seed = 9;
    lagged.input_delay = 2;
    lagged.score_norm = CostNorm::rms;
    const SessionLog human = record_session(lagged, [](const SessionFrame& f) { return -0.6 * f.x - 0.3 * f.r; });
    write(dir / "delayed_player.json", to_json(human));

    Json corrupted = to_json(zero);
    corrupted["frames"][5]["t"] = 3;
    write(dir / "corrupted_t.json", corrupted);

    Json reseeded = to_json(zero);
    reseeded["config"]["seed"] = 43;
    write(dir / "wrong_seed.json", reseeded);

    Json rescored = to_json(zero);
    rescored["score"] = zero.score + 0.01;
    write(dir / "bad_score.json", rescored);

    Json missing = to_json(zero);
    missing["frames"][7].erase("x");
    write(dir / "missing_field.json", missing);
    return 0;
}
