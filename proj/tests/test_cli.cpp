// SPDX-License-Identifier: Apache-2.0
#include <catch_amalgamated.hpp>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

namespace {

struct Run {
    int code = -1;
    std::string out, err;
};

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::path(LAYERLAB_SCRATCH_DIR) / "cli" / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

Run run(const std::string& args)
{
    const fs::path dir = fs::path(LAYERLAB_SCRATCH_DIR) / "cli";
    fs::create_directories(dir);
    const fs::path o = dir / "stdout.txt", e = dir / "stderr.txt";
    const std::string cmd = std::string("\"") + LAYERLAB_CLI + "\" " + args + " >\"" + o.string() + "\" 2>\"" +
                            e.string() + "\"";
    const int status = std::system(cmd.c_str());
    Run r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(o);
    r.err = slurp(e);
    return r;
}

std::string config(const std::string& name)
{
    return "\"" + std::string(LAYERLAB_CONFIG_DIR) + "/" + name + "\"";
}

std::string fixture(const std::string& name)
{
    return "\"" + std::string(LAYERLAB_FIXTURE_DIR) + "/" + name + "\"";
}

fs::path write_config(const std::string& name, const std::string& text)
{
    const fs::path p = fs::path(LAYERLAB_SCRATCH_DIR) / "cli" / name;
    fs::create_directories(p.parent_path());
    std::ofstream(p, std::ios::binary) << text;
    return p;
}

}  // namespace

TEST_CASE("usage errors exit 64")
{
    CHECK(run("").code == 64);
    CHECK(run("frobnicate").code == 64);
    CHECK(run("stability -a 1 -k 0.5").code == 64);
    CHECK(run("stability -a 1 -k 0.5 -q 1.2").code == 64);
    CHECK(run("simulate").code == 64);
    CHECK(run("--format xml --config " + config("layered.toml") + " simulate").code == 64);
}

TEST_CASE("stability exit status follows the verdict")
{
    const Run unstable = run("stability -a 1 -k 0.5 -q 0.5");
    CHECK(unstable.code == 2);
    CHECK(nlohmann::json::parse(unstable.out)["stable"] == false);
    const Run stable = run("stability -a 0.5 -k 0.2 -q 0.9");
    CHECK(stable.code == 0);
    CHECK(nlohmann::json::parse(stable.out)["stable"] == true);
}

TEST_CASE("missing input exits 66")
{
    CHECK(run("--config /nonexistent/x.toml simulate").code == 66);
    CHECK(run("ingest-session /nonexistent/log.json").code == 66);
}

TEST_CASE("invalid config exits 65 and names the field")
{
    const fs::path p = write_config("bad.toml", "[plant]\na = 1.0\nhorizon = -3\n[layered]\n");
    const Run r = run("--config \"" + p.string() + "\" simulate");
    CHECK(r.code == 65);
    CHECK_THAT(r.err, ContainsSubstring("plant.horizon"));

    const fs::path q = write_config("badq.toml", "[plant]\nhorizon = 4\n[layered]\n[layered.low]\nT = 0\n"
                                                 "[layered.low.quantizer]\nkind = \"uniform\"\nR = -1\n");
    const Run rq = run("--config \"" + q.string() + "\" simulate");
    CHECK(rq.code == 65);
    CHECK_THAT(rq.err, ContainsSubstring("layered.low.quantizer.R"));
}

TEST_CASE("unwritable output exits 73")
{
    const fs::path blocker = write_config("blocker", "file, not a directory");
    const Run r = run("--config " + config("layered.toml") + " --out \"" + (blocker / "sub").string() + "\" simulate");
    CHECK(r.code == 73);
}

TEST_CASE("zero disturbance gives a zero state column")
{
    const fs::path p = write_config("quiet.toml", "[plant]\nhorizon = 12\nT_r = 2\nr_step_bound = 1.0\n"
                                                  "[disturbance]\nkind = \"explicit\"\n"
                                                  "[layered]\n[layered.low]\nT = 0\ncontroller = \"zero\"\n"
                                                  "[layered.high]\nT = 0\ncontroller = \"zero\"\n");
    const fs::path out = scratch("quiet");
    REQUIRE(run("--config \"" + p.string() + "\" --out \"" + out.string() + "\" --format csv simulate").code == 0);
    std::istringstream csv(slurp(out / "trajectory.csv"));
    std::string line;
    std::getline(csv, line);
    CHECK(line.rfind("t,x,", 0) == 0);
    int rows = 0;
    while (std::getline(csv, line)) {
        const auto a = line.find(','), b = line.find(',', a + 1);
        CHECK(line.substr(a + 1, b - a - 1) == "0");
        ++rows;
    }
    CHECK(rows == 13);
}

TEST_CASE("constant bump costs exactly the oracle value")
{
    const Run sim = run("--config " + fixture("constant_bump.toml") + " simulate");
    REQUIRE(sim.code == 0);
    const Run orc = run("--config " + fixture("constant_bump.toml") + " oracle");
    REQUIRE(orc.code == 0);
    const double cost = nlohmann::json::parse(sim.out)["cost_linf"];
    const double value = nlohmann::json::parse(orc.out)["minimax_cost"];
    CHECK_THAT(cost, WithinAbs(2.0, 1e-12));
    CHECK_THAT(value, WithinAbs(2.0, 1e-9));
}

TEST_CASE("sweep writes the full allocation table")
{
    const fs::path out = scratch("sweep");
    REQUIRE(run("--config " + fixture("dess_fixture.toml") + " --format csv --out \"" + out.string() + "\" sweep")
                .code == 0);
    const std::string got = slurp(out / "sweep.csv");
    CHECK(got == slurp(fs::path(LAYERLAB_FIXTURE_DIR) / "dess_sweep_oracle.csv"));
    CHECK(std::count(got.begin(), got.end(), '\n') == 10);
}

TEST_CASE("graph output")
{
    const Run r = run("--config " + config("arch3.toml") + " --format csv graph");
    REQUIRE(r.code == 0);
    CHECK_THAT(r.out, ContainsSubstring(",ifp,"));
    const fs::path out = scratch("graph");
    REQUIRE(run("--config " + config("arch3.toml") + " --out \"" + out.string() + "\" graph").code == 0);
    CHECK(fs::exists(out / "graph.json"));
    CHECK_THAT(slurp(out / "graph.dot"), ContainsSubstring("digraph"));
}

TEST_CASE("session ingestion")
{
    const Run good = run("ingest-session " + fixture("sessions/perfect_player.json"));
    CHECK(good.code == 0);
    CHECK(nlohmann::json::parse(good.out)["regression"]["rank"] == 3);
    const Run bad = run("ingest-session " + fixture("sessions/corrupted_t.json"));
    CHECK(bad.code == 65);
    CHECK_THAT(bad.err, ContainsSubstring("frame 5"));
}

TEST_CASE("reruns are byte-identical")
{
    const std::string cmds[] = {
        "--config " + config("layered.toml") + " simulate",
        "--config " + config("arch2.toml") + " simulate",
        "--config " + config("arch3.toml") + " simulate",
        "--config " + config("layered.toml") + " --seed 99 --format csv simulate",
        "--config " + fixture("dess_fixture.toml") + " sweep",
        "--config " + fixture("constant_bump.toml") + " oracle",
        "--config " + config("arch3.toml") + " graph",
        "stability -a 1 -k 0.5 -q 0.5",
        "ingest-session " + fixture("sessions/delayed_player.json"),
    };
    for (const std::string& c : cmds) {
        INFO(c);
        const Run a = run(c), b = run(c);
        CHECK(a.code == b.code);
        CHECK(a.out == b.out);
        CHECK(!a.out.empty());
    }
}

TEST_CASE("seed override changes the run")
{
    const Run a = run("--config " + config("layered.toml") + " --seed 1 simulate");
    const Run b = run("--config " + config("layered.toml") + " --seed 2 simulate");
    REQUIRE(a.code == 0);
    CHECK(nlohmann::json::parse(a.out)["seed"] == 1);
    CHECK(a.out != b.out);
}
