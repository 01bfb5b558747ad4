#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "uwsim/batch.hpp"
#include "uwsim/config.hpp"

using namespace uwsim;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
    const auto path = (std::filesystem::temp_directory_path() / name).string();
    std::ofstream out(path);
    out << content;
    return path;
}

}  // namespace

TEST_SUITE_BEGIN("config");

TEST_CASE("flag overrides beat file values") {
    SimConfig cfg;
    const auto path = write_temp("uwsim_cfg_a.ini",
                                 "[radio]\n"
                                 "tx_power_dbm = 20\n"
                                 "[run]\n"
                                 "scenario = p2p\n");
    load_config_file(cfg, path);
    CHECK(cfg.net.radio.tx_power_dbm == 20.0);
    apply_assignment(cfg, "radio.tx_power_dbm", "30");  // --set after the file
    CHECK(cfg.net.radio.tx_power_dbm == 30.0);
    CHECK(cfg.scenario == "p2p");
    std::filesystem::remove(path);
}

TEST_CASE("unknown keys are rejected, not ignored") {
    SimConfig cfg;
    CHECK_THROWS_WITH_AS(apply_assignment(cfg, "radio.tx_pwoer", "30"),
                         doctest::Contains("tx_pwoer"), ConfigError);
    const auto path = write_temp("uwsim_cfg_b.ini", "[radio]\ntx_pwoer=30\n");
    CHECK_THROWS_AS(load_config_file(cfg, path), ConfigError);
    std::filesystem::remove(path);
}

TEST_CASE("type mismatches are named") {
    SimConfig cfg;
    CHECK_THROWS_WITH_AS(apply_assignment(cfg, "run.trials", "many"),
                         doctest::Contains("run.trials"), ConfigError);
    CHECK_THROWS_AS(apply_assignment(cfg, "broadcast.deltas", "0.1,zebra"), ConfigError);
    CHECK_THROWS_AS(apply_assignment(cfg, "radio.receiver", "psychic"), ConfigError);
}

TEST_CASE("missing or unknown scenario fails finalize") {
    SimConfig cfg;
    CHECK_THROWS_AS(cfg.finalize(), ConfigError);
    cfg.scenario = "warp-drive";
    CHECK_THROWS_AS(cfg.finalize(), ConfigError);
    cfg.scenario = "p2p";
    CHECK_NOTHROW(cfg.finalize());
}

TEST_CASE("defaults-only run is valid for every scenario preset") {
    for (const char* name : {"p2p", "routing-grid", "diffusion-unicast", "diffusion-broadcast"}) {
        SimConfig cfg;
        cfg.scenario = name;
        CHECK_NOTHROW(cfg.finalize());
    }
}

TEST_CASE("finalize assembles the channel from the channel keys") {
    SimConfig cfg;
    cfg.scenario = "p2p";
    apply_assignment(cfg, "channel.model", "freespace");
    apply_assignment(cfg, "channel.eta", "2.5");
    apply_assignment(cfg, "channel.fading", "none");
    cfg.finalize();
    CHECK(std::holds_alternative<FreeSpacePathLoss>(cfg.net.channel));
    CHECK(std::get<FreeSpacePathLoss>(cfg.net.channel).eta == 2.5);
    CHECK(cfg.net.fading.kind == FadingModel::Kind::none);

    apply_assignment(cfg, "channel.model", "warped");
    CHECK_THROWS_AS(cfg.finalize(), ConfigError);
}

TEST_CASE("invalid radio settings surface as config errors") {
    SimConfig cfg;
    cfg.scenario = "p2p";
    apply_assignment(cfg, "radio.tx_power_dbm", "35");  // above the 30 dBm ceiling
    CHECK_THROWS_AS(cfg.finalize(), ConfigError);
    apply_assignment(cfg, "radio.max_tx_power_dbm", "40");
    CHECK_NOTHROW(cfg.finalize());
}

TEST_CASE("effective config echo round-trips") {
    SimConfig cfg;
    cfg.scenario = "routing-grid";
    apply_assignment(cfg, "radio.tx_power_dbm", "20");
    apply_assignment(cfg, "routing.periods_s", "5,25");
    const std::string echo = effective_config(cfg);

    SimConfig replay;
    std::istringstream in(echo);
    std::string line;
    while (std::getline(in, line)) {
        const auto eq = line.find('=');
        REQUIRE(eq != std::string::npos);
        apply_assignment(replay, line.substr(0, eq), line.substr(eq + 1));
    }
    CHECK(effective_config(replay) == echo);
}

TEST_CASE("p2p sweep produces 25 distances x 3 powers = 75 rows") {
    SimConfig cfg;
    cfg.scenario = "p2p";
    cfg.trials = 1;
    cfg.p2p_frames = 3;  // keep the sweep cheap; row count is the point
    const auto points = run_scenario_points(cfg);
    CHECK(points.size() == 75);
    CHECK(points.front().label == "d=4;tx=10");
    CHECK(points.back().label == "d=10;tx=30");
}

TEST_CASE("delta sweep yields one row per delta") {
    SimConfig cfg;
    cfg.scenario = "diffusion-broadcast";
    cfg.trials = 1;
    cfg.broadcast_packets = 2;
    apply_assignment(cfg, "broadcast.deltas", "0,0.5,1");
    const auto points = run_scenario_points(cfg);
    REQUIRE(points.size() == 3);
    CHECK(points[0].label == "delta=0");
    CHECK(points[0].success_mean == 0.0);
    CHECK(points[2].success_mean > 0.99);
}

TEST_CASE("run_batch writes the artifact set; reruns are byte-identical") {
    SimConfig cfg;
    cfg.scenario = "p2p";
    cfg.trials = 2;
    cfg.seed = 31;
    cfg.events_log = true;
    cfg.p2p_frames = 20;
    apply_assignment(cfg, "p2p.tx_powers", "30");
    apply_assignment(cfg, "p2p.distance_min", "7.5");
    apply_assignment(cfg, "p2p.distance_max", "8");
    apply_assignment(cfg, "p2p.distance_step", "0.5");

    const auto dir = std::filesystem::temp_directory_path() / "uwsim_batch_test";
    std::filesystem::remove_all(dir);
    cfg.outdir = (dir / "a").string();
    run_batch(cfg);
    cfg.outdir = (dir / "b").string();
    run_batch(cfg);

    for (const char* name : {"summary.csv", "events.csv", "effective_config.txt",
                             "latency_hist.csv"}) {
        std::ifstream fa(dir / "a" / name), fb(dir / "b" / name);
        REQUIRE(fa.good());
        REQUIRE(fb.good());
        std::string sa((std::istreambuf_iterator<char>(fa)), std::istreambuf_iterator<char>());
        std::string sb((std::istreambuf_iterator<char>(fb)), std::istreambuf_iterator<char>());
        if (std::string(name) == "effective_config.txt") {
            CHECK(sa != sb);  // differs only in run.out
        } else {
            CHECK(sa == sb);
            CHECK(!sa.empty());
        }
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("unwritable output directory raises an io error") {
    SimConfig cfg;
    cfg.scenario = "p2p";
    cfg.trials = 1;
    cfg.p2p_frames = 1;
    apply_assignment(cfg, "p2p.tx_powers", "30");
    apply_assignment(cfg, "p2p.distance_max", "4");
    cfg.outdir = "/proc/uwsim_cannot_write_here";
    CHECK_THROWS_AS(run_batch(cfg), IoError);
}

TEST_SUITE_END();
