#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "mgsim/config.hpp"
#include "mgsim/scenario.hpp"

using namespace mgsim;

namespace {

std::filesystem::path write_temp(const std::string& name, const std::string& text) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream out(path);
    out << text;
    return path;
}

}  // namespace

TEST_CASE("defaults are complete and self-consistent") {
    const Config c;
    CHECK(c.get_f64("plant.dt") == 1e-5);
    CHECK(c.get_f64("ctrl.f_star") == 50.0);
    CHECK(c.get_u64("run.seed") == 1);
    CHECK(c.get_bool("scenario.breaker2_closed"));
    CHECK(c.get_str("scenario.preset").empty());
    for (const auto& e : Config::schema()) CHECK(c.is_default(e.key));

    // defaults must produce a valid scenario out of the box
    CHECK_NOTHROW(make_scenario(c).validate());
}

TEST_CASE("set parses by declared type and rejects junk") {
    Config c;

    SUBCASE("float accepts scientific notation") {
        c.set("plant.r_load", "1.5875e2");
        CHECK(c.get_f64("plant.r_load") == 158.75);
        CHECK_FALSE(c.is_default("plant.r_load"));
    }
    SUBCASE("unknown key names itself") {
        CHECK_THROWS_WITH_AS(c.set("plant.bogus", "1"), doctest::Contains("plant.bogus"),
                             ConfigError);
    }
    SUBCASE("malformed float names the key") {
        CHECK_THROWS_WITH_AS(c.set("plant.dt", "fast"), doctest::Contains("plant.dt"), ConfigError);
    }
    SUBCASE("trailing garbage is not a number") {
        CHECK_THROWS_AS(c.set("plant.dt", "1e-5x"), ConfigError);
    }
    SUBCASE("bool accepts only true/false") {
        c.set("run.noise_enabled", "true");
        CHECK(c.get_bool("run.noise_enabled"));
        CHECK_THROWS_AS(c.set("run.noise_enabled", "1"), ConfigError);
    }
    SUBCASE("unsigned rejects negatives") {
        CHECK_THROWS_AS(c.set("run.seed", "-3"), ConfigError);
    }
    SUBCASE("typed getter refuses the wrong type") {
        CHECK_THROWS_AS(c.get_f64("run.seed"), ConfigError);
    }
    SUBCASE("key=value override form") {
        c.set_kv("metrics.restore_threshold=25");
        CHECK(c.get_f64("metrics.restore_threshold") == 25.0);
        CHECK_THROWS_AS(c.set_kv("no-equals-sign"), ConfigError);
    }
}

TEST_CASE("serialize round-trips byte-identically") {
    Config c;
    c.set("plant.r_load", "39.675");
    c.set("chan.delay_s", "0.05");
    c.set("run.seed", "42");
    c.set("sweep.axis1_key", "qshare.k_iq");
    c.set("sweep.axis1_values", "0.001,0.003,0.009");

    const std::string text = c.serialize();
    const auto path = write_temp("mgsim_cfg_roundtrip.cfg", text);
    const Config back = Config::load_file(path.string());
    CHECK(back.serialize() == text);
    std::filesystem::remove(path);
}

TEST_CASE("file loading reports the offending line") {
    SUBCASE("comments and blank lines are skipped") {
        const auto path = write_temp("mgsim_cfg_ok.cfg",
                                     "# comment\n"
                                     "\n"
                                     "plant.r_load = 50\n"
                                     "  run.seed=9  \n");
        const Config c = Config::load_file(path.string());
        CHECK(c.get_f64("plant.r_load") == 50.0);
        CHECK(c.get_u64("run.seed") == 9);
        std::filesystem::remove(path);
    }
    SUBCASE("bad line is identified by number") {
        const auto path = write_temp("mgsim_cfg_bad.cfg", "plant.r_load = 50\nwhat is this\n");
        CHECK_THROWS_WITH_AS(Config::load_file(path.string()), doctest::Contains(":2"),
                             ConfigError);
        std::filesystem::remove(path);
    }
    SUBCASE("missing file throws") {
        CHECK_THROWS_AS(Config::load_file("/nonexistent/nowhere.cfg"), ConfigError);
    }
}

TEST_CASE("float canonicalization is shortest round-trip text") {
    CHECK(Config::format_f64(0.05) == "0.05");
    CHECK(Config::format_f64(1e-5) == "1e-05");
    CHECK(Config::format_f64(-230.0) == "-230");
    Config c;
    c.set("chan.delay_s", "0.0500");
    c.set("plant.dt", "0.00001");
    const std::string text = c.serialize();
    CHECK(text.find("chan.delay_s = 0.05\n") != std::string::npos);
    CHECK(text.find("plant.dt = 1e-05\n") != std::string::npos);
}

TEST_CASE("double list parsing") {
    const auto v = parse_double_list("1,2.5,3e-4", "axis");
    REQUIRE(v.size() == 3);
    CHECK(v[0] == 1.0);
    CHECK(v[1] == 2.5);
    CHECK(v[2] == 3e-4);
    CHECK_THROWS_WITH_AS(parse_double_list("1,,2", "axis"), doctest::Contains("axis"), ConfigError);
    CHECK_THROWS_AS(parse_double_list("1,two", "axis"), ConfigError);
    CHECK(parse_double_list("", "axis").empty());
}

TEST_CASE("scenario assembly catches cross-field mistakes") {
    SUBCASE("control period must be a multiple of the plant step") {
        Config c;
        c.set("plant.dt", "3e-5");  // 5e-5 / 3e-5 is not integral
        CHECK_THROWS_AS(make_scenario(c).validate(), ConfigError);
    }
    SUBCASE("sync start requires an open breaker") {
        Config c;
        c.set("scenario.sync_start_t", "1");
        CHECK_THROWS_AS(make_scenario(c).validate(), ConfigError);
    }
    SUBCASE("event inside the soft-start ramp is rejected") {
        Config c;
        c.set("scenario.t_event", "0.1");
        c.set("scenario.softstart", "0.25");
        CHECK_THROWS_AS(make_scenario(c).validate(), ConfigError);
    }
    SUBCASE("event after the end is rejected") {
        Config c;
        c.set("scenario.t_event", "10");
        c.set("scenario.t_end", "6");
        CHECK_THROWS_AS(make_scenario(c).validate(), ConfigError);
    }
    SUBCASE("presets expand to valid scenarios") {
        for (const char* name : {"e1", "e2", "e3", "e4", "e5", "sync"}) {
            Config c = preset_config(name);
            CHECK_NOTHROW(make_scenario(c).validate());
        }
        CHECK_THROWS_AS(preset_config("e9"), ConfigError);
    }
}
