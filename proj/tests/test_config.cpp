#include <catch2/catch_amalgamated.hpp>

#include "mwradar/config.hpp"

using namespace mwradar;

TEST_CASE("defaults reproduce the reference setting") {
    ConfigDocument cfg;
    CHECK(cfg.nu == 0.25);
    CHECK(cfg.nu_clutter == 0.23);
    CHECK(cfg.t_shape == 3.0);
    CHECK(cfg.sigma2 == 1.0);
    CHECK(cfg.snr_db == -10.0);
    CHECK(cfg.pfa_nominal == 1e-4);
    CHECK(cfg.rho_abs_grid == std::vector<double>{0.3, 0.7, 0.9});
    CHECK(cfg.trials_h0 == 1000000);
    CHECK(cfg.innovation == "complex_t");
    CHECK_NOTHROW(cfg.validate());

    const Scenario sc = cfg.make_single_scenario();
    CHECK(sc.n() == 2500);
    CHECK_THAT(std::abs(sc.clutter.rho), Catch::Matchers::WithinRel(0.7, 1e-12));
}

TEST_CASE("presets") {
    ConfigDocument cfg;
    cfg.apply_preset(Preset::desk);
    CHECK(cfg.pfa_nominal == 1e-2);
    CHECK(cfg.trials_h0 == 100000);
    CHECK(cfg.trials_h1 == 10000);
    cfg.apply_preset(Preset::paper);
    CHECK(cfg.pfa_nominal == 1e-4);
    CHECK(cfg.trials_h0 == 1000000);
    CHECK(cfg.trials_h1 == 1000000);
}

TEST_CASE("round trip is the identity") {
    ConfigDocument cfg;
    cfg.m = 12;
    cfg.rho_abs = 0.55;
    cfg.innovation = "gaussian";
    cfg.target_phase = 0.25;
    cfg.m_grid = {8, 12};
    cfg.base_seed = 987654321;

    const auto j1 = cfg.to_json();
    const ConfigDocument back = ConfigDocument::from_json(j1);
    const auto j2 = back.to_json();
    CHECK(j1.dump() == j2.dump());

    // null target_phase survives the trip too
    ConfigDocument def;
    const ConfigDocument def2 = ConfigDocument::from_json(def.to_json());
    CHECK_FALSE(def2.target_phase.has_value());
    CHECK(def.to_json().dump() == def2.to_json().dump());
}

TEST_CASE("unknown keys are rejected with their path") {
    auto j = ConfigDocument{}.to_json();
    j["scenario"]["bogus"] = 1;
    try {
        ConfigDocument::from_json(j);
        FAIL("expected validation_error");
    } catch (const validation_error& e) {
        CHECK(std::string(e.what()).find("scenario.bogus") != std::string::npos);
    }

    auto j2 = ConfigDocument{}.to_json();
    j2["extra_top"] = nlohmann::json::object();
    CHECK_THROWS_AS(ConfigDocument::from_json(j2), validation_error);
}

TEST_CASE("physical constraints are revalidated on load") {
    auto check_rejected = [](auto mutate) {
        auto j = ConfigDocument{}.to_json();
        mutate(j);
        CHECK_THROWS_AS(ConfigDocument::from_json(j), validation_error);
    };
    check_rejected([](auto& j) { j["campaign"]["pfa_nominal"] = 1.5; });
    check_rejected([](auto& j) { j["scenario"]["rho_abs"] = 1.0; });
    check_rejected([](auto& j) { j["scenario"]["t_shape"] = 1.0; });
    check_rejected([](auto& j) { j["scenario"]["m"] = 0; });
    check_rejected([](auto& j) { j["scenario"]["sigma2"] = -1.0; });
    check_rejected([](auto& j) { j["scenario"]["innovation"] = "laplace"; });
    check_rejected([](auto& j) { j["campaign"]["m_grid"] = std::vector<int>{}; });
    check_rejected([](auto& j) { j["scenario"]["burn_in"] = -5; });
    check_rejected([](auto& j) { j["scenario"]["m"] = "fifty"; });
}

TEST_CASE("load reports missing files and bad JSON distinctly") {
    CHECK_THROWS_AS(ConfigDocument::load("/nonexistent/config.json"), io_error);
}
