#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "mipdc/pipeline.hpp"
#include "support.hpp"

#include <fstream>
#include <sstream>

using namespace mipdc;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Small, fast scenario: 4 channels, unfiltered, few CV repeats.
ConfigStore small_store(const fs::path& out) {
    auto store = ConfigStore::from_ini_text(R"(
seed = 3
[preprocess]
enabled = false
[synth]
channels = 4
epochs_per_class = 12
class1_edges = 0>1:0.4
rhythm.channel = 2
[svm]
repeats = 5
[mvar]
aic_max_order = 6
)");
    store.set("output.dir", out.string());
    return store;
}

std::size_t csv_rows(const fs::path& p) {
    std::ifstream in(p);
    std::size_t n = 0;
    for (std::string line; std::getline(in, line);) ++n;
    return n;
}

}  // namespace

TEST_CASE("ini parsing") {
    const auto s = ConfigStore::from_ini_text("top = 1\n# comment\n; also\n[grid]\nlow = 4 \n  high=40\n[bands]\nmu = 8-13\n");
    CHECK(s.get_int("top", 0) == 1);
    CHECK(s.get_double("grid.low", 0) == 4.0);
    CHECK(s.get_double("grid.high", 0) == 40.0);
    CHECK(s.keys_in("bands") == std::vector<std::string>{"mu"});
    CHECK(s.get_string("missing", "dflt") == "dflt");
    CHECK_THROWS_AS(ConfigStore::from_ini_text("[grid\nlow=1\n"), ContractError);
    CHECK_THROWS_AS(ConfigStore::from_ini_text("novalue\n"), ContractError);
    auto t = s;
    t.set("grid.low=6");
    CHECK(t.get_double("grid.low", 0) == 6.0);
    CHECK_THROWS_AS(t.set("nokey"), ContractError);
    t.set("x", "abc");
    CHECK_THROWS(t.get_double("x", 0));
    CHECK_THROWS_AS(ConfigStore::from_file("/no/such/file.ini"), IoError);
}

TEST_CASE("defaults resolve and are recorded") {
    const auto c = resolve_config(ConfigStore{});
    CHECK(c.grid().size() == 23);
    REQUIRE(c.bands.size() == 2);
    CHECK(c.bands[0].name == "alpha");
    CHECK(c.bands[1].band.high_hz == 30.0);
    CHECK(c.svm_c == 512.0);
    CHECK(c.svm_gamma == 0.002);
    CHECK(c.svm_repeats == 100);
    CHECK(c.screen_alpha == 0.001);
    CHECK(c.preprocess.enabled);
    CHECK(c.preprocess.notch_center_hz == 50.0);
    CHECK(c.synth.n_channels == 16);
    CHECK(c.synth.rhythm.channel == 13);
    REQUIRE(c.synth.class1_edges.size() == 1);
    CHECK(c.resolved.get_string("svm.c", "") == "512");
    CHECK(c.resolved.get_string("bands.beta", "") == "13-30");
}

TEST_CASE("invalid settings are rejected") {
    for (const char* bad : {"svm.c=-1", "grid.low=40", "bands.x=2-90", "screen.alpha=0", "synth.rhythm.channel=XX",
                            "input.format=wav", "svm.split=1"}) {
        INFO(std::string(bad));
        ConfigStore s;
        s.set(bad);
        CHECK_THROWS_AS(resolve_config(s), Error);
    }
    testing::TempDir dir("pipe");
    ConfigStore s;
    s.set("synth.class1_edges=CZ>CZ:0.2");
    s.set("output.dir", dir.path().string());
    CHECK_THROWS_AS(run_command(Command::Synth, resolve_config(s)), StageError);
}

TEST_CASE("all writes the documented artifacts") {
    testing::TempDir dir("pipe");
    const auto config = resolve_config(small_store(dir.path()));
    const auto report = run_command(Command::All, config);
    for (const char* f : {"report.json", "synth.csv", "synth.events.csv", "synth.truth.json", "rsq_map.csv", "rsq_map.svg",
                          "edges_alpha.csv", "edges_beta.csv", "edges_alpha.svg", "flows_beta_class1.csv", "flows_beta.svg"})
        CHECK_MESSAGE(fs::exists(dir / f), f);
    CHECK(report.at("command") == "all");
    CHECK(report.at("config").at("svm.repeats") == "5");
    CHECK(report.at("power").at("cv").at("per_repeat").size() == 5);
    CHECK(report.at("connectivity").at("epochs").at("class1") == 12);
    CHECK(csv_rows(dir / "rsq_map.csv") == 5);

    const auto on_disk = nlohmann::json::parse(slurp(dir / "report.json"));
    CHECK(on_disk == report);

    const std::string svg = slurp(dir / "edges_alpha.svg");
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);
}

TEST_CASE("alpha one keeps every directed pair") {
    testing::TempDir dir("pipe");
    auto store = small_store(dir.path());
    store.set("screen.alpha", "1");
    const auto report = run_command(Command::Connectivity, resolve_config(store));
    CHECK(report.at("connectivity").at("bands").at("alpha").at("n_edges") == 12);
    CHECK(csv_rows(dir / "edges_beta.csv") == 13);
}

TEST_CASE("reports re-run to identical outputs") {
    testing::TempDir a("pipe"), b("pipe");
    const auto first = run_command(Command::All, resolve_config(small_store(a.path())));
    auto again = ConfigStore::from_file(a / "report.json");
    again.set("output.dir", b.path().string());
    run_command(Command::All, resolve_config(again));
    for (const char* f : {"rsq_map.csv", "edges_alpha.csv", "flows_alpha_class2.csv", "synth.csv"})
        CHECK_MESSAGE(slurp(a / f) == slurp(b / f), f);
    auto second = nlohmann::json::parse(slurp(b / "report.json"));
    second["config"]["output.dir"] = first["config"]["output.dir"];
    CHECK(second == first);
}

TEST_CASE("failures map to exit codes and clean up") {
    testing::TempDir dir("pipe");
    {
        std::ofstream keep(dir / "keep.txt");
        keep << "x";
    }
    auto store = small_store(dir.path());
    store.set("input.signal", (dir / "absent.csv").string());
    try {
        run_command(Command::Power, resolve_config(store));
        FAIL("expected StageError");
    } catch (const StageError& e) {
        CHECK(e.exit_code() == 2);
        CHECK(e.stage() == "load");
    }

    // One-class input fails after loading.
    {
        std::ofstream sig(dir / "one.csv");
        sig << "a,b\n";
        for (int k = 0; k < 2400; ++k) sig << (k % 7) << "," << (k % 5) << "\n";
        std::ofstream ev(dir / "one.events.csv");
        ev << "start,end,label\n0,2400,1\n";
    }
    store.set("input.signal", (dir / "one.csv").string());
    try {
        run_command(Command::All, resolve_config(store));
        FAIL("expected StageError");
    } catch (const StageError& e) {
        CHECK(e.exit_code() == 1);
    }
    CHECK(fs::exists(dir / "keep.txt"));
    CHECK_FALSE(fs::exists(dir / "report.json"));
}
