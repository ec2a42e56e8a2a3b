#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "doctest.h"

#include "dicke_cli/config.hpp"
#include "dicke_cli/runs.hpp"

using namespace dicke::cli;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigDir = DICKE_CONFIG_DIR;

// Small but complete run: J = 2.5, a short time grid and coarse grids.
const char* kSmall = R"({
  "schema_version": 1,
  "model": {"G": 0.5, "G_prime": 0.2, "J": 2.5, "n_max": 60},
  "energy": 2.5,
  "initial_conditions": [
    {"label": "A", "q_a": 0.0, "p_a": 0.5},
    {"label": "B", "q_a": 0.2, "p_a": -0.3}
  ],
  "time_grid": {"t_start": 0.0, "t_end": 12.0, "dt": 0.1},
  "wigner": {"n_theta": 16, "n_phi": 24, "extrema_count": 1},
  "poincare": {"n_crossings": 20}
})";

fs::path scratch(const std::string& name) {
    std::string tmpl = (fs::temp_directory_path() / ("dicke_cli_" + name + "_XXXXXX")).string();
    REQUIRE(mkdtemp(tmpl.data()) != nullptr);
    return tmpl;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string error_of(const std::string& text) {
    try {
        parse_config_text(text, "cfg.json");
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

std::string replace(std::string s, const std::string& from, const std::string& to) {
    const auto pos = s.find(from);
    REQUIRE(pos != std::string::npos);
    return s.replace(pos, from.size(), to);
}

}  // namespace

TEST_CASE("bundled configurations") {
    const auto integrable = parse_config(kConfigDir / "paper_integrable.json");
    CHECK(integrable.model.G == 0.5);
    CHECK(integrable.model.Gp == 0.0);
    CHECK(integrable.model.J.twice() == 21);
    CHECK(integrable.energy == 21.0);
    CHECK(integrable.model.n_max == 120);
    REQUIRE(integrable.initial_conditions.size() == 2);
    CHECK(integrable.initial_conditions[0].label == "I1");
    CHECK(integrable.initial_conditions[1].p_norm == 0.95);
    CHECK(integrable.wigner.policy == SnapshotPolicy::AleExtrema);

    const auto chaotic = parse_config(kConfigDir / "paper_chaotic.json");
    CHECK(chaotic.model.G == 0.5);
    CHECK(chaotic.model.Gp == 0.2);
    CHECK(chaotic.initial_conditions[1].label == "N2");
    CHECK(chaotic.initial_conditions[1].p_norm == -0.28);
}

TEST_CASE("validation errors name the offending field") {
    const std::string base = kSmall;
    CHECK(error_of(replace(base, R"("q_a": 0.0, "p_a": 0.5)", R"("q_a": 1.2, "p_a": 0.5)"))
              .find("initial_conditions[0].q_a") != std::string::npos);
    CHECK(error_of(replace(base, R"("energy": 2.5)", R"("energy": 2.5, "seed": 3)")).find("'seed': unknown key") !=
          std::string::npos);
    CHECK(error_of(replace(base, R"("n_max": 60)", R"("n_max": 60, "Gp": 0.1)")).find("model.Gp") !=
          std::string::npos);
    CHECK(error_of(replace(base, R"("J": 2.5)", R"("J": 2.25)")).find("model.J") != std::string::npos);
    CHECK(error_of(replace(base, R"("G": 0.5)", R"("G": "0.5")")).find("model.G': expected a number") !=
          std::string::npos);
    CHECK(error_of(replace(base, R"("schema_version": 1)", R"("schema_version": 2)")).find("schema_version") !=
          std::string::npos);
    CHECK(error_of(replace(base, R"("label": "B")", R"("label": "A")")).find("duplicate") != std::string::npos);
    CHECK(error_of(replace(base, R"("dt": 0.1)", R"("dt": 0.0)")).find("time_grid.dt") != std::string::npos);
    CHECK(error_of(replace(base, R"("extrema_count": 1)", R"("snapshot_policy": "fixed-times")"))
              .find("wigner.snapshot_times") != std::string::npos);
    CHECK(error_of(replace(base, R"("extrema_count": 1)", R"("snapshot_policy": "everything")"))
              .find("wigner.snapshot_policy") != std::string::npos);

    const std::string empty = error_of(R"({"schema_version": 1, "model": {"G": 0.5, "G_prime": 0, "J": 1},
        "energy": 1, "initial_conditions": []})");
    CHECK(empty.find("at least one initial condition") != std::string::npos);

    const std::string syntax = error_of("{\n  \"schema_version\": 1,\n  \"model\": {\"G\": 0.5,,}\n}");
    CHECK(syntax.find("cfg.json:3:") != std::string::npos);
    CHECK(syntax.find("malformed JSON") != std::string::npos);

    CHECK(error_of(kSmall).empty());
    CHECK_THROWS_AS(parse_config("/nonexistent/run.json"), ConfigError);
}

TEST_CASE("entropy runs are byte-identical and fully listed in the manifest") {
    const auto cfg = parse_config_text(kSmall);
    const auto a = scratch("entropy_a");
    const auto b = scratch("entropy_b");
    const auto ra = run_entropy(cfg, {a, 1, true});
    const auto rb = run_entropy(cfg, {b, 3, true});
    REQUIRE(ra.files.size() == 2);
    CHECK(ra.cutoff_ok);
    for (const auto& f : ra.files) CHECK(slurp(a / f) == slurp(b / f));

    const std::string csv = slurp(a / "entropy_A.csv");
    CHECK(csv.rfind("t,delta_a\n0,", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 122);

    const auto manifest = nlohmann::json::parse(slurp(a / "manifest.json"));
    CHECK(manifest["command"] == "entropy");
    CHECK(manifest["seedless"] == true);
    CHECK(manifest["config_sha256"] == sha256_hex(kSmall));
    CHECK(manifest["cutoff_audit"]["ok"] == true);
    CHECK(manifest["files"].size() == ra.files.size());
    for (const auto& f : manifest["files"])
        CHECK(f["sha256"] == sha256_hex(slurp(a / f["path"].get<std::string>())));
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("sha256 reference value") {
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("wigner snapshots follow the ALE extrema") {
    const auto cfg = parse_config_text(kSmall);
    const auto dir = scratch("wigner");
    const auto r = run_wigner(cfg, {dir, 0, false});
    CHECK(fs::exists(dir / "wigner_A_t0.csv"));
    CHECK(fs::exists(dir / "wigner_A_max1.csv"));
    CHECK(fs::exists(dir / "wigner_summary.csv"));

    std::istringstream grid(slurp(dir / "wigner_A_t0.csv"));
    std::string line;
    std::getline(grid, line);
    CHECK(line.rfind("theta,", 0) == 0);
    CHECK(std::count(line.begin(), line.end(), ',') == 16);
    std::getline(grid, line);
    CHECK(line.rfind("phi,", 0) == 0);
    CHECK(std::count(line.begin(), line.end(), ',') == 24);
    int rows = 0;
    while (std::getline(grid, line)) {
        ++rows;
        CHECK(std::count(line.begin(), line.end(), ',') == 23);
    }
    CHECK(rows == 16);

    const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
    const auto& snaps = manifest["results"]["A"]["snapshots"];
    REQUIRE(snaps.size() >= 2);
    CHECK(snaps[0]["kind"] == "t0");
    CHECK(snaps[0]["mirror_asymmetry"].get<double>() < 1e-10);
    fs::remove_all(dir);
}

TEST_CASE("fixed-times snapshot policy") {
    const auto text = replace(kSmall, R"("extrema_count": 1)", R"("snapshot_policy": "fixed-times", "snapshot_times": [0, 2.5])");
    const auto dir = scratch("fixed");
    run_wigner(parse_config_text(text), {dir, 0, false});
    CHECK(fs::exists(dir / "wigner_A_fixed1.csv"));
    CHECK(fs::exists(dir / "wigner_B_fixed2.csv"));
    CHECK(!fs::exists(dir / "wigner_A_t0.csv"));
    fs::remove_all(dir);
}

TEST_CASE("spectrum and poincare outputs") {
    const auto cfg = parse_config_text(kSmall);
    const auto dir = scratch("spectrum");
    run_spectrum(cfg, {dir, 0, false});
    std::istringstream csv(slurp(dir / "spectrum.csv"));
    std::string line;
    std::getline(csv, line);
    CHECK(line == "index,energy,parity");
    int rows = 0;
    double previous = -1e300;
    while (std::getline(csv, line)) {
        const auto c1 = line.find(',');
        const auto c2 = line.rfind(',');
        const double e = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
        CHECK(e >= previous);
        previous = e;
        const std::string parity = line.substr(c2 + 1);
        CHECK((parity == "1" || parity == "-1"));
        ++rows;
    }
    CHECK(rows == 61 * 6);

    run_poincare(cfg, {dir, 0, false});
    const std::string sec = slurp(dir / "poincare_A.csv");
    CHECK(sec.rfind("t_cross,q_a,p_a\n", 0) == 0);
    CHECK(std::count(sec.begin(), sec.end(), '\n') == 21);
    const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
    CHECK(manifest["results"]["A"]["complete"] == true);
    fs::remove_all(dir);
}

TEST_CASE("component errors carry the run context") {
    const auto text = replace(kSmall, R"("energy": 2.5)", R"("energy": -50.0)");
    const auto dir = scratch("err");
    try {
        run_entropy(parse_config_text(text), {dir, 0, false});
        FAIL("expected an error");
    } catch (const RunError& e) {
        CHECK(std::string(e.what()).find("initial condition A") != std::string::npos);
    }
    fs::remove_all(dir);
}
