#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "afslab/experiment.hpp"
#include "afslab/io.hpp"
#include "afslab/rng.hpp"

using namespace afslab;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("afslab_test_" + std::to_string(hash_seed(reinterpret_cast<std::uintptr_t>(this))));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("csv round trip preserves doubles exactly") {
    TempDir tmp;
    Rng rng(1);
    Matrix m(7, 4);
    for (int i = 0; i < 7; ++i) {
        for (int j = 0; j < 4; ++j) m(i, j) = rng.normal() * std::pow(10.0, (i * 4 + j) % 13 - 6);
    }
    m(0, 0) = 0.0;
    m(1, 1) = -1e-300;
    m(2, 2) = 12345678901234.5;

    const fs::path file = tmp.path / "m.csv";
    write_csv(file, m, {"a", "b", "c", "d"});
    const CsvContent back = read_csv(file);
    REQUIRE(back.values.rows() == 7);
    REQUIRE(back.header.size() == 4);
    CHECK(back.header[2] == "c");
    CHECK(back.values == m);

    // headerless round trip
    write_csv(file, m);
    const CsvContent plain = read_csv(file);
    CHECK(plain.header.empty());
    CHECK(plain.values == m);
}

TEST_CASE("csv reader rejects ragged input") {
    TempDir tmp;
    const fs::path file = tmp.path / "bad.csv";
    write_text(file, "1,2,3\n4,5\n");
    CHECK_THROWS_AS(read_csv(file), ConfigError);
}

TEST_CASE("pgm writer emits a valid plain header and full gray range") {
    TempDir tmp;
    Matrix m(2, 3);
    m << 0.0, 0.5, 1.0, 1.0, std::numeric_limits<double>::quiet_NaN(), 0.25;
    const fs::path file = tmp.path / "img.pgm";
    write_pgm(file, m);
    std::ifstream in(file);
    std::string magic;
    int w, h, maxval;
    in >> magic >> w >> h >> maxval;
    CHECK(magic == "P2");
    CHECK(w == 3);
    CHECK(h == 2);
    CHECK(maxval == 255);
    std::vector<int> pixels(6);
    for (int& p : pixels) in >> p;
    CHECK(pixels[0] == 0);
    CHECK(pixels[2] == 255);
    CHECK(pixels[4] == 0);  // NaN renders black
}

TEST_CASE("experiment config loads canned scenarios with defaults") {
    TempDir tmp;
    const fs::path cfg = tmp.path / "cfg.json";
    write_text(cfg, R"({"scenario": "two_comp_plain", "out_dir": "somewhere"})");
    const ExperimentConfig c = load_config(cfg, {});
    CHECK(c.scenario.tag == "two_comp_plain");
    CHECK(c.scenario.components.size() == 2);
    CHECK(c.resolved_steps() == 201);
    CHECK(c.x_list.size() == 9);
    CHECK(c.grid_auto);
}

TEST_CASE("cli overrides beat the config file") {
    TempDir tmp;
    const fs::path cfg = tmp.path / "cfg.json";
    write_text(cfg, R"({"scenario": "three_comp_plain", "seed": 5, "threads": 2})");
    CliOverrides ov;
    ov.out_dir = (tmp.path / "cli_out").string();
    ov.threads = 3;
    ov.seed = 99;
    const ExperimentConfig c = load_config(cfg, ov);
    CHECK(c.scenario.seed == 99);
    CHECK(c.threads == 3);
    CHECK(c.out_dir == tmp.path / "cli_out");
    CHECK(c.resolved_steps() == 81);
}

TEST_CASE("config errors name the offending field") {
    TempDir tmp;
    const fs::path cfg = tmp.path / "cfg.json";

    write_text(cfg, R"({"out_dir": "x"})");
    CHECK_THROWS_WITH_AS(load_config(cfg, {}), doctest::Contains("scenario"), ConfigError);

    write_text(cfg, R"({"scenario": "no_such_scenario"})");
    CHECK_THROWS_AS(load_config(cfg, {}), ConfigError);

    write_text(cfg, R"({"scenario": "two_comp_plain", "x_list": [0.5, 0.25]})");
    CHECK_THROWS_WITH_AS(load_config(cfg, {}), doctest::Contains("x_list"), ConfigError);

    // custom scenario with a component spectrum outside the channel range
    const fs::path scen = tmp.path / "scen.json";
    write_text(scen, R"({
      "n_scans": 30, "n_channels": 8, "seed": 1,
      "components": [
        {"elution": {"amplitude": 10, "center": 15, "sigma": 3, "tau": 1},
         "spectrum": {"peaks": [[9, 1.0]]}}
      ]})");
    write_text(cfg, R"({"scenario": {"custom": "scen.json"}})");
    const ExperimentConfig c = load_config(cfg, {});
    CHECK_THROWS_WITH_AS(cmd_simulate(c), doctest::Contains("channel"), ConfigError);
}

TEST_CASE("cmd_simulate writes a self-consistent dataset") {
    TempDir tmp;
    const fs::path cfg = tmp.path / "cfg.json";
    write_text(cfg, R"({"scenario": "two_comp_overlap"})");
    CliOverrides ov;
    ov.out_dir = (tmp.path / "out").string();
    const ExperimentConfig c = load_config(cfg, ov);
    cmd_simulate(c);

    // D and S_true carry numeric channel-index headers
    const Matrix D = read_csv(tmp.path / "out" / "D.csv", CsvHeader::require).values;
    const Matrix C = read_csv(tmp.path / "out" / "C_true.csv", CsvHeader::none).values;
    const Matrix S = read_csv(tmp.path / "out" / "S_true.csv", CsvHeader::require).values;
    CHECK((D - C * S).cwiseAbs().maxCoeff() == 0.0);

    // overlap scenario: at least one channel shared between components
    bool shared = false;
    for (Eigen::Index j = 0; j < S.cols(); ++j) {
        if (S(0, j) > 0.0 && S(1, j) > 0.0) shared = true;
    }
    CHECK(shared);
}

TEST_CASE("cmd_simulate reruns are byte-identical") {
    TempDir tmp;
    const fs::path cfg = tmp.path / "cfg.json";
    write_text(cfg, R"({"scenario": "two_comp_plain", "seed": 77})");
    CliOverrides ov1, ov2;
    ov1.out_dir = (tmp.path / "a").string();
    ov2.out_dir = (tmp.path / "b").string();
    cmd_simulate(load_config(cfg, ov1));
    cmd_simulate(load_config(cfg, ov2));
    for (const char* name : {"D.csv", "C_true.csv", "S_true.csv", "meta.json"}) {
        CHECK(read_text(tmp.path / "a" / name) == read_text(tmp.path / "b" / name));
    }
}

TEST_CASE("matched_cosines pairs permuted spectra correctly") {
    Matrix S_true(2, 5);
    S_true << 1.0, 0.2, 0.0, 0.0, 0.0, 0.0, 0.0, 0.5, 1.0, 0.0;
    Matrix swapped(2, 5);
    swapped.row(0) = S_true.row(1);
    swapped.row(1) = S_true.row(0);
    const auto cos = matched_cosines(swapped, S_true);
    CHECK(cos[0] == doctest::Approx(1.0));
    CHECK(cos[1] == doctest::Approx(1.0));
}
