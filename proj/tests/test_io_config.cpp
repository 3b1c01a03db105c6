#include <doctest.h>

#include <cstdio>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

#include "rgr/config.hpp"
#include "rgr/io.hpp"

using namespace rgr;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name) : path("/tmp/rgr_test_" + name) {}
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("matrix file round trip is bit exact") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> dist(-1e6, 1e6);
    Matrix m(13, 7);
    for (int i = 0; i < 13; ++i)
        for (int j = 0; j < 7; ++j) m(i, j) = dist(rng);
    m(0, 0) = 1e-308;
    m(1, 1) = -0.0;

    TempFile f("roundtrip.rgr");
    write_matrix(f.path, m);
    Matrix r = read_matrix(f.path);
    REQUIRE(r.rows() == 13);
    REQUIRE(r.cols() == 7);
    for (int i = 0; i < 13; ++i)
        for (int j = 0; j < 7; ++j) {
            const double a = m(i, j), b = r(i, j);
            CHECK(std::memcmp(&a, &b, sizeof a) == 0);
        }
}

TEST_CASE("matrix file header layout") {
    Matrix m(2, 3);
    m << 1, 2, 3, 4, 5, 6;
    TempFile f("header.rgr");
    write_matrix(f.path, m);
    std::ifstream is(f.path, std::ios::binary);
    char magic[4];
    is.read(magic, 4);
    CHECK(std::string(magic, 4) == "RGR1");
    std::uint64_t rows = 0, cols = 0;
    is.read(reinterpret_cast<char*>(&rows), 8);
    is.read(reinterpret_cast<char*>(&cols), 8);
    CHECK(rows == 2);
    CHECK(cols == 3);
    double first = 0.0;
    is.read(reinterpret_cast<char*>(&first), 8);
    CHECK(first == 1.0);  // row-major payload starts with m(0,0)
    is.seekg(0, std::ios::end);
    CHECK(static_cast<std::uint64_t>(is.tellg()) == 4 + 8 + 8 + 8 * rows * cols);
}

TEST_CASE("bad magic is rejected") {
    TempFile f("badmagic.rgr");
    std::ofstream(f.path, std::ios::binary) << "NOPE1234567890123456789";
    CHECK_THROWS_AS(read_matrix(f.path), InvalidDataError);
}

TEST_CASE("truncated payload is rejected") {
    Matrix m = Matrix::Identity(4, 4);
    TempFile f("trunc.rgr");
    write_matrix(f.path, m);
    std::ifstream is(f.path, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    std::ofstream(f.path, std::ios::binary) << bytes.substr(0, bytes.size() - 9);
    CHECK_THROWS_AS(read_matrix(f.path), InvalidDataError);
}

TEST_CASE("csv export uses 17 significant digits") {
    Matrix m(1, 2);
    m << 1.0 / 3.0, 2.0;
    std::ostringstream os;
    write_matrix_csv(os, m);
    std::istringstream is(os.str());
    std::string cell;
    std::getline(is, cell, ',');
    CHECK(std::stod(cell) == 1.0 / 3.0);  // round trip through the text form
}

TEST_CASE("config parses a full experiment") {
    TempFile f("config.json");
    std::ofstream(f.path) << R"({
        "experiment": "t",
        "dataset": {"generator": "advecting_gaussian", "domain": [0, 2.5],
                    "final_time": 1.0, "dx": 0.05, "speed": 1.0, "num_steps": 9},
        "registration": {"grid_rank": 2, "latent_rank": 1, "gamma2": 0.1,
                          "control_counts": [11], "control_steps": 5},
        "forecast": {"split_fraction": 0.5, "ar_order": 1, "ridge": 1e-6}
    })";
    ExperimentConfig cfg = load_config(f.path);
    CHECK(cfg.dataset.generator == "advecting_gaussian");
    CHECK(cfg.registration.grid_rank == 2);
    CHECK(cfg.registration.gamma2 == 0.1);
    REQUIRE(cfg.forecast.has_value());
    CHECK(cfg.forecast->ar_order == 1);
}

TEST_CASE("missing required field names the field") {
    TempFile f("missing.json");
    std::ofstream(f.path) << R"({"dataset": {"generator": "burgers", "final_time": 1.0}})";
    try {
        load_config(f.path);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("dx") != std::string::npos);
    }
}

TEST_CASE("syntax error reports a line number") {
    TempFile f("syntax.json");
    std::ofstream(f.path) << "{\n  \"experiment\": \"x\",\n  !!!\n}";
    try {
        load_config(f.path);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find(":3") != std::string::npos);
    }
}

TEST_CASE("invalid values are rejected with their field names") {
    TempFile f("bad.json");
    std::ofstream(f.path) << R"({
        "dataset": {"generator": "rotated_glyph", "size": 4}
    })";
    CHECK_THROWS_AS(load_config(f.path), ConfigError);

    std::ofstream(f.path) << R"({
        "dataset": {"generator": "advecting_gaussian", "final_time": 1.0,
                    "dx": 0.05, "speed": 1.0, "num_steps": 9},
        "registration": {"interp_degree": 2}
    })";
    CHECK_THROWS_AS(load_config(f.path), ConfigError);
}
