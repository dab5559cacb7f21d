#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "tplcov/io.hpp"
#include "tplcov/simulate.hpp"

namespace fs = std::filesystem;
using tplcov::cli::run;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        std::random_device rd;
        path = fs::temp_directory_path() / ("tplcov_cli_" + std::to_string(rd()) + std::to_string(rd()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

struct Outcome {
    int code;
    std::string out, err;
};

Outcome call(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_correlated_csv(const std::string& path) {
    tplcov::SymMatrix t = tplcov::SymMatrix::identity(2);
    t(0, 1) = 0.5;
    tplcov::Rng rng = tplcov::make_stream(77, {});
    std::ofstream os(path);
    tplcov::write_data_csv(os, tplcov::sample_mvn(t, 250, rng));
}

void check_summary(const nlohmann::json& j) {
    CHECK(j.at("schema") == 1);
    for (const char* key : {"p", "n", "lambda_hat", "support_size", "sweeps_total", "kkt_residual"}) {
        REQUIRE(j.contains(key));
        CHECK(j.at(key).is_number());
        CHECK(std::isfinite(j.at(key).get<double>()));
    }
    CHECK(j.at("converged").is_boolean());
    CHECK(j.at("centered").is_boolean());
    CHECK(j.contains("gamma"));
    CHECK(j.contains("alpha"));
}

}  // namespace

TEST_CASE("estimate on correlated data selects the pair") {
    TempDir dir;
    write_correlated_csv(dir / "d.csv");
    const auto r = call({"estimate", "--input", dir / "d.csv", "--output", dir / "e.csv",
                         "--summary", dir / "s.json", "--alpha", "0.1"});
    REQUIRE(r.code == 0);
    const tplcov::DataMatrix d = tplcov::read_data_csv_file(dir / "d.csv");
    const tplcov::SymMatrix s = tplcov::sample_covariance(d);
    const std::string est = slurp(dir / "e.csv");
    CHECK(est.rfind("j,k,value\n", 0) == 0);
    CHECK(est.find("1,2," + tplcov::format_number(s(0, 1)) + "\n") != std::string::npos);
    const auto j = nlohmann::json::parse(slurp(dir / "s.json"));
    check_summary(j);
    CHECK(j.at("support_size") == 1);
    CHECK(j.at("alpha") == 0.1);
    CHECK(j.at("gamma").get<double>() == doctest::Approx(2.7055435));
}

TEST_CASE("estimate flag handling") {
    TempDir dir;
    write_correlated_csv(dir / "d.csv");
    CHECK(call({"estimate", "--input", dir / "d.csv", "--output", dir / "e.csv", "--alpha", "0.1",
                "--lambda", "1"})
              .code == 64);

    const auto big = call({"estimate", "--input", dir / "d.csv", "--output", dir / "e.csv",
                           "--lambda", "1e18", "--format", "dense"});
    REQUIRE(big.code == 0);
    const auto j = nlohmann::json::parse(big.out);
    check_summary(j);
    CHECK(j.at("support_size") == 0);
    CHECK(j.at("gamma").is_null());
    std::istringstream dense(slurp(dir / "e.csv"));
    std::string row1, row2;
    std::getline(dense, row1);
    std::getline(dense, row2);
    CHECK(row1.substr(row1.find(',')) == ",0");
    CHECK(row2.substr(0, row2.find(',')) == "0");

    CHECK(call({"estimate", "--input", dir / "d.csv", "--output", dir / "e.csv", "--format", "xml"})
              .code == 64);
    CHECK(call({"estimate", "--input", dir / "missing.csv", "--output", dir / "e.csv"}).code == 2);
    CHECK(call({"frobnicate"}).code == 64);
}

TEST_CASE("malformed csv is a data error with a line number") {
    TempDir dir;
    std::ofstream(dir / "bad.csv") << "x1,x2\n1,2\n3,oops\n";
    const auto r = call({"estimate", "--input", dir / "bad.csv", "--output", dir / "e.csv"});
    CHECK(r.code == 2);
    CHECK(r.err.find("line 3") != std::string::npos);
}

TEST_CASE("collinear data is a numeric error") {
    TempDir dir;
    std::ofstream(dir / "col.csv") << "1,2\n2,4\n-1,-2\n";
    CHECK(call({"estimate", "--input", dir / "col.csv", "--output", dir / "e.csv"}).code == 3);
}

TEST_CASE("simulate is deterministic and round-trips through estimate") {
    TempDir dir;
    const std::vector<std::string> base{"simulate", "--structure", "block", "--p", "20",
                                        "--n", "100", "--tau", "0.9", "--seed", "7"};
    auto a = base;
    a.insert(a.end(), {"--out", dir / "d1.csv", "--truth", dir / "t1.csv"});
    auto b = base;
    b.insert(b.end(), {"--out", dir / "d2.csv", "--truth", dir / "t2.csv"});
    REQUIRE(call(a).code == 0);
    REQUIRE(call(b).code == 0);
    CHECK(slurp(dir / "d1.csv") == slurp(dir / "d2.csv"));
    CHECK(slurp(dir / "t1.csv") == slurp(dir / "t2.csv"));

    const auto est = call({"estimate", "--input", dir / "d1.csv", "--output", dir / "e.csv"});
    REQUIRE(est.code == 0);
    const auto j = nlohmann::json::parse(est.out);
    check_summary(j);
    CHECK(j.at("p") == 20);
    CHECK(j.at("n") == 100);
}

TEST_CASE("simulate rejects bad ranges") {
    TempDir dir;
    CHECK(call({"simulate", "--tau", "1.5", "--out", dir / "d.csv", "--truth", dir / "t.csv"}).code == 64);
    CHECK(call({"simulate", "--structure", "banded", "--out", dir / "d.csv", "--truth", dir / "t.csv"}).code == 64);
    CHECK(call({"simulate", "--p", "1", "--out", dir / "d.csv", "--truth", dir / "t.csv"}).code == 64);
}

TEST_CASE("simulate with an empty graph writes only diagonal triplets") {
    TempDir dir;
    bool found = false;
    for (int seed = 0; seed < 50 && !found; ++seed) {
        REQUIRE(call({"simulate", "--structure", "random", "--p", "10", "--n", "20", "--tau", "0.999",
                      "--seed", std::to_string(seed), "--out", dir / "d.csv", "--truth", dir / "t.csv"})
                    .code == 0);
        std::istringstream in(slurp(dir / "t.csv"));
        std::string line;
        std::getline(in, line);
        int rows = 0;
        bool diagonal = true;
        while (std::getline(in, line)) {
            ++rows;
            const auto c1 = line.find(',');
            const auto c2 = line.find(',', c1 + 1);
            if (line.substr(0, c1) != line.substr(c1 + 1, c2 - c1 - 1)) diagonal = false;
        }
        if (diagonal) {
            found = true;
            CHECK(rows == 10);
        }
    }
    CHECK(found);
}

TEST_CASE("benchmark single cell and thread invariance") {
    TempDir dir;
    const std::vector<std::string> base{"benchmark", "--p", "20", "--n", "100", "--tau", "0.9",
                                        "--structure", "block", "--reps", "20", "--seed", "1"};
    auto one = base;
    one.insert(one.end(), {"--threads", "1", "--out-dir", dir / "t1"});
    auto eight = base;
    eight.insert(eight.end(), {"--threads", "8", "--out-dir", dir / "t8"});
    const auto r1 = call(one);
    const auto r8 = call(eight);
    REQUIRE(r1.code == 0);
    REQUIRE(r8.code == 0);
    CHECK(r1.out == r8.out);
    const std::string results = slurp(dir / "t1/results.csv");
    CHECK(results == slurp(dir / "t8/results.csv"));
    CHECK(slurp(dir / "t1/replicates.csv") == slurp(dir / "t8/replicates.csv"));
    CHECK(std::count(results.begin(), results.end(), '\n') == 2);
    CHECK(r1.out.find("block") != std::string::npos);
}

TEST_CASE("benchmark profile flags") {
    TempDir dir;
    CHECK(call({"benchmark", "--profile", "desk", "--p", "20", "--out-dir", dir / "x"}).code == 64);
    CHECK(call({"benchmark", "--profile", "huge", "--out-dir", dir / "x"}).code == 64);
    CHECK(call({"benchmark", "--tau", "2", "--out-dir", dir / "x"}).code == 64);
    const auto r = call({"benchmark", "--profile", "desk", "--reps", "1", "--out-dir", dir / "desk"});
    REQUIRE(r.code == 0);
    const std::string results = slurp(dir / "desk/results.csv");
    CHECK(std::count(results.begin(), results.end(), '\n') == 25);
}
