#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "json.hpp"
#include "tdheston/cli.hpp"
#include "tdheston/io.hpp"

using namespace tdh;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

class Dir {
public:
    Dir() : path_(fs::temp_directory_path() / ("tdheston_cli_" + std::to_string(::getpid()))) {
        fs::create_directories(path_);
    }
    ~Dir() { fs::remove_all(path_); }
    std::string write(const std::string& name, const std::string& text) const {
        const fs::path p = path_ / name;
        std::ofstream(p) << text;
        return p.string();
    }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    fs::path path_;
};

const char* kConstant = R"({"kappa": [0, 2], "theta": [0, 0.04], "eta": [0, 0.3], "rho": [0, -0.5], "v0": 0.04, "T": 1})";
const char* kMarket = R"({"spot": 100, "rate": 0.01, "maturity": 1, "strike": 100})";

}  // namespace

TEST_CASE("price emits JSON") {
    Dir d;
    const Run r = run({"price", "--params", d.write("p.json", kConstant), "--market", d.write("m.json", kMarket)});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["call"].get<double>() > 8.0);
    CHECK(j["call"].get<double>() < 8.4);
    CHECK(j["route"] == "auto");
    CHECK(run({"price", "--params", d.file("p.json"), "--market", d.file("m.json")}).out == r.out);
}

TEST_CASE("input errors exit 1") {
    Dir d;
    const Run missing = run({"price", "--params", "/no/such/params.json", "--market", d.write("m.json", kMarket)});
    CHECK(missing.code == 1);
    CHECK(missing.err.find("/no/such/params.json") != std::string::npos);

    const Run mismatch =
        run({"price", "--params", d.write("p.json", kConstant), "--market", d.file("m.json"), "--route", "heun"});
    CHECK(mismatch.code == 1);
    CHECK(mismatch.err.find("route") != std::string::npos);

    CHECK(run({"price", "--route", "fft"}).code == 1);
    CHECK(run({"frobnicate"}).code == 1);
    CHECK(run({}).code == 1);
    CHECK(run({"price", "--params", d.file("p.json")}).code == 1);  // no market

    const std::string bad = d.write("bad.json", R"({"kappa": [0, 2], "theta": [0, 0.04], "eta": [0, 0.3], "rho": [0, -1.5]})");
    const Run invalid = run({"price", "--params", bad, "--market", d.file("m.json")});
    CHECK(invalid.code == 1);
    CHECK(invalid.err.find("rho") != std::string::npos);
}

TEST_CASE("smile emits CSV that parses back") {
    Dir d;
    const std::string out = d.file("smile.csv");
    const Run r = run({"smile", "--params", d.write("p.json", kConstant), "--market", d.write("m.json", kMarket),
                       "--strikes", "90,100,110", "--out", out});
    REQUIRE(r.code == 0);
    const auto pts = io::parse_smile_csv(io::read_file(out));
    REQUIRE(pts.size() == 3);
    CHECK(pts[0].implied_vol > pts[2].implied_vol);
    CHECK(io::smile_csv(pts) == io::read_file(out));
}

TEST_CASE("simulate is reproducible") {
    Dir d;
    const std::vector<std::string> args{"simulate", "--params", d.write("p.json", kConstant), "--market",
                                        d.write("m.json", kMarket), "--paths", "3", "--steps", "12", "--seed", "9"};
    const Run a = run(args), b = run(args);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    const auto paths = io::parse_paths_csv(a.out);
    REQUIRE(paths.size() == 3);
    CHECK(paths[2].times.size() == 13);
    auto other = args;
    other.back() = "10";
    CHECK(run(other).out != a.out);
}

TEST_CASE("calibrate from the generating parameters") {
    Dir d;
    std::vector<Quote> q;
    const auto prices = price_many(100.0, 0.01, 0.04, LinearParams::constant(2.0, 0.04, 0.3, -0.5),
                                   {{95.0, 1.0}, {105.0, 1.0}}, Route::Numeric);
    q.push_back({95.0, 1.0, prices[0].call, 1.0});
    q.push_back({105.0, 1.0, prices[1].call, 1.0});
    const Run r = run({"calibrate", "--params", d.write("p.json", kConstant), "--market", d.write("m.json", kMarket),
                       "--quotes", d.write("q.csv", io::quotes_csv(q))});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["converged"] == true);
    CHECK(j["objective"].get<double>() < 1e-18);
    const io::ParamsFile back = io::parse_params(r.out);
    CHECK(back.params.kappa2 == 2.0);
}

TEST_CASE("validate with constant parameters passes") {
    Dir d;
    const Run r = run({"validate", "--params", d.write("p.json", kConstant), "--market", d.write("m.json", kMarket)});
    INFO(r.out << r.err);
    CHECK(r.code == 0);
    CHECK(r.out.find("FAIL") == std::string::npos);
    CHECK(r.out.find("all checks passed") != std::string::npos);
}
