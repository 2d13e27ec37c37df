#include "gbk/cli.hpp"
#include "gbk/report.hpp"

#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace gbk;

namespace {

struct Outcome {
    int code{0};
    std::string out;
    std::string err;
};

Outcome call(std::vector<std::string> const& args)
{
    std::ostringstream out;
    std::ostringstream err;
    int const code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

} // namespace

TEST_CASE("usage errors exit with code 2", "[cli]")
{
    REQUIRE(call({"no-such-command"}).code == 2);
    REQUIRE(call({"simulate", "--set", "bogus_key=1"}).code == 2);
    REQUIRE(call({"simulate", "--set", "alpha=2"}).code == 2);
    REQUIRE(call({"simulate", "-c", "/nonexistent.cfg"}).code == 2);
    auto const r = call({"freq", "--set", "points=1"});
    REQUIRE(r.code == 2);
    REQUIRE(Json::parse(r.err).at("error").at("type") == "usage");
}

TEST_CASE("help exits cleanly", "[cli]")
{
    auto const r = call({"--help"});
    REQUIRE(r.code == 0);
    REQUIRE(r.out.find("simulate") != std::string::npos);
}

TEST_CASE("simulate writes a csv series with a provenance header", "[cli]")
{
    auto const r = call({"simulate", "--set", "n_particles=500", "--set", "t_end=0.2", "--set", "seed=3"});
    REQUIRE(r.code == 0);
    REQUIRE(r.out.starts_with("# gbk "));
    REQUIRE(r.out.find("# seed 3") != std::string::npos);
    auto const body = strip_header(r.out);
    REQUIRE(body.starts_with("t,"));
    auto const again = call({"simulate", "--set", "n_particles=500", "--set", "t_end=0.2", "--set", "seed=3"});
    REQUIRE(strip_header(again.out) == body);
}

TEST_CASE("config files and overrides combine", "[cli]")
{
    auto const dir = std::filesystem::temp_directory_path() / "gbk_cli_test";
    std::filesystem::create_directories(dir);
    auto const cfg = dir / "run.cfg";
    std::ofstream(cfg) << "n_particles = 300\nt_end = 0.1\nalpha = 0.9\n";
    auto const out = dir / "series.csv";
    auto const dump = dir / "final.bin";
    auto const r = call({"simulate", "-c", cfg.string(), "--set", "alpha=0.8", "-o", out.string(), "--dump",
                         dump.string()});
    REQUIRE(r.code == 0);
    std::ifstream in(out);
    std::stringstream ss;
    ss << in.rdbuf();
    REQUIRE(ss.str().find("# alpha = 0.80000000000000004") != std::string::npos);
    REQUIRE(read_ensemble(dump).size() == 300);
    std::filesystem::remove_all(dir);
}

TEST_CASE("stationarity failures exit with code 1 and report the series", "[cli]")
{
    auto const r = call({"steady", "--set", "n_particles=200", "--set", "t_end=0.1", "--set", "init_theta=4"});
    REQUIRE(r.code == 1);
    auto const err = Json::parse(r.err);
    REQUIRE(err.at("error").contains("series"));
}

TEST_CASE("deterministic commands produce json payloads", "[cli]")
{
    auto const freq = call({"freq", "--set", "points=5", "--set", "bounds_points=101"});
    REQUIRE(freq.code == 0);
    REQUIRE(freq.out.find("# nu0 = ") != std::string::npos);

    auto const split = call({"split-probe", "--set", "grid_n=9", "--set", "alpha=1", "--set", "e=0.5"});
    REQUIRE(split.code == 0);
    auto const doc = Json::parse(split.out);
    REQUIRE(doc.contains("header"));
    REQUIRE(doc.contains("payload"));
}
