#include <catch_amalgamated.hpp>

#include <boost/math/special_functions/bessel.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch()
{
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / ("wlab_cli_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

Run run(const std::string& args)
{
    const fs::path o = scratch() / "stdout", e = scratch() / "stderr";
    const std::string cmd = std::string(WLAB_CLI_PATH) + " " + args + " >" + o.string() + " 2>" + e.string();
    const int status = std::system(cmd.c_str());
    Run r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(o);
    r.err = slurp(e);
    return r;
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

} // namespace

TEST_CASE("eval psi at n = 2 reproduces 2K_2(2)")
{
    const Run r = run("eval --fn psi --n 2 --lambda 1,-1 --x 0,0 --route quadrature");
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    const double v = j.at("value").get<double>();
    CHECK(std::abs(v - 2.0 * boost::math::cyl_bessel_k(2.0, 2.0)) < 1e-10);
}

TEST_CASE("verify q-exact passes and reports the conventions")
{
    const fs::path out = scratch() / "q.json";
    const Run r = run("verify --suite q-exact --q 1/4 --t 1/2 --zmax 20 --scale 0.05 --out " + out.string());
    CHECK(r.code == 0);
    const json j = json::parse(slurp(out));
    CHECK(j.at("status") == "pass");
    CHECK(j.at("suite") == "q-exact");
    CHECK(j.at("checks").size() == 2);
    CHECK(j.at("conventions").is_object());
}

TEST_CASE("simulate array writes the documented header and is reproducible")
{
    const fs::path a = scratch() / "a.csv", b = scratch() / "b.csv";
    const std::string args = "simulate --process array --n 3 --mu 0.2,0,-0.2 --t 0.5 --dt 0.01 --seed 4 --out ";
    REQUIRE(run(args + a.string()).code == 0);
    REQUIRE(run(args + b.string()).code == 0);
    const std::string sa = slurp(a);
    CHECK(first_line(sa) == "t,T_1_1,T_2_1,T_2_2,T_3_1,T_3_2,T_3_3");
    CHECK(sa == slurp(b));
    CHECK(sa.size() > 100);
}

TEST_CASE("usage and domain errors exit with 2 and JSON on stderr")
{
    const Run bad = run("eval --fn nope --n 2 --lambda 1,0 --x 0,0");
    CHECK(bad.code == 2);
    CHECK(json::parse(first_line(bad.err)).contains("error"));
    const Run unknown = run("frobnicate");
    CHECK(unknown.code == 2);
    CHECK(json::parse(first_line(unknown.err)).at("error") == "usage");
    const Run mismatch = run("eval --fn psi --n 3 --lambda 1,0 --x 0,0");
    CHECK(mismatch.code == 2);
}

TEST_CASE("config file with a flag override")
{
    const fs::path cfg = scratch() / "cfg.json";
    std::ofstream(cfg) << R"({"command": "eval", "fn": "K", "nu": 0.5, "z": 1.0})";
    const Run base = run("--config " + cfg.string());
    REQUIRE(base.code == 0);
    CHECK(json::parse(base.out).at("value").get<double>() ==
          Catch::Approx(std::sqrt(M_PI / 2.0) * std::exp(-1.0)).epsilon(1e-12));
    const Run over = run("eval --config " + cfg.string() + " --z 2.0");
    REQUIRE(over.code == 0);
    CHECK(json::parse(over.out).at("value").get<double>() ==
          Catch::Approx(std::sqrt(M_PI / 4.0) * std::exp(-2.0)).epsilon(1e-12));
}
