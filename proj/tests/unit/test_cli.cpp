#include <catch2/catch_amalgamated.hpp>

#include "commands.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace trial_order;
using Catch::Matchers::ContainsSubstring;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run_cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string write_temp(const std::string& name, const std::string& body) {
    const auto path = std::filesystem::temp_directory_path() / ("trial_order_test_" + name);
    std::ofstream(path, std::ios::binary) << body;
    return path.string();
}

const std::string three_json = R"({"candidates":[
  {"id":"a","p":0.5,"times":[1]},{"id":"b","p":0.4,"times":[1]},{"id":"c","p":0.3,"times":[1]}]})";

} // namespace

TEST_CASE("cli order and expect", "[cli]") {
    const auto f = write_temp("three.json", three_json);
    auto r = run_cli({"-f", "json", "order", f});
    REQUIRE(r.code == 0);
    auto j = io::json::parse(r.out);
    CHECK(j["command"] == "order");
    CHECK(j["results"]["order"] == io::json({"a", "b", "c"}));
    CHECK(j["input_digest"].get<std::string>().rfind("sha256:", 0) == 0);

    r = run_cli({"-f", "json", "expect", f});
    REQUIRE(r.code == 0);
    CHECK(io::json::parse(r.out)["results"]["expected_time"].get<double>() == Catch::Approx(1.8));

    r = run_cli({"-f", "json", "expect", "--order", "c,b,a", f});
    CHECK(io::json::parse(r.out)["results"]["expected_time"].get<double>() == Catch::Approx(2.12));
}

TEST_CASE("cli excess", "[cli]") {
    const auto f = write_temp("three_ex.json", three_json);
    auto r = run_cli({"-f", "json", "excess", "--k", "1", "--n", "2", f});
    REQUIRE(r.code == 0);
    const auto j = io::json::parse(r.out)["results"];
    CHECK(j["total"].get<double>() == Catch::Approx(0.32));
    CHECK(j["q1"].get<double>() == Catch::Approx(-0.2));
    CHECK(j["agree"] == true);

    CHECK(run_cli({"excess", "--k", "3", "--n", "1", f}).code == 1);
    CHECK(run_cli({"excess", "--k", "1", "--n", "1", "--order", "a,b", f}).code == 1);
}

TEST_CASE("cli bounds", "[cli]") {
    const auto f = write_temp("equal_t.json", R"({"candidates":[
      {"id":"x","p":0.5,"times":[1]},{"id":"y","p":0.4,"times":[1]},{"id":"z","p":0.3,"times":[1]}]})");
    auto r = run_cli({"-f", "json", "bounds", "--k", "1", "--n", "2", "--c", "0.3", "--d", "0.5",
                      "--profile", "equal-t-upper", f});
    REQUIRE(r.code == 0);
    const auto row = io::json::parse(r.out)["results"]["table"][0];
    CHECK(row["upper"].get<double>() == Catch::Approx(0.668));
    CHECK(row["holds"] == true);

    // c above the smallest probability: premises fail.
    const std::vector<std::string> bad{"bounds", "--k", "1", "--n", "2", "--c", "0.35", "--d", "0.5", f};
    CHECK(run_cli(bad).code == 0);
    auto strict = bad;
    strict.insert(strict.begin(), "--strict");
    r = run_cli(strict);
    CHECK(r.code == 2);
}

TEST_CASE("cli simulate and check", "[cli]") {
    const auto f = write_temp("three_sim.json", three_json);
    const std::vector<std::string> args{"-f", "json", "simulate", "--trials", "5000", "--seed", "9", f};
    const auto a = run_cli(args);
    const auto b = run_cli(args);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(io::json::parse(a.out)["seed"] == 9);

    const auto c = run_cli({"-f", "json", "check", "--instances", "50", "--seed", "3"});
    CHECK(c.code == 0);
}

TEST_CASE("cli usage errors", "[cli]") {
    CHECK(run_cli({"frobnicate"}).code == 1);
    CHECK(run_cli({}).code == 1);
    CHECK(run_cli({"order", "/nonexistent/file.json"}).code == 1);
    CHECK(run_cli({"--help"}).code == 0);
    const auto f = write_temp("bad.csv", "a,1.2,1\n");
    const auto r = run_cli({"order", f});
    CHECK(r.code == 1);
    CHECK_THAT(r.err, ContainsSubstring("row 1"));
}
