#include <catch2/catch_amalgamated.hpp>

#include <trial_order/io.hpp>

using namespace trial_order;
using Catch::Matchers::ContainsSubstring;

TEST_CASE("json input", "[io]") {
    const auto doc = io::parse_json(R"({"unit":"s","candidates":[
        {"id":"a","p":0.5,"times":[1.0,3.0]},
        {"id":"b","p":0.25,"times":[2]}]})");
    REQUIRE(doc.candidates.size() == 2);
    CHECK(doc.unit == "s");
    CHECK(doc.candidates[0].id() == "a");
    CHECK(doc.candidates[0].mean_time() == 2.0);
    CHECK(doc.candidates[1].p() == 0.25);

    CHECK_THROWS_AS(io::parse_json("{"), io::parse_error);
    CHECK_THROWS_AS(io::parse_json(R"({"candidates":[{"id":"a","p":"x","times":[1]}]})"), io::parse_error);
    CHECK_THROWS_WITH(io::parse_json(R"({"candidates":[]})"), ContainsSubstring("empty set"));
    CHECK_THROWS_WITH(io::parse_json(R"({"candidates":[{"id":"a","p":0.5,"times":[0]}]})"),
                      ContainsSubstring("candidates[0]") && ContainsSubstring("non-positive time"));
}

TEST_CASE("csv input", "[io]") {
    SECTION("header, comments, several time columns") {
        const auto doc = io::parse_csv("# demo\nid,p,t1,t2\na,0.5,1,3\n\nb,0.4,2\n");
        REQUIRE(doc.candidates.size() == 2);
        CHECK(doc.candidates[0].mean_time() == 2.0);
        CHECK(doc.candidates[1].id() == "b");
    }
    SECTION("headerless") {
        CHECK(io::parse_csv("a,0.5,1\n").candidates.size() == 1);
    }
    SECTION("bad probability names row and field") {
        try {
            io::parse_csv("id,p,t\na,0.5,1\nb,1.2,1\n");
            FAIL("expected a throw");
        } catch (const invalid_input& e) {
            CHECK_THAT(e.what(), ContainsSubstring("row 3"));
            CHECK_THAT(e.what(), ContainsSubstring("p=1.2"));
        }
    }
    SECTION("non-numeric field") {
        CHECK_THROWS_WITH(io::parse_csv("a,0.5,x\n"), ContainsSubstring("row 1"));
    }
    SECTION("duplicate ids") {
        CHECK_THROWS_AS(io::parse_csv("a,0.5,1\na,0.4,1\n"), invalid_input);
    }
    CHECK(io::infer_input_format("x.csv") == io::InputFormat::csv);
    CHECK(io::infer_input_format("x.json") == io::InputFormat::json);
}

TEST_CASE("report emission", "[io]") {
    io::Report r;
    r.command = "excess";
    r.input_digest = "sha256:00";
    r.tool_version = "trial-order 1.0.0";
    r.results = {{"q1", -0.2}, {"q2", 0.16}, {"q3", 0.36}, {"total", 0.32}, {"order", {"a", "b"}}};

    SECTION("deterministic bytes") {
        for (auto f : {io::OutputFormat::json, io::OutputFormat::csv, io::OutputFormat::text})
            CHECK(io::emit(r, f) == io::emit(r, f));
    }
    SECTION("json round trip") {
        const auto text = io::emit(r, io::OutputFormat::json);
        CHECK(io::report_from_json(io::json::parse(text)) == r);
        r.seed = 42;
        CHECK(io::report_from_json(io::json::parse(io::emit(r, io::OutputFormat::json))) == r);
    }
    SECTION("csv header carries the result fields") {
        const auto csv = io::emit(r, io::OutputFormat::csv);
        const auto header = csv.substr(0, csv.find('\n'));
        for (const char* col : {"q1", "q2", "q3", "total"}) CHECK_THAT(header, ContainsSubstring(col));
    }
    SECTION("csv uses the table when present") {
        r.results = {{"table", {{{"id", "a"}, {"p", 0.5}}, {{"id", "b"}, {"p", 0.25}}}}};
        CHECK(io::emit(r, io::OutputFormat::csv) == "id,p\na,0.5\nb,0.25\n");
    }
    SECTION("text has no trailing whitespace") {
        const auto t = io::emit(r, io::OutputFormat::text);
        CHECK(t.find(" \n") == std::string::npos);
        CHECK_THAT(t, ContainsSubstring("0.32"));
    }
}
