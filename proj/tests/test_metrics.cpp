#include <catch2/catch_amalgamated.hpp>

#include <sstream>
#include <string>
#include <vector>

#include "lni/metrics.hpp"
#include "oracles.hpp"

using lni::Json;

TEST_CASE("measure_throughput: counts, medians, sanity of units", "[metrics]") {
    std::vector<lni::Name> probes;
    for (int i = 0; i < 100; ++i) probes.push_back("/p/" + std::to_string(i));

    std::uint64_t calls = 0;
    auto fn = [&](std::string_view name) {
        ++calls;
        return name.size() % 2 == 0;
    };
    const lni::TimingResult t = lni::measure_throughput(fn, probes, 10'000, 3, 512);

    // per_rep = ceil(10000/100)*100 = 10000; plus one warmup pass
    CHECK(t.lookups_per_rep == 10'000);
    CHECK(t.reps == 3);
    CHECK(calls == 100 + 3 * 10'000);
    CHECK(t.lookups_per_sec > 0);
    CHECK(t.msps == Catch::Approx(t.lookups_per_sec / 1e6));
    CHECK(t.lookup_ns_mean > 0);
    // mean and throughput are two views of the same measurement
    CHECK(t.lookup_ns_mean * t.lookups_per_sec == Catch::Approx(1e9).epsilon(1e-9));
    CHECK(t.lookup_ns_p50 > 0);
    CHECK(t.lookup_ns_p99 >= t.lookup_ns_p50);

    // check accumulates hits across warmup and reps: hit when length is even
    std::uint64_t hits_per_pass = 0;
    for (const auto& p : probes) hits_per_pass += p.size() % 2 == 0 ? 1 : 0;
    CHECK(t.check == hits_per_pass + 3 * (hits_per_pass * 100));

    CHECK_THROWS_AS(lni::measure_throughput(fn, {}, 100, 3), lni::ConfigError);
    CHECK_THROWS_AS(lni::measure_throughput(fn, probes, 100, 0), lni::ConfigError);
}

TEST_CASE("timing_to_json gates the cycle estimate on cpu_ghz", "[metrics]") {
    lni::TimingResult t;
    t.lookup_ns_mean = 50.0;
    t.lookup_ns_p50 = 48.0;
    t.lookup_ns_p99 = 60.0;
    t.lookups_per_sec = 2e7;
    t.msps = 20.0;
    t.lookups_per_rep = 1'000'000;
    t.reps = 3;

    const Json without = lni::timing_to_json(t, 0.0);
    CHECK_FALSE(without.contains("cycles_per_lookup_est"));
    CHECK(without["msps"] == 20.0);

    const Json with = lni::timing_to_json(t, 3.0);
    REQUIRE(with.contains("cycles_per_lookup_est"));
    CHECK(with["cycles_per_lookup_est"] == Catch::Approx(150.0));
}

TEST_CASE("flatten_json produces dotted keys and dump()-exact scalars", "[metrics]") {
    const Json node{
        {"a", 1},
        {"b", {{"c", 0.125}, {"d", "text"}}},
        {"e", Json::array({true, Json{{"f", 2}}})},
    };
    std::map<std::string, std::string> flat;
    lni::detail::flatten_json(node, "", flat);

    CHECK(flat.at("a") == "1");
    CHECK(flat.at("b.c") == Json(0.125).dump());
    CHECK(flat.at("b.d") == Json("text").dump());
    CHECK(flat.at("e[0]") == "true");
    CHECK(flat.at("e[1].f") == "2");
}

TEST_CASE("csv escaping quotes fields with commas and quotes", "[metrics]") {
    CHECK(lni::detail::csv_escape("plain") == "plain");
    CHECK(lni::detail::csv_escape("a,b") == "\"a,b\"");
    CHECK(lni::detail::csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(lni::detail::csv_escape("line\nbreak") == "\"line\nbreak\"");
}

TEST_CASE("report_to_csv: union of columns, one row per result, values equal JSON",
          "[metrics]") {
    Json report = lni::make_report(Json{{"names", 10}}, "v-test");
    report["results"].push_back(Json{{"section", "s1"}, {"index", "lni"}, {"value", 0.25}});
    report["results"].push_back(
        Json{{"section", "s2"}, {"index", "hash"}, {"other", "x,y"}});

    const std::string csv = lni::report_to_csv(report);
    std::istringstream lines(csv);
    std::string header, row1, row2, extra;
    REQUIRE(std::getline(lines, header));
    REQUIRE(std::getline(lines, row1));
    REQUIRE(std::getline(lines, row2));
    CHECK_FALSE(std::getline(lines, extra));

    // header is the sorted union of flattened keys
    CHECK(header == "index,other,section,value");
    // every populated cell is the dump() of the JSON scalar; gaps are empty
    CHECK(row1 == "\"\"\"lni\"\"\",,\"\"\"s1\"\"\",0.25");
    CHECK(row2 == "\"\"\"hash\"\"\",\"\"\"x,y\"\"\",\"\"\"s2\"\"\",");
}

TEST_CASE("make_report carries schema version, tool version and config", "[metrics]") {
    const Json r = lni::make_report(Json{{"seed", 7}}, "1.2.3");
    CHECK(r["schema_version"] == 1);
    CHECK(r["tool_version"] == "1.2.3");
    CHECK(r["config"]["seed"] == 7);
    CHECK(r["results"].is_array());
    CHECK(r["results"].empty());
}

TEST_CASE("the schema oracle accepts and rejects as designed", "[metrics]") {
    // validator self-test so the CLI-level schema assertions mean something
    const Json schema = Json::parse(R"({
        "type": "object",
        "required": ["a", "b"],
        "additionalProperties": false,
        "properties": {
            "a": {"type": "integer", "minimum": 0},
            "b": {"type": "array", "items": {"type": "string"}},
            "c": {"enum": ["x", "y"]}
        }
    })");

    CHECK(oracles::schema_errors(Json{{"a", 1}, {"b", Json::array({"s"})}}, schema).empty());
    CHECK_FALSE(oracles::schema_errors(Json{{"a", 1}}, schema).empty());              // missing b
    CHECK_FALSE(oracles::schema_errors(Json{{"a", -1}, {"b", Json::array()}}, schema)
                    .empty());                                                        // minimum
    CHECK_FALSE(
        oracles::schema_errors(Json{{"a", 1}, {"b", Json::array({2})}}, schema).empty());
    CHECK_FALSE(oracles::schema_errors(Json{{"a", 1}, {"b", Json::array()}, {"z", 0}}, schema)
                    .empty());                                                        // additional
    CHECK_FALSE(oracles::schema_errors(
                    Json{{"a", 1}, {"b", Json::array()}, {"c", "nope"}}, schema)
                    .empty());                                                        // enum
}
