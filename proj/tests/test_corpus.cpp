#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <set>
#include <string>

#include "lni/corpus.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;

TEST_CASE("name validity rules", "[corpus]") {
    CHECK(lni::is_valid_name("/ndn/a"));
    CHECK(lni::is_valid_name("/"));
    CHECK(lni::is_valid_name("/NDN/TJU/maps"));
    CHECK_FALSE(lni::is_valid_name(""));
    CHECK_FALSE(lni::is_valid_name("ndn/a"));       // missing leading slash
    CHECK_FALSE(lni::is_valid_name("/a\tb"));       // control byte
    CHECK_FALSE(lni::is_valid_name("/a\x80"));      // non-ASCII
    CHECK_FALSE(lni::is_valid_name(std::string("/a\0b", 4)));  // NUL
}

TEST_CASE("generation is deterministic and produces distinct valid names", "[corpus]") {
    lni::CorpusSpec spec;
    spec.count = 5000;
    spec.seed = 42;
    const lni::Dataset a = lni::generate_names(spec);
    const lni::Dataset b = lni::generate_names(spec);
    REQUIRE(a.size() == 5000);
    CHECK(a.names == b.names);

    std::set<std::string> uniq(a.names.begin(), a.names.end());
    CHECK(uniq.size() == a.size());
    for (const auto& n : a.names) {
        REQUIRE(lni::is_valid_name(n));
        // every byte is '/' or from the component alphabet
        for (char c : n) {
            const bool ok = c == '/' || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') ||
                            c == '-' || c == '_';
            REQUIRE(ok);
        }
    }

    lni::CorpusSpec other = spec;
    other.seed = 43;
    CHECK(lni::generate_names(other).names != a.names);
}

TEST_CASE("generated mean length tracks the target", "[corpus]") {
    lni::CorpusSpec spec;
    spec.count = 20000;
    spec.seed = 7;
    const lni::Dataset d = lni::generate_names(spec);
    double total = 0;
    for (const auto& n : d.names) total += static_cast<double>(n.size());
    const double mean = total / static_cast<double>(d.size());
    INFO("mean length " << mean);
    CHECK(mean == Catch::Approx(spec.target_mean_length).margin(2.5));

    // component counts stay inside the configured range
    for (std::size_t i = 0; i < 200; ++i) {
        const auto& n = d.names[i];
        const auto comps = std::count(n.begin(), n.end(), '/');
        REQUIRE(comps >= spec.component_count_min);
        REQUIRE(comps <= spec.component_count_max);
    }
}

TEST_CASE("spec validation rejects bad configs", "[corpus]") {
    lni::CorpusSpec spec;
    spec.count = 0;
    CHECK_THROWS_AS(spec.validate(), lni::ConfigError);
    spec = {};
    spec.component_count_min = 5;
    spec.component_count_max = 2;
    CHECK_THROWS_AS(spec.validate(), lni::ConfigError);
    spec = {};
    spec.component_len_min = 0;
    CHECK_THROWS_AS(spec.validate(), lni::ConfigError);
    spec = {};
    spec.target_mean_length = 0;
    CHECK_THROWS_AS(spec.validate(), lni::ConfigError);
}

TEST_CASE("generation throws when the namespace cannot hold count names", "[corpus]") {
    lni::CorpusSpec spec;
    spec.count = 10000;
    spec.component_count_min = 1;
    spec.component_count_max = 1;
    spec.component_len_min = 1;
    spec.component_len_max = 1;
    spec.target_mean_length = 2.0;
    // only 38 possible one-character components exist
    CHECK_THROWS_AS(lni::generate_names(spec), lni::Error);
}

TEST_CASE("dataset round-trip preserves names and uses LF line endings", "[corpus]") {
    const std::string dir = oracles::tmp_dir("corpus");
    const std::string path = dir + "/names.txt";

    lni::CorpusSpec spec;
    spec.count = 100;
    spec.seed = 3;
    const lni::Dataset d = lni::generate_names(spec);
    lni::save_dataset(d, path);

    // file ends with LF and contains no CR
    std::ifstream f(path, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    REQUIRE_FALSE(bytes.empty());
    CHECK(bytes.back() == '\n');
    CHECK(bytes.find('\r') == std::string::npos);

    const lni::Dataset back = lni::load_dataset(path);
    CHECK(back.names == d.names);
    fs::remove_all(dir);
}

TEST_CASE("load_dataset rejects malformed files with line numbers", "[corpus]") {
    const std::string dir = oracles::tmp_dir("corpus-bad");

    auto write = [&](const std::string& name, const std::string& content) {
        const std::string p = dir + "/" + name;
        std::ofstream f(p, std::ios::binary);
        f << content;
        return p;
    };

    const std::string dup = write("dup.txt", "/a/b\n/c/d\n/a/b\n");
    try {
        lni::load_dataset(dup);
        FAIL("expected ParseError");
    } catch (const lni::ParseError& e) {
        CHECK(std::string(e.what()).find("(line 3)") != std::string::npos);
    }

    const std::string empty_line = write("empty.txt", "/a\n\n/b\n");
    CHECK_THROWS_AS(lni::load_dataset(empty_line), lni::ParseError);

    const std::string crlf = write("crlf.txt", "/a/b\r\n");
    CHECK_THROWS_AS(lni::load_dataset(crlf), lni::ParseError);

    CHECK_THROWS_AS(lni::load_dataset(dir + "/does-not-exist.txt"), lni::IoError);
    fs::remove_all(dir);
}

TEST_CASE("split_dataset partitions in order with floor sizing", "[corpus]") {
    lni::Dataset d;
    for (int i = 0; i < 10; ++i) d.names.push_back("/n/" + std::to_string(i));

    const auto parts = lni::split_dataset(d, {0.5, 0.25, 0.25});
    REQUIRE(parts.size() == 3);
    CHECK(parts[0].size() == 5);
    CHECK(parts[1].size() == 2);  // floor(2.5)
    CHECK(parts[2].size() == 3);  // remainder absorbed by the last partition
    CHECK(parts[0].names.front() == "/n/0");
    CHECK(parts[2].names.back() == "/n/9");

    CHECK_THROWS_AS(lni::split_dataset(d, {0.7, 0.7}), lni::ConfigError);
    CHECK_THROWS_AS(lni::split_dataset(d, {}), lni::ConfigError);
    CHECK_THROWS_AS(lni::split_dataset(lni::Dataset{}, {1.0}), lni::ConfigError);
}
