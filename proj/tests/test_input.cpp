#include <catch2/catch_amalgamated.hpp>

#include <string>

#include "lni/corpus.hpp"
#include "lni/input.hpp"
#include "oracles.hpp"

TEST_CASE("known input vectors", "[input]") {
    // worked example: "/NDN/TJU/maps" folded into 5 bytes
    const lni::InputVector fig = lni::process("/NDN/TJU/maps", 5);
    CHECK(fig == lni::InputVector{26, 116, 98, 97, 66});

    // hand-computed: "/ndn/a" = 2f 6e 64 6e 2f 61; second block is 61 padded
    // with zeros, so out = (2f^61, 6e, 64, 6e, 2f) = (78, 110, 100, 110, 47).
    const lni::InputVector v = lni::process("/ndn/a", 5);
    CHECK(v == lni::InputVector{78, 110, 100, 110, 47});

    // short name: copy + zero padding
    CHECK(lni::process("/ab", 5) == lni::InputVector{'/', 'a', 'b', 0, 0});

    // exact multiple of dim: two full blocks XORed
    CHECK(lni::process("/a/b", 2) ==
          lni::InputVector{static_cast<std::uint8_t>('/' ^ '/'),
                           static_cast<std::uint8_t>('a' ^ 'b')});
}

TEST_CASE("process matches the block-partition reference on random names", "[input]") {
    lni::CorpusSpec spec;
    spec.count = 2000;
    spec.seed = 11;
    const lni::Dataset d = lni::generate_names(spec);
    for (const std::size_t dim : {1u, 3u, 5u, 8u, 16u}) {
        for (const auto& name : d.names) {
            const lni::InputVector got = lni::process(name, dim);
            const std::vector<std::uint8_t> want = oracles::process_reference(name, dim);
            REQUIRE(got == lni::InputVector(want.begin(), want.end()));
        }
    }
}

TEST_CASE("process rejects degenerate arguments", "[input]") {
    CHECK_THROWS_AS(lni::process("", 5), lni::ConfigError);
    CHECK_THROWS_AS(lni::process("/a", 0), lni::ConfigError);
}

TEST_CASE("vector_order is a total lexicographic order", "[input]") {
    using lni::InputVector;
    CHECK(lni::vector_order({1, 2, 3}, {1, 2, 3}) == std::strong_ordering::equal);
    CHECK(lni::vector_order({1, 2, 3}, {1, 2, 4}) == std::strong_ordering::less);
    CHECK(lni::vector_order({2, 0, 0}, {1, 255, 255}) == std::strong_ordering::greater);
    CHECK_THROWS_AS(lni::vector_order({1}, {1, 2}), lni::ConfigError);
}

TEST_CASE("collision_rate counts all members of colliding groups", "[input]") {
    // Distinct names that fold to the same dim-2 vector: in "/abab" the
    // even-index bytes are '/','b','b' (XOR 0x2f) and the odd-index bytes are
    // 'a','a' (XOR 0); "/baba" gives the same pair. Both group members count.
    lni::Dataset d;
    d.names = {"/abab", "/baba", "/cd"};
    CHECK(lni::process("/abab", 2) == lni::InputVector{0x2f, 0x00});
    CHECK(lni::process("/abab", 2) == lni::process("/baba", 2));
    CHECK(lni::collision_rate(d, 2) == Catch::Approx(2.0 / 3.0));

    lni::Dataset clean;
    clean.names = {"/a", "/b", "/c"};
    CHECK(lni::collision_rate(clean, 5) == 0.0);
    CHECK_THROWS_AS(lni::collision_rate(lni::Dataset{}, 5), lni::ConfigError);
}

TEST_CASE("real corpus collision rate is small at dim 5", "[input]") {
    lni::CorpusSpec spec;
    spec.count = 20000;
    spec.seed = 5;
    const lni::Dataset d = lni::generate_names(spec);
    const double rate = lni::collision_rate(d, 5);
    INFO("collision rate " << rate);
    // 2e4 names into a ~2^40 vector space: collisions should be rare. The
    // fold is not a uniform hash, so allow a loose ceiling.
    CHECK(rate < 0.01);
}
