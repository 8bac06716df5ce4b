#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numeric>

#include "vlbench/rng.hpp"
#include "vlbench/sha256.hpp"

using namespace vlbench;

TEST_CASE("splitmix64 known values") {
    // reference outputs of the standard splitmix64 stepping function
    CHECK(splitmix64(0) == 0xE220A8397B1DCDAFULL);
    CHECK(splitmix64(1) != splitmix64(0));
    CHECK(splitmix64(42) == splitmix64(42));
}

TEST_CASE("fnv1a64 known values") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a64("abc") != fnv1a64("acb"));
}

TEST_CASE("rng streams are reproducible") {
    Rng a(123), b(123);
    for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("derived streams are independent of each other") {
    Rng a = Rng::derived(7, "charts");
    Rng b = Rng::derived(7, "shuffle");
    Rng c = Rng::derived(8, "charts");
    CHECK(a.next_u64() != b.next_u64());
    CHECK(Rng::derived(7, "charts").next_u64() != c.next_u64());
    // re-derivation replays the stream
    Rng a2 = Rng::derived(7, "charts");
    a2.next_u64();
    Rng a3 = Rng::derived(7, "charts");
    a3.next_u64();
    CHECK(a2.next_u64() == a3.next_u64());
}

TEST_CASE("uniform stays in range and covers it") {
    Rng r(5);
    double lo = 1.0, hi = 0.0;
    for (int i = 0; i < 20000; ++i) {
        const double u = r.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        lo = std::min(lo, u);
        hi = std::max(hi, u);
    }
    CHECK(lo < 0.01);
    CHECK(hi > 0.99);
}

TEST_CASE("uniform_int inclusive bounds") {
    Rng r(6);
    bool saw_lo = false, saw_hi = false;
    for (int i = 0; i < 5000; ++i) {
        const auto v = r.uniform_int(std::int64_t(-3), std::int64_t(3));
        REQUIRE(v >= -3);
        REQUIRE(v <= 3);
        saw_lo |= v == -3;
        saw_hi |= v == 3;
    }
    CHECK(saw_lo);
    CHECK(saw_hi);
}

TEST_CASE("normal moments") {
    Rng r(7);
    const int n = 100000;
    double sum = 0, sq = 0;
    for (int i = 0; i < n; ++i) {
        const double v = r.normal(2.0, 3.0);
        sum += v;
        sq += v * v;
    }
    const double mean = sum / n;
    const double var = sq / n - mean * mean;
    CHECK(std::abs(mean - 2.0) < 0.05);
    CHECK(std::abs(std::sqrt(var) - 3.0) < 0.05);
}

TEST_CASE("beta moments and support") {
    Rng r(8);
    const int n = 50000;
    double sum = 0;
    for (int i = 0; i < n; ++i) {
        const double v = r.beta(2.0, 5.0);
        REQUIRE(v >= 0.0);
        REQUIRE(v <= 1.0);
        sum += v;
    }
    CHECK(std::abs(sum / n - 2.0 / 7.0) < 0.01);
}

TEST_CASE("shuffle is a permutation and deterministic") {
    std::vector<int> v(50);
    std::iota(v.begin(), v.end(), 0);
    auto a = v, b = v;
    Rng r1(9), r2(9);
    r1.shuffle(a);
    r2.shuffle(b);
    CHECK(a == b);
    CHECK(a != v);  // 50! permutations; identity is effectively impossible
    std::sort(a.begin(), a.end());
    CHECK(a == v);
}

TEST_CASE("sha256 known vectors") {
    CHECK(Sha256::hash("") ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(Sha256::hash("abc") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    // incremental updates match one-shot hashing
    Sha256 h;
    h.update("ab");
    h.update("c");
    CHECK(h.hex_digest() == Sha256::hash("abc"));
}
