#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "headlinecast/rng.hpp"

using hcast::Rng;

TEST_CASE("same seed reproduces the stream, different seeds diverge") {
    Rng a(12345), b(12345), c(54321);
    bool all_equal = true, any_diff = false;
    for (int i = 0; i < 256; ++i) {
        const auto va = a.next_u64();
        all_equal = all_equal && va == b.next_u64();
        any_diff = any_diff || va != c.next_u64();
    }
    CHECK(all_equal);
    CHECK(any_diff);
}

TEST_CASE("uniform doubles stay in [0, 1) and fill the interval") {
    Rng rng(7);
    double lo = 1.0, hi = 0.0, sum = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform01();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        lo = std::min(lo, u);
        hi = std::max(hi, u);
        sum += u;
    }
    CHECK(lo < 0.001);
    CHECK(hi > 0.999);
    CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("bounded draws cover the range without leaving it") {
    Rng rng(11);
    std::vector<int> counts(10, 0);
    for (int i = 0; i < 20000; ++i) {
        const auto v = rng.below(10);
        REQUIRE(v < 10);
        counts[static_cast<std::size_t>(v)] += 1;
    }
    for (const int c : counts) CHECK(c > 1600); // expectation 2000 per bucket
    CHECK(rng.below(1) == 0);
}

TEST_CASE("gaussian draws match the requested moments") {
    Rng rng(99);
    const int n = 200000;
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = rng.normal(2.0, 3.0);
        sum += x;
        sum_sq += x * x;
    }
    const double mean = sum / n;
    const double stddev = std::sqrt(sum_sq / n - mean * mean);
    CHECK(mean == doctest::Approx(2.0).epsilon(0.02));
    CHECK(stddev == doctest::Approx(3.0).epsilon(0.02));
}

TEST_CASE("shuffle permutes in place, reproducibly per seed") {
    std::vector<int> v1{0, 1, 2, 3, 4, 5, 6, 7, 8, 9}, v2 = v1;
    Rng(5).shuffle(v1);
    Rng(5).shuffle(v2);
    CHECK(v1 == v2);

    std::vector<int> sorted = v1;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9});

    std::vector<int> v3{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    Rng(6).shuffle(v3);
    CHECK(v3 != v1); // almost surely, and pinned by the fixed engine
}

TEST_CASE("index sampling returns k distinct indices in range") {
    Rng rng(3);
    const auto picked = rng.sample_indices(100, 12);
    REQUIRE(picked.size() == 12);
    std::set<int> distinct(picked.begin(), picked.end());
    CHECK(distinct.size() == 12);
    CHECK(*distinct.begin() >= 0);
    CHECK(*distinct.rbegin() < 100);

    // k == n degenerates to a full permutation.
    const auto all = Rng(4).sample_indices(8, 8);
    std::set<int> cover(all.begin(), all.end());
    CHECK(cover.size() == 8);

    // Oversampling clamps to n rather than inventing indices.
    CHECK(Rng(4).sample_indices(5, 50).size() == 5);
}
