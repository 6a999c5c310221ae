#include <doctest.h>

#include <cmath>
#include <vector>

#include "ilab/rng.hpp"

using ilab::Rng;

TEST_CASE("same seed reproduces the draw sequence") {
    Rng a(42), b(42);
    for (int i = 0; i < 1000; ++i) {
        CHECK(a.uniform() == b.uniform());
        CHECK(a.normal() == b.normal());
    }
}

TEST_CASE("uniform stays in range") {
    Rng rng(7);
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.uniform(-3.0, 5.0);
        CHECK(u >= -3.0);
        CHECK(u < 5.0);
    }
}

TEST_CASE("normal moments") {
    Rng rng(11);
    const int n = 200000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal();
        sum += z;
        sum2 += z * z;
    }
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    CHECK(std::abs(mean) < 0.01);
    CHECK(std::abs(var - 1.0) < 0.02);
}

TEST_CASE("split streams are decorrelated and deterministic") {
    Rng parent(99);
    Rng c1 = parent.split(0);
    Rng c2 = parent.split(1);
    Rng c1b = parent.split(0);
    CHECK(c1.uniform() == c1b.uniform());
    CHECK(c1.uniform() != c2.uniform());
}

TEST_CASE("uniform_int covers all residues") {
    Rng rng(3);
    std::vector<int> hits(7, 0);
    for (int i = 0; i < 70000; ++i) ++hits[static_cast<std::size_t>(rng.uniform_int(7))];
    for (int h : hits) CHECK(h > 9000);
}
