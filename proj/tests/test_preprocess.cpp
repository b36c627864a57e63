#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <vector>

#include "gaitline/preprocess.hpp"
#include "oracles.hpp"

using namespace gaitline;
using preprocess::moving_average;

namespace {

PureStream make_stream(const std::vector<double>& x, const std::vector<double>& y,
                       const std::vector<double>& z) {
    PureStream s;
    for (std::size_t i = 0; i < x.size(); ++i) {
        s.samples.push_back({static_cast<std::int64_t>(i) * 200, x[i], y[i], z[i]});
    }
    return s;
}

double sample_variance(const std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    return var / static_cast<double>(v.size());
}

}  // namespace

TEST_CASE("moving_average matches the formula") {
    std::vector<double> in{1, 2, 3, 4, 5};
    auto out = moving_average(in, 3);
    REQUIRE(out == std::vector<double>{2, 3, 4});
}

TEST_CASE("moving_average of a constant sequence is constant") {
    std::vector<double> in(17, 3.25);
    for (int w : {1, 2, 5, 17}) {
        auto out = moving_average(in, w);
        REQUIRE(out.size() == in.size() - static_cast<std::size_t>(w) + 1);
        for (double v : out) REQUIRE(v == Catch::Approx(3.25).margin(1e-12));
    }
}

TEST_CASE("moving_average with w=1 is the identity") {
    std::vector<double> in{0.5, -1.0, 8.0, 2.5};
    REQUIRE(moving_average(in, 1) == in);
}

TEST_CASE("moving_average rejects bad window sizes") {
    std::vector<double> in{1, 2, 3};
    REQUIRE_THROWS_AS(moving_average(in, 0), DataError);
    REQUIRE_THROWS_AS(moving_average(in, 4), DataError);
}

TEST_CASE("moving_average output stays within the input range") {
    Rng rng(101);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> in(64);
        for (double& v : in) v = rng.normal(0.0, 3.0);
        const int w = 1 + static_cast<int>(rng.index(10));
        auto out = moving_average(in, w);
        const double lo = *std::min_element(in.begin(), in.end());
        const double hi = *std::max_element(in.begin(), in.end());
        for (double v : out) {
            REQUIRE(v >= lo - 1e-12);
            REQUIRE(v <= hi + 1e-12);
        }
    }
}

TEST_CASE("moving_average commutes with affine maps") {
    Rng rng(202);
    std::vector<double> in(40);
    for (double& v : in) v = rng.normal(0.0, 1.0);
    const double a = 2.5, b = -1.75;
    std::vector<double> mapped(in.size());
    for (std::size_t i = 0; i < in.size(); ++i) mapped[i] = a * in[i] + b;
    auto lhs = moving_average(mapped, 4);
    auto rhs = moving_average(in, 4);
    for (std::size_t i = 0; i < lhs.size(); ++i) {
        REQUIRE(lhs[i] == Catch::Approx(a * rhs[i] + b).margin(1e-10));
    }
}

TEST_CASE("larger w smooths i.i.d. noise harder") {
    // statistical check: over 100 trials the w=5 output variance should sit
    // below the w=3 variance essentially always
    Rng rng(303);
    int ordered = 0;
    double mean3 = 0.0, mean5 = 0.0;
    const int trials = 100;
    for (int t = 0; t < trials; ++t) {
        std::vector<double> in(256);
        for (double& v : in) v = rng.normal(0.0, 1.0);
        const double v3 = sample_variance(moving_average(in, 3));
        const double v5 = sample_variance(moving_average(in, 5));
        mean3 += v3;
        mean5 += v5;
        if (v5 <= v3) ++ordered;
    }
    REQUIRE(mean5 / trials < mean3 / trials);
    REQUIRE(ordered >= 90);
}

TEST_CASE("moving_average agrees with the naive oracle") {
    Rng rng(404);
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = 8 + rng.index(120);
        std::vector<double> in(n);
        for (double& v : in) v = rng.normal(0.0, 2.0);
        const int w = 1 + static_cast<int>(rng.index(n));
        REQUIRE(moving_average(in, w) == oracle::moving_average(in, w));
    }
}

TEST_CASE("smooth_stream filters each axis and keeps window-start timestamps") {
    auto s = make_stream({1, 2, 3, 4, 5}, {10, 20, 30, 40, 50}, {0, 0, 0, 0, 0});
    auto out = preprocess::smooth_stream(s, {3});
    REQUIRE(out.samples.size() == 3);
    std::vector<double> xs, ys;
    for (const auto& smp : out.samples) {
        xs.push_back(smp.x);
        ys.push_back(smp.y);
        REQUIRE(smp.z == 0.0);
    }
    REQUIRE(xs == std::vector<double>{2, 3, 4});
    REQUIRE(ys == std::vector<double>{20, 30, 40});
    REQUIRE(out.samples[0].timestamp_ms == 0);
    REQUIRE(out.samples[1].timestamp_ms == 200);
    REQUIRE(out.samples[2].timestamp_ms == 400);
}

TEST_CASE("smooth_stream keeps an all-zero stream at zero") {
    auto s = make_stream(std::vector<double>(16, 0.0), std::vector<double>(16, 0.0),
                         std::vector<double>(16, 0.0));
    auto out = preprocess::smooth_stream(s, {5});
    REQUIRE(out.samples.size() == 12);
    for (const auto& smp : out.samples) {
        REQUIRE(smp.x == 0.0);
        REQUIRE(smp.y == 0.0);
        REQUIRE(smp.z == 0.0);
    }
}

TEST_CASE("smooth_stream with w=1 returns the stream unchanged") {
    auto s = make_stream({1, -2, 3}, {4, 5, 6}, {7, 8, 9});
    auto out = preprocess::smooth_stream(s, {1});
    REQUIRE(out.samples.size() == s.samples.size());
    for (std::size_t i = 0; i < s.samples.size(); ++i) {
        REQUIRE(out.samples[i].x == s.samples[i].x);
        REQUIRE(out.samples[i].y == s.samples[i].y);
        REQUIRE(out.samples[i].z == s.samples[i].z);
        REQUIRE(out.samples[i].timestamp_ms == s.samples[i].timestamp_ms);
    }
}

TEST_CASE("smooth_stream rejects streams shorter than w") {
    auto s = make_stream({1, 2}, {1, 2}, {1, 2});
    REQUIRE_THROWS_AS(preprocess::smooth_stream(s, {3}), DataError);
}

TEST_CASE("slice_windows counts and offsets at the default config") {
    preprocess::SliceConfig cfg;
    REQUIRE(cfg.step() == 64);

    auto stream_of = [](std::size_t n) {
        PureStream s;
        for (std::size_t i = 0; i < n; ++i) {
            s.samples.push_back({static_cast<std::int64_t>(i) * 200,
                                 static_cast<double>(i), 0.0, 0.0});
        }
        return s;
    };

    auto one = preprocess::slice_windows(stream_of(128), cfg, Emotion::anger, "s0",
                                         Joint::ankle);
    REQUIRE(one.size() == 1);
    REQUIRE(one[0].axes[0][0] == 0.0);
    REQUIRE(one[0].label == Emotion::anger);

    auto two = preprocess::slice_windows(stream_of(192), cfg, Emotion::happy, "s0",
                                         Joint::wrist);
    REQUIRE(two.size() == 2);
    REQUIRE(two[0].axes[0][0] == 0.0);
    REQUIRE(two[1].axes[0][0] == 64.0);  // second slice starts at offset 64

    REQUIRE(preprocess::slice_windows(stream_of(127), cfg, Emotion::happy, "s0",
                                      Joint::ankle)
                .empty());
}

TEST_CASE("slice offsets follow the arithmetic progression 0, 64, 128, ...") {
    PureStream s;
    for (std::size_t i = 0; i < 128 + 6 * 64 + 13; ++i) {
        s.samples.push_back({static_cast<std::int64_t>(i), static_cast<double>(i), 0.0, 0.0});
    }
    auto slices =
        preprocess::slice_windows(s, {}, Emotion::neutral, "s0", Joint::ankle);
    REQUIRE(slices.size() == 7);
    for (std::size_t k = 0; k < slices.size(); ++k) {
        REQUIRE(slices[k].axes[0][0] == static_cast<double>(64 * k));
        REQUIRE(slices[k].length() == 128);
    }
}

TEST_CASE("slice step must be a positive integer") {
    preprocess::SliceConfig bad{128, 0.3};  // 128*0.7 = 89.6
    REQUIRE_THROWS_AS(bad.step(), DataError);
    preprocess::SliceConfig ok{128, 0.75};
    REQUIRE(ok.step() == 32);
}
