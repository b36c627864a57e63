#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>
#include <vector>

#include "gaitline/features.hpp"
#include "oracles.hpp"

using namespace gaitline;
namespace feat = gaitline::features;

namespace {

std::vector<double> cosine_axis(int bin, double amplitude, std::size_t n = 128,
                                double phase = 0.0) {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = amplitude * std::cos(2.0 * M_PI * bin * static_cast<double>(i) /
                                        static_cast<double>(n) +
                                    phase);
    }
    return x;
}

std::vector<double> random_axis(Rng& rng, std::size_t n = 128) {
    std::vector<double> x(n);
    for (double& v : x) v = rng.normal(0.0, 2.0);
    return x;
}

WindowSlice make_slice(std::vector<double> x, std::vector<double> y, std::vector<double> z) {
    WindowSlice s;
    s.axes = {std::move(x), std::move(y), std::move(z)};
    return s;
}

}  // namespace

TEST_CASE("axis_moments of a constant axis") {
    std::vector<double> axis(128, 4.2);
    auto m = feat::axis_moments(axis);
    REQUIRE(m.mean == Catch::Approx(4.2).margin(1e-12));
    REQUIRE(m.stddev == 0.0);
    REQUIRE(m.skewness == 0.0);
    REQUIRE(m.kurtosis == 0.0);
}

TEST_CASE("axis_moments on [1,2,3,4]") {
    std::vector<double> axis{1, 2, 3, 4};
    auto m = feat::axis_moments(axis);
    REQUIRE(m.mean == Catch::Approx(2.5).margin(1e-12));
    REQUIRE(m.stddev == Catch::Approx(std::sqrt(1.25)).margin(1e-9));  // 1.118034
    auto ref = oracle::moments(axis);
    REQUIRE(m.skewness == Catch::Approx(ref.skewness).margin(1e-12));
    REQUIRE(m.kurtosis == Catch::Approx(ref.kurtosis).margin(1e-12));
}

TEST_CASE("symmetric axes have zero skewness") {
    Rng rng(11);
    std::vector<double> half(64);
    for (double& v : half) v = rng.normal(0.0, 1.0);
    std::vector<double> axis = half;
    for (double v : half) axis.push_back(2.0 * 0.75 - v);  // reflect about 0.75
    auto m = feat::axis_moments(axis);
    REQUIRE(m.skewness == Catch::Approx(0.0).margin(1e-9));
}

TEST_CASE("fft_amplitudes of zero and constant signals") {
    std::vector<double> zeros(128, 0.0);
    for (double a : feat::fft_amplitudes(zeros)) REQUIRE(a == 0.0);

    std::vector<double> aconst(128, 2.5);
    auto amp = feat::fft_amplitudes(aconst);
    REQUIRE(amp.size() == 32);
    REQUIRE(amp[0] == Catch::Approx(2.5).margin(1e-9));
    for (std::size_t k = 1; k < amp.size(); ++k) REQUIRE(amp[k] == Catch::Approx(0.0).margin(1e-9));
}

TEST_CASE("fft_amplitudes recovers a pure cosine at an exact bin") {
    const double a = 1.7;
    auto amp = feat::fft_amplitudes(cosine_axis(4, a));
    REQUIRE(amp[4] == Catch::Approx(a).margin(1e-9));
    for (std::size_t k = 0; k < amp.size(); ++k) {
        if (k != 4) REQUIRE(amp[k] == Catch::Approx(0.0).margin(1e-9));
    }
    // the amplitude spectrum ignores phase
    auto shifted = feat::fft_amplitudes(cosine_axis(4, a, 128, 1.234));
    REQUIRE(shifted[4] == Catch::Approx(a).margin(1e-9));
}

TEST_CASE("fft_amplitudes rejects unsupported lengths") {
    std::vector<double> too_short(63, 1.0);
    REQUIRE_THROWS_AS(feat::fft_amplitudes(too_short), DataError);
    std::vector<double> odd(129, 1.0);
    REQUIRE_THROWS_AS(feat::fft_amplitudes(odd), DataError);
}

TEST_CASE("amplitude bin 0 equals the axis mean") {
    Rng rng(22);
    for (int t = 0; t < 200; ++t) {
        auto axis = random_axis(rng);
        auto amp = feat::fft_amplitudes(axis);
        auto m = feat::axis_moments(axis);
        REQUIRE(std::abs(amp[0] - m.mean) < 1e-9);  // signed, incl. negative means
    }
}

TEST_CASE("Parseval: spectrum energy equals signal energy") {
    Rng rng(33);
    auto axis = random_axis(rng);
    auto spec = dft::spectrum(axis);
    double lhs = 0.0;
    for (const auto& c : spec) lhs += std::norm(c);
    lhs /= static_cast<double>(axis.size());
    double rhs = 0.0;
    for (double v : axis) rhs += v * v;
    REQUIRE(lhs == Catch::Approx(rhs).epsilon(1e-6));
}

TEST_CASE("psd_stats of zero and constant signals") {
    std::vector<double> zeros(128, 0.0);
    auto z = feat::psd_stats(zeros);
    REQUIRE(z.mean == 0.0);
    REQUIRE(z.stddev == 0.0);

    const double c = 1.3;
    std::vector<double> aconst(128, c);
    auto p = feat::psd_stats(aconst, 5.0);
    // P_0 = (128 c)^2 / (128 * 5) = 25.6 c^2, spread over 65 bins
    REQUIRE(p.mean == Catch::Approx(25.6 * c * c / 65.0).epsilon(1e-9));
}

TEST_CASE("psd_stats concentrates a pure cosine's power at its bin") {
    const double a = 2.0;
    auto axis = cosine_axis(4, a);
    auto p = feat::psd_stats(axis, 5.0);
    auto [om, os] = oracle::psd_stats(axis, 5.0);
    REQUIRE(p.mean == Catch::Approx(om).epsilon(1e-9));
    REQUIRE(p.stddev == Catch::Approx(os).epsilon(1e-9));
    // |X_4| = 64 A, P_4 = (64 A)^2 / 640
    const double p4 = (64.0 * a) * (64.0 * a) / (128.0 * 5.0);
    REQUIRE(p.mean == Catch::Approx(p4 / 65.0).epsilon(1e-9));
}

TEST_CASE("axis correlations: exact, inverted, and degenerate") {
    Rng rng(44);
    auto x = random_axis(rng);
    std::vector<double> neg(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) neg[i] = -x[i];

    auto same = feat::axis_correlations(make_slice(x, x, x));
    REQUIRE(same.xy == Catch::Approx(1.0).margin(1e-12));

    auto anti = feat::axis_correlations(make_slice(x, neg, x));
    REQUIRE(anti.xy == Catch::Approx(-1.0).margin(1e-12));

    std::vector<double> flat(x.size(), 7.0);
    auto degen = feat::axis_correlations(make_slice(flat, x, x));
    REQUIRE(degen.xy == 0.0);
    REQUIRE(degen.xz == 0.0);
}

TEST_CASE("correlation is symmetric and affine-invariant") {
    Rng rng(55);
    auto x = random_axis(rng);
    auto y = random_axis(rng);
    auto a = feat::axis_correlations(make_slice(x, y, x));
    auto b = feat::axis_correlations(make_slice(y, x, y));
    REQUIRE(a.xy == Catch::Approx(b.xy).margin(1e-12));

    std::vector<double> scaled(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) scaled[i] = 3.0 * y[i] + 11.0;
    auto c = feat::axis_correlations(make_slice(x, scaled, x));
    REQUIRE(c.xy == Catch::Approx(a.xy).margin(1e-9));
}

TEST_CASE("extract_features layout: 114 entries, correlations at the tail") {
    feat::FeatureLayout layout;
    REQUIRE(layout.dim() == 114);
    REQUIRE(layout.names().size() == 114);
    REQUIRE(layout.names()[0] == "x_mean");
    REQUIRE(layout.names()[4] == "x_fft_01");
    REQUIRE(layout.names()[111] == "corr_xy");
    REQUIRE(layout.names()[113] == "corr_yz");

    feat::FeatureLayout with_dc{true};
    REQUIRE(with_dc.dim() == 117);
    REQUIRE(with_dc.names()[4] == "x_fft_00");

    Rng rng(66);
    auto slice = make_slice(random_axis(rng), random_axis(rng), random_axis(rng));
    auto fv = feat::extract_features(slice);
    REQUIRE(fv.values.size() == 114);
}

TEST_CASE("extract_features of an all-zero slice is all zeros") {
    std::vector<double> zeros(128, 0.0);
    auto fv = feat::extract_features(make_slice(zeros, zeros, zeros));
    for (double v : fv.values) REQUIRE(v == 0.0);
}

TEST_CASE("extract_features places a bin-4 cosine amplitude at x_fft_04") {
    const double a = 1.25;
    std::vector<double> zeros(128, 0.0);
    auto slice = make_slice(cosine_axis(4, a), zeros, zeros);
    auto fv = feat::extract_features(slice);
    // x block: mean(0) std(1) kurt(2) skew(3) fft_01(4) ... fft_04 at index 7
    REQUIRE(fv.values[7] == Catch::Approx(a).margin(1e-9));
    REQUIRE(fv.values[111] == 0.0);  // corr_xy vs a constant axis
    REQUIRE(fv.values[112] == 0.0);
}

TEST_CASE("adding a constant to one axis only moves that axis's mean") {
    Rng rng(77);
    auto x = random_axis(rng);
    auto y = random_axis(rng);
    auto z = random_axis(rng);
    auto base = feat::extract_features(make_slice(x, y, z));
    std::vector<double> shifted(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) shifted[i] = x[i] + 5.0;
    auto moved = feat::extract_features(make_slice(shifted, y, z));
    REQUIRE(moved.values[0] == Catch::Approx(base.values[0] + 5.0).margin(1e-9));
    for (std::size_t j = 1; j < base.values.size(); ++j) {
        // x_psd_mean / x_psd_std (35, 36) are DC-derived and legitimately move
        if (j == 35 || j == 36) continue;
        REQUIRE(moved.values[j] == Catch::Approx(base.values[j]).margin(1e-9));
    }
    // the PSD of the shifted axis picks up the DC power
    REQUIRE(std::abs(moved.values[35] - base.values[35]) > 1e-6);
}

TEST_CASE("all features match the brute-force oracle") {
    Rng rng(88);
    for (int t = 0; t < 50; ++t) {
        auto x = random_axis(rng);
        auto y = random_axis(rng);
        auto z = random_axis(rng);
        auto fv = feat::extract_features(make_slice(x, y, z));

        std::vector<double> expected;
        for (const auto& axis : {x, y, z}) {
            auto m = oracle::moments(axis);
            expected.insert(expected.end(), {m.mean, m.stddev, m.kurtosis, m.skewness});
            auto amps = oracle::fft_amplitudes(axis, 32);
            expected.insert(expected.end(), amps.begin() + 1, amps.end());
            auto [pm, ps] = oracle::psd_stats(axis, 5.0);
            expected.insert(expected.end(), {pm, ps});
        }
        expected.push_back(oracle::pearson(x, y));
        expected.push_back(oracle::pearson(x, z));
        expected.push_back(oracle::pearson(y, z));

        REQUIRE(fv.values.size() == expected.size());
        for (std::size_t j = 0; j < expected.size(); ++j) {
            const double tol = 1e-6 * std::max({1.0, std::abs(expected[j])});
            REQUIRE(std::abs(fv.values[j] - expected[j]) < tol);
        }
    }
}

TEST_CASE("zscore_fit_transform basics") {
    feat::FeatureMatrix fm;
    fm.layout.include_dc = false;
    auto push_row = [&fm](double a, double b, double c) {
        feat::FeatureVector fv;
        fv.values = {a, b, c};
        fm.rows.push_back(fv);
    };
    push_row(2.0, 7.0, 0.0);
    push_row(4.0, 7.0, 1.0);

    feat::zscore_fit_transform(fm);
    REQUIRE(fm.rows[0].values[0] == Catch::Approx(-1.0).margin(1e-12));
    REQUIRE(fm.rows[1].values[0] == Catch::Approx(1.0).margin(1e-12));
    REQUIRE(fm.rows[0].values[1] == 0.0);  // constant column maps to zeros
    REQUIRE(fm.rows[1].values[1] == 0.0);
    REQUIRE(fm.column_stats.has_value());
    REQUIRE(fm.column_stats->mean[0] == Catch::Approx(3.0));
    REQUIRE(fm.column_stats->stddev[0] == Catch::Approx(1.0));
}

TEST_CASE("zscore requires at least two rows") {
    Matrix one{{1.0, 2.0}};
    REQUIRE_THROWS_AS(feat::zscore_fit(one), DataError);
}

TEST_CASE("an already-normalized column is a fixed point") {
    Matrix m{{-1.0, 5.0}, {1.0, 5.0}};
    auto st = feat::zscore_fit(m);
    feat::zscore_apply(st, m);
    REQUIRE(m[0][0] == Catch::Approx(-1.0).margin(1e-9));
    REQUIRE(m[1][0] == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("normalized columns end up with mean 0 and std 1") {
    Rng rng(99);
    Matrix m(37, std::vector<double>(5));
    for (auto& row : m) {
        for (double& v : row) v = rng.normal(3.0, 7.0);
    }
    auto st = feat::zscore_fit(m);
    feat::zscore_apply(st, m);
    for (std::size_t j = 0; j < 5; ++j) {
        double mean = 0.0;
        for (const auto& row : m) mean += row[j];
        mean /= static_cast<double>(m.size());
        double var = 0.0;
        for (const auto& row : m) var += (row[j] - mean) * (row[j] - mean);
        var /= static_cast<double>(m.size());
        REQUIRE(std::abs(mean) < 1e-9);
        REQUIRE(std::abs(std::sqrt(var) - 1.0) < 1e-9);
    }
}

TEST_CASE("feature CSV round-trips exactly") {
    Rng rng(111);
    feat::FeatureMatrix fm;
    for (int r = 0; r < 4; ++r) {
        WindowSlice s;
        s.axes = {random_axis(rng), random_axis(rng), random_axis(rng)};
        s.label = r % 2 == 0 ? Emotion::anger : Emotion::happy;
        s.subject_id = "s" + std::to_string(r);
        s.joint = Joint::ankle;
        fm.rows.push_back(feat::extract_features(s));
    }
    std::ostringstream os;
    feat::write_feature_csv(fm, os);
    std::istringstream is(os.str());
    auto back = feat::read_feature_csv(is);
    REQUIRE(back.rows.size() == fm.rows.size());
    REQUIRE(back.layout.include_dc == fm.layout.include_dc);
    for (std::size_t r = 0; r < fm.rows.size(); ++r) {
        REQUIRE(back.rows[r].values == fm.rows[r].values);  // bit-exact
        REQUIRE(back.rows[r].label == fm.rows[r].label);
        REQUIRE(back.rows[r].subject_id == fm.rows[r].subject_id);
        REQUIRE(back.rows[r].joint == fm.rows[r].joint);
    }
}
