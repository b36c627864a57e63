#pragma once

// Independent brute-force references used to cross-check the library. These
// deliberately stay naive -- direct O(N^2) DFT sums, textbook moment
// formulas, power iteration with deflation -- and never call into
// include/gaitline so the two routes share no code.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

namespace oracle {

using Matrix = std::vector<std::vector<double>>;

inline std::vector<std::complex<double>> naive_dft(const std::vector<double>& x) {
    const std::size_t n = x.size();
    std::vector<std::complex<double>> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        double re = 0.0, im = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double ang = -2.0 * M_PI * static_cast<double>(k) * static_cast<double>(i) /
                               static_cast<double>(n);
            re += x[i] * std::cos(ang);
            im += x[i] * std::sin(ang);
        }
        out[k] = {re, im};
    }
    return out;
}

struct Moments {
    double mean, stddev, kurtosis, skewness;
};

inline Moments moments(const std::vector<double>& x) {
    bool constant = true;
    for (double v : x) constant = constant && v == x[0];
    if (constant) return {x[0], 0.0, 0.0, 0.0};  // zero-variance convention

    const double n = static_cast<double>(x.size());
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= n;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : x) {
        m2 += std::pow(v - mean, 2.0);
        m3 += std::pow(v - mean, 3.0);
        m4 += std::pow(v - mean, 4.0);
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    Moments out{mean, std::sqrt(m2), 0.0, 0.0};
    if (m2 > 0.0) {
        out.skewness = m3 / std::pow(m2, 1.5);
        out.kurtosis = m4 / (m2 * m2);
    }
    return out;
}

inline std::vector<double> fft_amplitudes(const std::vector<double>& x, int bins) {
    auto spec = naive_dft(x);
    const double n = static_cast<double>(x.size());
    std::vector<double> amp(static_cast<std::size_t>(bins));
    amp[0] = spec[0].real() / n;  // signed DC: equals the mean of a real signal
    for (int k = 1; k < bins; ++k) {
        amp[static_cast<std::size_t>(k)] = 2.0 * std::abs(spec[static_cast<std::size_t>(k)]) / n;
    }
    return amp;
}

inline std::pair<double, double> psd_stats(const std::vector<double>& x, double fs) {
    auto spec = naive_dft(x);
    const std::size_t bins = x.size() / 2 + 1;
    std::vector<double> p(bins);
    double mean = 0.0;
    for (std::size_t k = 0; k < bins; ++k) {
        p[k] = (spec[k].real() * spec[k].real() + spec[k].imag() * spec[k].imag()) /
               (static_cast<double>(x.size()) * fs);
        mean += p[k];
    }
    mean /= static_cast<double>(bins);
    double var = 0.0;
    for (double v : p) var += (v - mean) * (v - mean);
    var /= static_cast<double>(bins);
    return {mean, std::sqrt(var)};
}

inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    bool a_const = true, b_const = true;
    for (std::size_t i = 0; i < a.size(); ++i) {
        a_const = a_const && a[i] == a[0];
        b_const = b_const && b[i] == b[0];
    }
    if (a_const || b_const) return 0.0;  // zero-variance convention

    const double n = static_cast<double>(a.size());
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    if (saa <= 0.0 || sbb <= 0.0) return 0.0;
    return sab / std::sqrt(saa * sbb);
}

/// Literal transcription of the filter formula.
inline std::vector<double> moving_average(const std::vector<double>& input, int w) {
    std::vector<double> out(input.size() - static_cast<std::size_t>(w) + 1);
    for (std::size_t i = 0; i < out.size(); ++i) {
        double acc = 0.0;
        for (int j = 0; j < w; ++j) acc += input[i + static_cast<std::size_t>(j)];
        out[i] = acc / static_cast<double>(w);
    }
    return out;
}

struct EigenPairs {
    std::vector<double> values;  // descending
    Matrix vectors;              // vectors[i] pairs with values[i]
};

/// Power iteration with deflation on a symmetric PSD matrix. Slow and
/// simple; adequate for the small instances the tests use.
inline EigenPairs eig_power_deflation(Matrix a, int max_iter = 200000, double tol = 1e-13) {
    const std::size_t d = a.size();
    EigenPairs out;
    for (std::size_t m = 0; m < d; ++m) {
        std::vector<double> v(d, 0.0);
        v[m % d] = 1.0;
        for (std::size_t j = 0; j < d; ++j) v[j] += 1e-3 * static_cast<double>(j + m + 1);
        double norm = 0.0;
        for (double x : v) norm += x * x;
        for (double& x : v) x /= std::sqrt(norm);

        double lambda = 0.0;
        for (int it = 0; it < max_iter; ++it) {
            std::vector<double> av(d, 0.0);
            for (std::size_t r = 0; r < d; ++r) {
                for (std::size_t c = 0; c < d; ++c) av[r] += a[r][c] * v[c];
            }
            double av_norm = 0.0;
            for (double x : av) av_norm += x * x;
            av_norm = std::sqrt(av_norm);
            if (av_norm < 1e-300) {  // deflated to (near) zero: any unit vector works
                lambda = 0.0;
                break;
            }
            double resid = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                const double next = av[j] / av_norm;
                resid += (next - v[j]) * (next - v[j]);
                v[j] = next;
            }
            lambda = 0.0;
            for (std::size_t r = 0; r < d; ++r) {
                for (std::size_t c = 0; c < d; ++c) lambda += v[r] * a[r][c] * v[c];
            }
            if (std::sqrt(resid) < tol) break;
        }
        out.values.push_back(lambda);
        out.vectors.push_back(v);
        for (std::size_t r = 0; r < d; ++r) {
            for (std::size_t c = 0; c < d; ++c) a[r][c] -= lambda * v[r] * v[c];
        }
    }
    return out;
}

/// Exhaustive primal search for a 2-D linear soft-margin SVM, refined over
/// a few zoom rounds. Returns the best primal objective found.
inline double svm_primal_grid(const Matrix& x, const std::vector<double>& y, double c_param,
                              double radius = 8.0, int steps = 21, int rounds = 4) {
    auto primal = [&](double w0, double w1, double b) {
        double obj = 0.5 * (w0 * w0 + w1 * w1);
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double margin = y[i] * (w0 * x[i][0] + w1 * x[i][1] + b);
            obj += c_param * std::max(0.0, 1.0 - margin);
        }
        return obj;
    };
    double cw0 = 0.0, cw1 = 0.0, cb = 0.0, best = primal(0.0, 0.0, 0.0);
    double r = radius;
    for (int round = 0; round < rounds; ++round) {
        double b0 = cw0, b1 = cw1, bb = cb;
        for (int i = 0; i < steps; ++i) {
            for (int j = 0; j < steps; ++j) {
                for (int k = 0; k < steps; ++k) {
                    const double w0 = cw0 - r + 2.0 * r * i / (steps - 1);
                    const double w1 = cw1 - r + 2.0 * r * j / (steps - 1);
                    const double b = cb - r + 2.0 * r * k / (steps - 1);
                    const double obj = primal(w0, w1, b);
                    if (obj < best) {
                        best = obj;
                        b0 = w0;
                        b1 = w1;
                        bb = b;
                    }
                }
            }
        }
        cw0 = b0;
        cw1 = b1;
        cb = bb;
        r *= 2.0 / (steps - 1);  // shrink around the incumbent
    }
    return best;
}

struct Stump {
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;      // best Gini gain
    double accuracy = 0.0;  // best training accuracy of any single split
};

/// Try every feature and every midpoint threshold.
inline Stump best_stump(const Matrix& x, const std::vector<int>& y, int n_classes) {
    const std::size_t n = x.size();
    auto gini = [&](const std::vector<int>& counts, int total) {
        if (total == 0) return 0.0;
        double g = 1.0;
        for (int c : counts) {
            const double p = static_cast<double>(c) / total;
            g -= p * p;
        }
        return g;
    };
    std::vector<int> all(static_cast<std::size_t>(n_classes), 0);
    for (int c : y) all[static_cast<std::size_t>(c)]++;
    const double parent = gini(all, static_cast<int>(n));

    Stump best;
    for (std::size_t f = 0; f < x[0].size(); ++f) {
        std::vector<double> vals;
        for (std::size_t i = 0; i < n; ++i) vals.push_back(x[i][f]);
        std::sort(vals.begin(), vals.end());
        for (std::size_t k = 0; k + 1 < n; ++k) {
            if (vals[k] == vals[k + 1]) continue;
            const double thr = 0.5 * (vals[k] + vals[k + 1]);
            std::vector<int> left(static_cast<std::size_t>(n_classes), 0);
            std::vector<int> right(static_cast<std::size_t>(n_classes), 0);
            for (std::size_t i = 0; i < n; ++i) {
                (x[i][f] < thr ? left : right)[static_cast<std::size_t>(y[i])]++;
            }
            int nl = 0, nr = 0;
            for (int c : left) nl += c;
            for (int c : right) nr += c;
            const double child = (nl * gini(left, nl) + nr * gini(right, nr)) / n;
            const double gain = parent - child;
            int correct = *std::max_element(left.begin(), left.end()) +
                          *std::max_element(right.begin(), right.end());
            const double acc = static_cast<double>(correct) / n;
            if (gain > best.gain) {
                best.feature = static_cast<int>(f);
                best.threshold = thr;
                best.gain = gain;
            }
            if (acc > best.accuracy) best.accuracy = acc;
        }
    }
    return best;
}

}  // namespace oracle
