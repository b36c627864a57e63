#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "gaitline/common.hpp"

namespace gaitline::pca {

struct EigenDecomposition {
    std::vector<double> values;  // unordered, one per dimension
    Matrix vectors;              // vectors[i] is the eigenvector for values[i]
};

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. Plenty for the
/// 114x114 covariance matrices this pipeline produces.
inline EigenDecomposition eigh_jacobi(Matrix a) {
    const std::size_t d = a.size();
    for (const auto& row : a) {
        if (row.size() != d) throw DataError("eigh_jacobi: matrix not square");
    }
    Matrix v(d, std::vector<double>(d, 0.0));
    for (std::size_t i = 0; i < d; ++i) v[i][i] = 1.0;

    double norm = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) norm += a[i][j] * a[i][j];
    }
    norm = std::sqrt(norm);
    const double stop = std::max(norm, 1.0) * 1e-14;

    const int max_sweeps = 64;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < d; ++p) {
            for (std::size_t q = p + 1; q < d; ++q) off += a[p][q] * a[p][q];
        }
        if (std::sqrt(2.0 * off) < stop) break;

        for (std::size_t p = 0; p < d; ++p) {
            for (std::size_t q = p + 1; q < d; ++q) {
                const double apq = a[p][q];
                if (std::abs(apq) < stop / static_cast<double>(d * d + 1)) continue;
                const double tau = (a[q][q] - a[p][p]) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;

                for (std::size_t k = 0; k < d; ++k) {
                    const double akp = a[k][p];
                    const double akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < d; ++k) {
                    const double apk = a[p][k];
                    const double aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < d; ++k) {
                    const double vkp = v[k][p];
                    const double vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }

    EigenDecomposition out;
    out.values.resize(d);
    out.vectors.assign(d, std::vector<double>(d));
    for (std::size_t i = 0; i < d; ++i) {
        out.values[i] = a[i][i];
        for (std::size_t k = 0; k < d; ++k) out.vectors[i][k] = v[k][i];
    }
    return out;
}

struct PcaModel {
    std::vector<double> mean;                      // column means of the fit data
    Matrix components;                             // k x d, rows orthonormal
    std::vector<double> eigenvalues;               // k, descending, >= 0
    std::vector<double> explained_variance_ratio;  // k, sums to <= 1
    bool degenerate = false;  // all-identical rows: zero spectrum, k forced to 1

    std::size_t dim() const { return mean.size(); }
    std::size_t retained() const { return components.size(); }
};

/// Fit PCA on rows (population covariance, divide by N). Retains the smallest
/// k whose cumulative explained variance reaches variance_threshold. Each
/// component is sign-fixed so its largest-magnitude entry is positive, which
/// keeps serialized models and tests reproducible.
inline PcaModel pca_fit(const Matrix& rows, double variance_threshold = 0.95) {
    if (rows.size() < 2) throw DataError("pca_fit: need at least 2 rows");
    if (!(variance_threshold > 0.0) || variance_threshold > 1.0) {
        throw DataError("pca_fit: variance_threshold must be in (0, 1]");
    }
    const std::size_t n = rows.size();
    const std::size_t d = rows[0].size();
    for (const auto& r : rows) {
        if (r.size() != d) throw DataError("pca_fit: ragged matrix");
        for (double x : r) {
            if (!std::isfinite(x)) throw DataError("pca_fit: non-finite entry");
        }
    }

    PcaModel model;
    model.mean.assign(d, 0.0);
    for (const auto& r : rows) {
        for (std::size_t j = 0; j < d; ++j) model.mean[j] += r[j];
    }
    for (double& m : model.mean) m /= static_cast<double>(n);

    bool all_identical = true;
    for (const auto& r : rows) all_identical = all_identical && r == rows[0];

    Matrix cov(d, std::vector<double>(d, 0.0));
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < d; ++i) {
            const double di = r[i] - model.mean[i];
            for (std::size_t j = i; j < d; ++j) {
                cov[i][j] += di * (r[j] - model.mean[j]);
            }
        }
    }
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i; j < d; ++j) {
            cov[i][j] /= static_cast<double>(n);
            cov[j][i] = cov[i][j];
        }
    }

    EigenDecomposition eig = eigh_jacobi(cov);

    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return eig.values[a] > eig.values[b];
    });

    std::vector<double> values(d);
    for (std::size_t i = 0; i < d; ++i) {
        double v = eig.values[order[i]];
        if (v < 0.0) {
            if (v < -1e-10) {
                throw NumericError("pca_fit: covariance eigenvalue " + std::to_string(v) +
                                   " below -1e-10");
            }
            v = 0.0;
        }
        values[i] = v;
    }

    const double total = std::accumulate(values.begin(), values.end(), 0.0);
    std::size_t k = 1;
    if (all_identical || total <= 0.0) {
        model.degenerate = true;  // all rows identical: zero spectrum
        std::fill(values.begin(), values.end(), 0.0);
    } else {
        double cum = 0.0;
        for (k = 0; k < d;) {
            cum += values[k];
            ++k;
            if (cum / total >= variance_threshold) break;
        }
    }

    model.eigenvalues.assign(values.begin(), values.begin() + static_cast<long>(k));
    model.explained_variance_ratio.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
        model.explained_variance_ratio[i] = total > 0.0 ? values[i] / total : 0.0;
    }
    model.components.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
        std::vector<double> comp = eig.vectors[order[i]];
        std::size_t arg = 0;
        for (std::size_t j = 1; j < d; ++j) {
            if (std::abs(comp[j]) > std::abs(comp[arg])) arg = j;
        }
        if (comp[arg] < 0.0) {
            for (double& c : comp) c = -c;
        }
        model.components[i] = std::move(comp);
    }
    return model;
}

/// Project rows as components * (row - mean).
inline Matrix pca_transform(const PcaModel& model, const Matrix& rows) {
    const std::size_t d = model.dim();
    const std::size_t k = model.retained();
    Matrix out(rows.size(), std::vector<double>(k, 0.0));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != d) {
            throw DataError("pca_transform: row width " + std::to_string(rows[r].size()) +
                            " != model dim " + std::to_string(d));
        }
        for (std::size_t i = 0; i < k; ++i) {
            double acc = 0.0;
            const auto& comp = model.components[i];
            for (std::size_t j = 0; j < d; ++j) acc += comp[j] * (rows[r][j] - model.mean[j]);
            out[r][i] = acc;
        }
    }
    return out;
}

/// Inverse projection components^T * coords + mean (exact when k = rank).
inline Matrix pca_reconstruct(const PcaModel& model, const Matrix& coords) {
    const std::size_t d = model.dim();
    const std::size_t k = model.retained();
    Matrix out(coords.size(), std::vector<double>(d));
    for (std::size_t r = 0; r < coords.size(); ++r) {
        if (coords[r].size() != k) {
            throw DataError("pca_reconstruct: row width " + std::to_string(coords[r].size()) +
                            " != retained " + std::to_string(k));
        }
        for (std::size_t j = 0; j < d; ++j) {
            double acc = model.mean[j];
            for (std::size_t i = 0; i < k; ++i) acc += model.components[i][j] * coords[r][i];
            out[r][j] = acc;
        }
    }
    return out;
}

}  // namespace gaitline::pca
