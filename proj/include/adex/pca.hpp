#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "adex/error.hpp"
#include "adex/matrix.hpp"
#include "adex/types.hpp"

namespace adex {

namespace detail {

/// Eigendecomposition of a symmetric matrix by the cyclic Jacobi method.
/// Returns eigenvalues descending with matching eigenvectors (rows of the
/// returned matrix). Accurate to machine precision at the sizes used here.
inline void jacobi_eigen_symmetric(Matrix a, std::vector<double>& eigenvalues,
                                   Matrix& eigenvectors) {
    const std::size_t n = a.rows;
    eigenvectors = Matrix(n, n);
    for (std::size_t i = 0; i < n; ++i)
        eigenvectors.at(i, i) = 1.0;

    const int max_sweeps = 64;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        double diag = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            diag += a.at(p, p) * a.at(p, p);
            for (std::size_t q = p + 1; q < n; ++q)
                off += a.at(p, q) * a.at(p, q);
        }
        if (2.0 * off <= 1e-28 * (diag + 2.0 * off) || off < 1e-300)
            break;

        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                double apq = a.at(p, q);
                if (apq == 0.0)
                    continue;
                double app = a.at(p, p);
                double aqq = a.at(q, q);
                if (sweep > 3 && std::abs(apq) <= 1e-15 * (std::abs(app) + std::abs(aqq))) {
                    a.at(p, q) = a.at(q, p) = 0.0;
                    continue;
                }
                double tau = (aqq - app) / (2.0 * apq);
                double t = (tau >= 0.0 ? 1.0 : -1.0) /
                           (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                double c = 1.0 / std::sqrt(1.0 + t * t);
                double s = t * c;

                for (std::size_t k = 0; k < n; ++k) {
                    double akp = a.at(k, p);
                    double akq = a.at(k, q);
                    a.at(k, p) = c * akp - s * akq;
                    a.at(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    double apk = a.at(p, k);
                    double aqk = a.at(q, k);
                    a.at(p, k) = c * apk - s * aqk;
                    a.at(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    double vkp = eigenvectors.at(p, k);
                    double vkq = eigenvectors.at(q, k);
                    eigenvectors.at(p, k) = c * vkp - s * vkq;
                    eigenvectors.at(q, k) = s * vkp + c * vkq;
                }
            }
        }
    }

    eigenvalues.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        eigenvalues[i] = a.at(i, i);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return eigenvalues[x] > eigenvalues[y]; });
    std::vector<double> sorted_vals(n);
    Matrix sorted_vecs(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        sorted_vals[i] = eigenvalues[order[i]];
        for (std::size_t k = 0; k < n; ++k)
            sorted_vecs.at(i, k) = eigenvectors.at(order[i], k);
    }
    eigenvalues = std::move(sorted_vals);
    eigenvectors = std::move(sorted_vecs);
}

} // namespace detail

/// Principal components of a mean-centered sample, with explained-variance
/// ratios for all input dimensions. Components are orthonormal rows.
struct PcaModel {
    std::vector<double> mean_vector;      // length m
    Matrix components;                    // k x m, orthonormal rows
    std::vector<double> explained_ratios; // length m, non-increasing, sum 1
    std::size_t k = 0;

    std::size_t input_dim() const { return mean_vector.size(); }

    /// Project one row onto the k components (centering first).
    std::vector<double> project(std::span<const double> row) const {
        std::vector<double> out(k, 0.0);
        for (std::size_t c = 0; c < k; ++c) {
            double dot = 0.0;
            for (std::size_t j = 0; j < input_dim(); ++j)
                dot += components.at(c, j) * (row[j] - mean_vector[j]);
            out[c] = dot;
        }
        return out;
    }

    /// Back-projection of a coefficient vector to the input space.
    std::vector<double> reconstruct(std::span<const double> coeffs) const {
        std::vector<double> out(mean_vector);
        for (std::size_t c = 0; c < k; ++c)
            for (std::size_t j = 0; j < input_dim(); ++j)
                out[j] += coeffs[c] * components.at(c, j);
        return out;
    }

    /// Mean squared reconstruction error of one row.
    double reconstruction_mse(std::span<const double> row) const {
        auto rec = reconstruct(project(row));
        double sum = 0.0;
        for (std::size_t j = 0; j < input_dim(); ++j) {
            double d = row[j] - rec[j];
            sum += d * d;
        }
        return sum / static_cast<double>(input_dim());
    }
};

/// Number of components for a fit: either fixed k or the smallest k whose
/// cumulative explained-variance ratio reaches `coverage`.
struct PcaTarget {
    std::size_t k = 0;       // 0 means "use coverage"
    double coverage = 0.0;

    static PcaTarget fixed(std::size_t k) { return {k, 0.0}; }
    static PcaTarget variance(double coverage) { return {0, coverage}; }
};

/// Fit PCA on the rows of `training`. The decomposition runs on the
/// covariance of the mean-centered matrix, which yields the same components
/// and ratios as an SVD of the centered data.
inline PcaModel fit_pca(const Matrix& training, PcaTarget target) {
    const std::size_t n = training.rows;
    const std::size_t m = training.cols;
    if (n < 2)
        throw DegenerateError("fit_pca: need at least 2 rows");
    if (target.k == 0 && (target.coverage <= 0.0 || target.coverage > 1.0))
        throw ConfigError("fit_pca: coverage must be in (0, 1]");
    if (target.k > m)
        throw ConfigError("fit_pca: k exceeds feature count");

    PcaModel model;
    model.mean_vector.assign(m, 0.0);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < m; ++c)
            model.mean_vector[c] += training.at(r, c);
    for (auto& v : model.mean_vector)
        v /= static_cast<double>(n);

    Matrix cov(m, m);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t i = 0; i < m; ++i) {
            double di = training.at(r, i) - model.mean_vector[i];
            for (std::size_t j = i; j < m; ++j)
                cov.at(i, j) += di * (training.at(r, j) - model.mean_vector[j]);
        }
    }
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < i; ++j)
            cov.at(i, j) = cov.at(j, i);
    double denom = static_cast<double>(n - 1);
    for (auto& v : cov.data)
        v /= denom;

    double total_var = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        total_var += cov.at(i, i);
    if (total_var <= 0.0)
        throw DegenerateError("fit_pca: zero-variance training matrix");

    std::vector<double> eigenvalues;
    Matrix eigenvectors;
    detail::jacobi_eigen_symmetric(std::move(cov), eigenvalues, eigenvectors);

    model.explained_ratios.resize(m);
    for (std::size_t i = 0; i < m; ++i)
        model.explained_ratios[i] = std::max(eigenvalues[i], 0.0) / total_var;

    std::size_t k = target.k;
    if (k == 0) {
        double cum = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            cum += model.explained_ratios[i];
            if (cum >= target.coverage - 1e-12) {
                k = i + 1;
                break;
            }
        }
        if (k == 0)
            k = m;
    }
    model.k = k;
    model.components = Matrix(k, m);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < m; ++j)
            model.components.at(i, j) = eigenvectors.at(i, j);
    return model;
}

/// Project a trace onto a fitted model; output features are pc1..pck.
inline Trace apply_pca(const PcaModel& model, const Trace& trace) {
    if (trace.feature_count() != model.input_dim())
        throw IntegrityError("apply_pca: trace has " + std::to_string(trace.feature_count()) +
                             " features, model expects " + std::to_string(model.input_dim()));
    Trace out;
    out.trace_id = trace.trace_id;
    out.app_id = trace.app_id;
    out.timestamps = trace.timestamps;
    for (std::size_t c = 0; c < model.k; ++c)
        out.features.push_back("pc" + std::to_string(c + 1));
    out.values = Matrix(trace.record_count(), model.k);
    for (std::size_t r = 0; r < trace.record_count(); ++r) {
        auto proj = model.project(trace.values.row(r));
        for (std::size_t c = 0; c < model.k; ++c)
            out.values.at(r, c) = proj[c];
    }
    return out;
}

} // namespace adex
