#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "adex/error.hpp"
#include "adex/explain.hpp"
#include "adex/matrix.hpp"
#include "adex/rng.hpp"
#include "adex/types.hpp"

namespace adex {

/// Scores one candidate window (same shape as the anomaly window).
using WindowScoreFn = std::function<double(const Matrix&)>;

namespace detail {

/// Weighted least squares via normal equations with a tiny ridge; returns
/// the residual weighted SSE and fills `coeffs` (intercept first).
inline double weighted_linear_fit(const std::vector<std::vector<double>>& columns,
                                  const std::vector<double>& y,
                                  const std::vector<double>& weights,
                                  std::vector<double>& coeffs) {
    const std::size_t n = y.size();
    const std::size_t d = columns.size() + 1;
    std::vector<double> ata(d * d, 0.0), aty(d, 0.0);
    auto col = [&](std::size_t j, std::size_t i) -> double {
        return j == 0 ? 1.0 : columns[j - 1][i];
    };
    for (std::size_t i = 0; i < n; ++i) {
        double w = weights[i];
        for (std::size_t a = 0; a < d; ++a) {
            double va = col(a, i);
            aty[a] += w * va * y[i];
            for (std::size_t b = a; b < d; ++b)
                ata[a * d + b] += w * va * col(b, i);
        }
    }
    for (std::size_t a = 0; a < d; ++a) {
        ata[a * d + a] += 1e-12;
        for (std::size_t b = 0; b < a; ++b)
            ata[a * d + b] = ata[b * d + a];
    }

    // Gaussian elimination with partial pivoting (d <= k+1, tiny).
    coeffs.assign(d, 0.0);
    std::vector<double> m = ata, rhs = aty;
    for (std::size_t c = 0; c < d; ++c) {
        std::size_t pivot = c;
        for (std::size_t r = c + 1; r < d; ++r)
            if (std::abs(m[r * d + c]) > std::abs(m[pivot * d + c]))
                pivot = r;
        for (std::size_t j = 0; j < d; ++j)
            std::swap(m[c * d + j], m[pivot * d + j]);
        std::swap(rhs[c], rhs[pivot]);
        double diag = m[c * d + c];
        if (diag == 0.0)
            continue;
        for (std::size_t r = c + 1; r < d; ++r) {
            double f = m[r * d + c] / diag;
            for (std::size_t j = c; j < d; ++j)
                m[r * d + j] -= f * m[c * d + j];
            rhs[r] -= f * rhs[c];
        }
    }
    for (std::size_t c = d; c-- > 0;) {
        double sum = rhs[c];
        for (std::size_t j = c + 1; j < d; ++j)
            sum -= m[c * d + j] * coeffs[j];
        coeffs[c] = m[c * d + c] != 0.0 ? sum / m[c * d + c] : 0.0;
    }

    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double pred = coeffs[0];
        for (std::size_t j = 1; j < d; ++j)
            pred += coeffs[j] * col(j, i);
        double r = y[i] - pred;
        sse += weights[i] * r * r;
    }
    return sse;
}

} // namespace detail

/// Model-dependent explanation by local perturbation: features of the
/// anomaly window are independently kept or replaced by their reference
/// means, samples are weighted by proximity to the original, and a greedy
/// forward selection picks the k features whose mask bits best explain the
/// model's score in a weighted linear fit.
inline Explanation explain_surrogate(const WindowScoreFn& score_fn, const Matrix& anomaly_window,
                                     const std::vector<double>& reference_means,
                                     const std::vector<std::string>& features,
                                     const SurrogateConfig& config, std::uint64_t seed) {
    if (anomaly_window.cols != reference_means.size() || anomaly_window.cols != features.size())
        throw IntegrityError("explain_surrogate: feature shape mismatch");
    if (anomaly_window.rows == 0)
        throw DegenerateError("explain_surrogate: empty anomaly window");
    const std::size_t m = anomaly_window.cols;
    const std::size_t k = std::min<std::size_t>(config.k, m);
    const std::size_t samples = std::max<std::size_t>(config.perturbation_count, 1);

    Rng rng(seed);
    std::vector<std::vector<double>> mask_cols(m, std::vector<double>(samples));
    std::vector<double> y(samples), weights(samples);
    Matrix perturbed = anomaly_window;
    for (std::size_t i = 0; i < samples; ++i) {
        std::size_t replaced = 0;
        std::vector<bool> keep(m);
        for (std::size_t c = 0; c < m; ++c) {
            keep[c] = rng.bernoulli(0.5);
            mask_cols[c][i] = keep[c] ? 1.0 : 0.0;
            replaced += keep[c] ? 0 : 1;
        }
        for (std::size_t r = 0; r < anomaly_window.rows; ++r)
            for (std::size_t c = 0; c < m; ++c)
                perturbed.at(r, c) = keep[c] ? anomaly_window.at(r, c) : reference_means[c];
        y[i] = score_fn(perturbed);
        double dist = static_cast<double>(replaced) / static_cast<double>(m);
        weights[i] = std::exp(-(dist * dist) / (config.kernel_width * config.kernel_width));
    }

    // Degenerate score function: nothing to attribute.
    double wsum = 0.0, ymean = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
        wsum += weights[i];
        ymean += weights[i] * y[i];
    }
    ymean /= wsum;
    double yvar = 0.0;
    for (std::size_t i = 0; i < samples; ++i)
        yvar += weights[i] * (y[i] - ymean) * (y[i] - ymean);

    Explanation out;
    out.kind = ExplanationKind::Weights;
    if (yvar <= 1e-24 * wsum) {
        out.degenerate = true;
        for (std::size_t c = 0; c < k; ++c) {
            out.feature_set.push_back(features[c]);
            out.weights.push_back({features[c], 0.0});
        }
        return out;
    }

    std::vector<std::size_t> selected;
    std::vector<std::vector<double>> design;
    std::vector<double> coeffs;
    for (std::size_t step = 0; step < k; ++step) {
        double best_sse = 0.0;
        std::size_t best_feature = m;
        for (std::size_t c = 0; c < m; ++c) {
            bool taken = false;
            for (std::size_t s : selected)
                taken |= s == c;
            if (taken)
                continue;
            design.push_back(mask_cols[c]);
            double sse = detail::weighted_linear_fit(design, y, weights, coeffs);
            design.pop_back();
            if (best_feature == m || sse < best_sse) {
                best_sse = sse;
                best_feature = c;
            }
        }
        selected.push_back(best_feature);
        design.push_back(mask_cols[best_feature]);
    }

    detail::weighted_linear_fit(design, y, weights, coeffs);
    for (std::size_t j = 0; j < selected.size(); ++j) {
        out.feature_set.push_back(features[selected[j]]);
        out.weights.push_back({features[selected[j]], coeffs[j + 1]});
    }
    return out;
}

} // namespace adex
