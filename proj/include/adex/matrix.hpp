#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace adex {

/// Dense row-major matrix of doubles. Values-only companion of Trace;
/// also the slice type handed to explainers.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }
    std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }

    std::vector<double> column(std::size_t c) const {
        std::vector<double> out(rows);
        for (std::size_t r = 0; r < rows; ++r)
            out[r] = at(r, c);
        return out;
    }

    /// Rows [lo, hi) as a new matrix.
    Matrix slice_rows(std::size_t lo, std::size_t hi) const {
        Matrix out(hi - lo, cols);
        std::copy(data.begin() + static_cast<std::ptrdiff_t>(lo * cols),
                  data.begin() + static_cast<std::ptrdiff_t>(hi * cols), out.data.begin());
        return out;
    }

    bool empty() const { return rows == 0 || cols == 0; }
};

} // namespace adex
