#pragma once

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "boltnet/errors.hpp"

namespace boltnet {

/// Dense vector of doubles.
class Vector {
public:
    Vector() = default;
    explicit Vector(std::size_t len, double fill = 0.0) : data_(len, fill) {}
    Vector(std::initializer_list<double> values) : data_(values) {}
    explicit Vector(std::span<const double> values) : data_(values.begin(), values.end()) {}

    [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }
    [[nodiscard]] bool empty() const noexcept { return data_.empty(); }

    double& operator[](std::size_t i) noexcept { return data_[i]; }
    double operator[](std::size_t i) const noexcept { return data_[i]; }

    [[nodiscard]] std::span<double> values() noexcept { return data_; }
    [[nodiscard]] std::span<const double> values() const noexcept { return data_; }

    auto begin() noexcept { return data_.begin(); }
    auto end() noexcept { return data_.end(); }
    [[nodiscard]] auto begin() const noexcept { return data_.begin(); }
    [[nodiscard]] auto end() const noexcept { return data_.end(); }

    void fill(double value) noexcept { std::fill(data_.begin(), data_.end(), value); }

    friend bool operator==(const Vector&, const Vector&) = default;

private:
    std::vector<double> data_;
};

/// Dense row-major matrix of doubles. Always at least 1x1.
class Matrix {
public:
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0) : rows_(rows), cols_(cols) {
        if (rows == 0 || cols == 0) {
            throw ShapeError("matrix dimensions must be positive, got " + std::to_string(rows) + "x" +
                             std::to_string(cols));
        }
        data_.assign(rows * cols, fill);
    }

    Matrix(std::initializer_list<std::initializer_list<double>> rows)
        : Matrix(rows.size(), rows.size() == 0 ? 0 : rows.begin()->size()) {
        std::size_t i = 0;
        for (const auto& row : rows) {
            if (row.size() != cols_) throw ShapeError("ragged matrix literal");
            std::copy(row.begin(), row.end(), data_.begin() + static_cast<std::ptrdiff_t>(i * cols_));
            ++i;
        }
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }

    double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

    [[nodiscard]] std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
    [[nodiscard]] std::span<const double> row(std::size_t i) const noexcept {
        return {data_.data() + i * cols_, cols_};
    }

    [[nodiscard]] std::span<double> values() noexcept { return data_; }
    [[nodiscard]] std::span<const double> values() const noexcept { return data_; }

    void fill(double value) noexcept { std::fill(data_.begin(), data_.end(), value); }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> data_;
};

namespace detail {

inline std::string dims(const Matrix& m) { return std::to_string(m.rows()) + "x" + std::to_string(m.cols()); }

}  // namespace detail

/// w = m * v
[[nodiscard]] inline Vector matvec(const Matrix& m, const Vector& v) {
    if (m.cols() != v.size()) {
        throw ShapeError("matvec: matrix is " + detail::dims(m) + " but vector has length " +
                         std::to_string(v.size()));
    }
    Vector w(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const auto r = m.row(i);
        double acc = 0.0;
        for (std::size_t j = 0; j < r.size(); ++j) acc += r[j] * v[j];
        w[i] = acc;
    }
    return w;
}

/// w = m^T * v, without materializing the transpose.
[[nodiscard]] inline Vector matvec_transposed(const Matrix& m, const Vector& v) {
    if (m.rows() != v.size()) {
        throw ShapeError("matvec_transposed: matrix is " + detail::dims(m) + " but vector has length " +
                         std::to_string(v.size()));
    }
    Vector w(m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const auto r = m.row(i);
        for (std::size_t j = 0; j < r.size(); ++j) w[j] += r[j] * v[i];
    }
    return w;
}

[[nodiscard]] inline Matrix outer(const Vector& u, const Vector& v) {
    Matrix m(u.size(), v.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        for (std::size_t j = 0; j < v.size(); ++j) m(i, j) = u[i] * v[j];
    }
    return m;
}

/// Elementwise product.
[[nodiscard]] inline Vector hadamard(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) {
        throw ShapeError("hadamard: lengths " + std::to_string(a.size()) + " and " + std::to_string(b.size()));
    }
    Vector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
    return out;
}

/// y += alpha * x
inline void axpy_inplace(double alpha, const Matrix& x, Matrix& y) {
    if (x.rows() != y.rows() || x.cols() != y.cols()) {
        throw ShapeError("axpy: shapes " + detail::dims(x) + " and " + detail::dims(y));
    }
    auto yv = y.values();
    const auto xv = x.values();
    for (std::size_t i = 0; i < yv.size(); ++i) yv[i] += alpha * xv[i];
}

inline void axpy_inplace(double alpha, const Vector& x, Vector& y) {
    if (x.size() != y.size()) {
        throw ShapeError("axpy: lengths " + std::to_string(x.size()) + " and " + std::to_string(y.size()));
    }
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += alpha * x[i];
}

/// Returns y + alpha * x.
[[nodiscard]] inline Matrix axpy(double alpha, const Matrix& x, Matrix y) {
    axpy_inplace(alpha, x, y);
    return y;
}

[[nodiscard]] inline Vector axpy(double alpha, const Vector& x, Vector y) {
    axpy_inplace(alpha, x, y);
    return y;
}

}  // namespace boltnet
