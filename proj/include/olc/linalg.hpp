/*
 Copyright 2026 The OLC Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#pragma once

// Small dense linear algebra kernels. Row-major storage, value semantics,
// no external numeric dependencies.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "olc/errors.hpp"

namespace olc {

inline constexpr double NORM_TOL = 1e-10;
inline constexpr int NORM_MAX_ITER = 10'000;
inline constexpr double LSQ_REG = 1e-12;

class Vector {
public:
    Vector() = default;
    explicit Vector(std::size_t dim, double fill = 0.0) : data_(dim, fill) {}
    Vector(std::initializer_list<double> values) : data_(values) {}
    explicit Vector(std::vector<double> values) : data_(std::move(values)) {}

    static Vector zeros(std::size_t dim) { return Vector(dim); }
    static Vector unit(std::size_t dim, std::size_t i) {
        Vector e(dim);
        e[i] = 1.0;
        return e;
    }

    std::size_t dim() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }

    std::span<double> values() noexcept { return data_; }
    std::span<const double> values() const noexcept { return data_; }
    const std::vector<double>& raw() const noexcept { return data_; }

    auto begin() noexcept { return data_.begin(); }
    auto end() noexcept { return data_.end(); }
    auto begin() const noexcept { return data_.begin(); }
    auto end() const noexcept { return data_.end(); }

    bool is_finite() const {
        return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
    }

    Vector& operator+=(const Vector& o) {
        check_same(o, "+=");
        for (std::size_t i = 0; i < dim(); ++i) data_[i] += o.data_[i];
        return *this;
    }
    Vector& operator-=(const Vector& o) {
        check_same(o, "-=");
        for (std::size_t i = 0; i < dim(); ++i) data_[i] -= o.data_[i];
        return *this;
    }
    Vector& operator*=(double s) {
        for (auto& v : data_) v *= s;
        return *this;
    }

    // y += s * x
    void axpy(double s, const Vector& x) {
        check_same(x, "axpy");
        for (std::size_t i = 0; i < dim(); ++i) data_[i] += s * x.data_[i];
    }

    friend bool operator==(const Vector&, const Vector&) = default;

private:
    void check_same(const Vector& o, const char* op) const {
        if (o.dim() != dim())
            throw InvalidInput(std::string("vector dimension mismatch in ") + op + ": " +
                               std::to_string(dim()) + " vs " + std::to_string(o.dim()));
    }

    std::vector<double> data_;
};

inline Vector operator+(Vector a, const Vector& b) { return a += b; }
inline Vector operator-(Vector a, const Vector& b) { return a -= b; }
inline Vector operator-(Vector a) { return a *= -1.0; }
inline Vector operator*(double s, Vector a) { return a *= s; }
inline Vector operator*(Vector a, double s) { return a *= s; }

inline double dot(const Vector& a, const Vector& b) {
    if (a.dim() != b.dim()) throw InvalidInput("vector dimension mismatch in dot");
    double s = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm(const Vector& a) { return std::sqrt(dot(a, a)); }

inline double distance(const Vector& a, const Vector& b) { return norm(a - b); }

class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> row_major)
        : rows_(rows), cols_(cols), data_(std::move(row_major)) {
        if (data_.size() != rows_ * cols_)
            throw InvalidInput("matrix entry count " + std::to_string(data_.size()) +
                               " does not match " + std::to_string(rows_) + "x" +
                               std::to_string(cols_));
    }
    // Nested row initializer: Matrix{{1, 2}, {3, 4}}.
    Matrix(std::initializer_list<std::initializer_list<double>> rows) {
        rows_ = rows.size();
        cols_ = rows_ ? rows.begin()->size() : 0;
        data_.reserve(rows_ * cols_);
        for (const auto& r : rows) {
            if (r.size() != cols_) throw InvalidInput("ragged matrix initializer");
            data_.insert(data_.end(), r.begin(), r.end());
        }
    }

    static Matrix zeros(std::size_t rows, std::size_t cols) { return Matrix(rows, cols); }
    static Matrix identity(std::size_t n) {
        Matrix I(n, n);
        for (std::size_t i = 0; i < n; ++i) I(i, i) = 1.0;
        return I;
    }
    static Matrix diag(const Vector& d) {
        Matrix D(d.dim(), d.dim());
        for (std::size_t i = 0; i < d.dim(); ++i) D(i, i) = d[i];
        return D;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool is_square() const noexcept { return rows_ == cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<double> values() noexcept { return data_; }
    std::span<const double> values() const noexcept { return data_; }

    std::span<const double> row(std::size_t i) const {
        return std::span<const double>(data_).subspan(i * cols_, cols_);
    }
    Vector col(std::size_t j) const {
        Vector c(rows_);
        for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
        return c;
    }
    void set_col(std::size_t j, const Vector& c) {
        if (c.dim() != rows_) throw InvalidInput("column length mismatch");
        for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = c[i];
    }

    bool is_finite() const {
        return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
    }

    Matrix transpose() const {
        Matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    Matrix& operator+=(const Matrix& o) {
        check_same(o);
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
        return *this;
    }
    Matrix& operator-=(const Matrix& o) {
        check_same(o);
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
        return *this;
    }
    Matrix& operator*=(double s) {
        for (auto& v : data_) v *= s;
        return *this;
    }

    double frobenius_norm() const {
        double s = 0.0;
        for (double v : data_) s += v * v;
        return std::sqrt(s);
    }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    void check_same(const Matrix& o) const {
        if (o.rows_ != rows_ || o.cols_ != cols_)
            throw InvalidInput("matrix shape mismatch: " + std::to_string(rows_) + "x" +
                               std::to_string(cols_) + " vs " + std::to_string(o.rows_) + "x" +
                               std::to_string(o.cols_));
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

inline Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
inline Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
inline Matrix operator*(double s, Matrix a) { return a *= s; }

inline Vector operator*(const Matrix& m, const Vector& x) {
    if (m.cols() != x.dim())
        throw InvalidInput("matrix-vector dimension mismatch: " + std::to_string(m.rows()) + "x" +
                           std::to_string(m.cols()) + " times " + std::to_string(x.dim()));
    Vector y(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        double s = 0.0;
        auto r = m.row(i);
        for (std::size_t j = 0; j < m.cols(); ++j) s += r[j] * x[j];
        y[i] = s;
    }
    return y;
}

// m^T x without forming the transpose.
inline Vector transpose_times(const Matrix& m, const Vector& x) {
    if (m.rows() != x.dim()) throw InvalidInput("transpose-vector dimension mismatch");
    Vector y(m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        auto r = m.row(i);
        for (std::size_t j = 0; j < m.cols(); ++j) y[j] += r[j] * x[i];
    }
    return y;
}

inline Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows())
        throw InvalidInput("matrix product shape mismatch: " + std::to_string(a.rows()) + "x" +
                           std::to_string(a.cols()) + " times " + std::to_string(b.rows()) + "x" +
                           std::to_string(b.cols()));
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

// x y^T
inline Matrix outer(const Vector& x, const Vector& y) {
    Matrix m(x.dim(), y.dim());
    for (std::size_t i = 0; i < x.dim(); ++i)
        for (std::size_t j = 0; j < y.dim(); ++j) m(i, j) = x[i] * y[j];
    return m;
}

/// Largest singular value of `m`.
///
/// Power iteration on m^T m from the normalized all-ones vector. Stops when the
/// Rayleigh quotient changes by less than NORM_TOL relative, or after
/// NORM_MAX_ITER iterations. If the start vector lies in the null space of
/// m^T m the iteration restarts from a fixed non-symmetric vector, so the
/// result stays deterministic.
inline double spectral_norm(const Matrix& m) {
    if (!m.is_finite()) throw InvalidInput("spectral_norm: matrix has non-finite entries");
    const std::size_t n = m.cols();
    if (n == 0 || m.rows() == 0) return 0.0;
    if (m.frobenius_norm() == 0.0) return 0.0;

    auto run = [&](Vector v) -> double {
        v *= 1.0 / norm(v);
        double lambda = 0.0;
        for (int it = 0; it < NORM_MAX_ITER; ++it) {
            Vector w = transpose_times(m, m * v);
            const double next = dot(v, w);
            const double wn = norm(w);
            if (wn == 0.0) return 0.0;
            v = (1.0 / wn) * std::move(w);
            if (it > 0 && std::abs(next - lambda) <= NORM_TOL * std::abs(next)) {
                lambda = next;
                break;
            }
            lambda = next;
        }
        // Rayleigh quotient at the final iterate.
        const double rq = std::max(lambda, norm(m * v) * norm(m * v));
        return std::sqrt(std::max(rq, 0.0));
    };

    double s = run(Vector(n, 1.0));
    if (s == 0.0) {
        Vector alt(n);
        for (std::size_t i = 0; i < n; ++i) alt[i] = 1.0 + static_cast<double>(i) * 0.618034;
        s = std::max(s, run(std::move(alt)));
    }
    return s;
}

/// Solves A x = b for square A by Gaussian elimination with partial pivoting.
inline Vector solve(const Matrix& a, const Vector& b) {
    if (!a.is_square()) throw InvalidInput("solve: matrix is not square");
    if (a.rows() != b.dim()) throw InvalidInput("solve: dimension mismatch");
    const std::size_t n = a.rows();
    Matrix lu = a;
    Vector x = b;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(lu(i, k)) > std::abs(lu(p, k))) p = i;
        if (lu(p, k) == 0.0) throw InvalidInput("solve: matrix is singular");
        if (p != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(lu(k, j), lu(p, j));
            std::swap(x[k], x[p]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = lu(i, k) / lu(k, k);
            if (f == 0.0) continue;
            for (std::size_t j = k; j < n; ++j) lu(i, j) -= f * lu(k, j);
            x[i] -= f * x[k];
        }
    }
    for (std::size_t k = n; k-- > 0;) {
        double s = x[k];
        for (std::size_t j = k + 1; j < n; ++j) s -= lu(k, j) * x[j];
        x[k] = s / lu(k, k);
    }
    return x;
}

/// Solves A X = B column by column.
inline Matrix solve(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) throw InvalidInput("solve: dimension mismatch");
    Matrix x(a.cols(), b.cols());
    for (std::size_t j = 0; j < b.cols(); ++j) x.set_col(j, solve(a, b.col(j)));
    return x;
}

/// Minimum-norm least-squares solution of min ||A x - b||.
///
/// Solved through the regularized normal equations
/// (A^T A + lambda I) x = A^T b by Cholesky, with
/// lambda = LSQ_REG * max(1, max diag(A^T A)). The regularizer picks the
/// minimum-norm minimizer when A is rank deficient (A = 0 gives x = 0).
inline Vector solve_least_squares(const Matrix& a, const Vector& b) {
    if (a.rows() != b.dim())
        throw InvalidInput("solve_least_squares: A has " + std::to_string(a.rows()) +
                           " rows but b has dimension " + std::to_string(b.dim()));
    if (!a.is_finite() || !b.is_finite())
        throw InvalidInput("solve_least_squares: non-finite input");
    const std::size_t n = a.cols();
    Matrix g(n, n);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto r = a.row(i);
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = 0; q < n; ++q) g(p, q) += r[p] * r[q];
    }
    double scale = 1.0;
    for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, g(i, i));
    const double lambda = LSQ_REG * scale;
    for (std::size_t i = 0; i < n; ++i) g(i, i) += lambda;
    Vector rhs = transpose_times(a, b);

    // Cholesky g = L L^T, in place in the lower triangle.
    for (std::size_t j = 0; j < n; ++j) {
        double d = g(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= g(j, k) * g(j, k);
        if (d <= 0.0) throw InvalidInput("solve_least_squares: normal matrix not positive definite");
        g(j, j) = std::sqrt(d);
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = g(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= g(i, k) * g(j, k);
            g(i, j) = s / g(j, j);
        }
    }
    Vector y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = rhs[i];
        for (std::size_t k = 0; k < i; ++k) s -= g(i, k) * y[k];
        y[i] = s / g(i, i);
    }
    Vector x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = y[i];
        for (std::size_t k = i + 1; k < n; ++k) s -= g(k, i) * x[k];
        x[i] = s / g(i, i);
    }
    return x;
}

/// Powers A^0..A^k_max tracked with a running log-scale so that very small
/// (or large) norms do not under/overflow. Calls `visit(k, log_norm)` where
/// log_norm = log ||A^k||_2 (-inf once the power is exactly zero).
template <class Visitor>
void for_each_power_log_norm(const Matrix& a, int k_max, Visitor&& visit) {
    if (!a.is_square()) throw InvalidInput("matrix powers require a square matrix");
    if (!a.is_finite()) throw InvalidInput("matrix powers: non-finite entries");
    Matrix p = Matrix::identity(a.rows());
    double log_scale = 0.0;
    bool zero = false;
    visit(0, std::log(spectral_norm(p)));
    for (int k = 1; k <= k_max; ++k) {
        if (!zero) {
            p = p * a;
            const double f = p.frobenius_norm();
            if (f == 0.0) {
                zero = true;
            } else {
                p *= 1.0 / f;
                log_scale += std::log(f);
            }
        }
        if (zero) {
            visit(k, -std::numeric_limits<double>::infinity());
        } else {
            visit(k, log_scale + std::log(spectral_norm(p)));
        }
    }
}

/// ||A^K||^(1/K), an upper-biased estimate of the spectral radius that
/// converges as K grows.
inline double spectral_radius_estimate(const Matrix& a, int k) {
    if (!a.is_square()) throw InvalidInput("spectral_radius_estimate: matrix is not square");
    if (k < 8) throw InvalidInput("spectral_radius_estimate: K must be at least 8");
    double last = 0.0;
    for_each_power_log_norm(a, k, [&](int i, double log_norm) {
        if (i == k) last = log_norm;
    });
    if (std::isinf(last) && last < 0) return 0.0;
    return std::exp(last / static_cast<double>(k));
}

} // namespace olc
