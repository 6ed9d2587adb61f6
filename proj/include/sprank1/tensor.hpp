#pragma once

// Dense column-major tensors and matrices, Matlab-style reshape, mode
// unfoldings and the contractions behind the multilinear form.
//
// Index convention: all indices and mode numbers in this API are 0-based.
// The .dten file format and the CLI talk about modes 1..d.

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sprank1/errors.hpp"
#include "sprank1/vector_ops.hpp"

namespace sprank1 {

using Shape = std::vector<std::size_t>;

inline std::size_t shape_product(std::span<const std::size_t> shape) {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>{});
}

inline std::string shape_to_string(std::span<const std::size_t> shape, char sep = 'x') {
    std::string s;
    for (std::size_t j = 0; j < shape.size(); ++j) {
        if (j) s += sep;
        s += std::to_string(shape[j]);
    }
    return s;
}

/// Non-owning column-major matrix: element (i, j) lives at data[i + rows * j].
struct MatrixView {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::span<const double> data;

    double operator()(std::size_t i, std::size_t j) const { return data[i + rows * j]; }
    std::span<const double> column(std::size_t j) const { return data.subspan(rows * j, rows); }
};

/// Reinterpret a contiguous buffer as a rows x cols column-major matrix.
inline MatrixView as_matrix(std::span<const double> data, std::size_t rows, std::size_t cols) {
    if (rows == 0 || cols == 0 || rows * cols != data.size()) {
        throw dimension_error("as_matrix: cannot view " + std::to_string(data.size()) +
                              " elements as " + std::to_string(rows) + "x" +
                              std::to_string(cols));
    }
    return MatrixView{rows, cols, data};
}

class Matrix {
public:
    Matrix(std::size_t rows, std::size_t cols, Vector data)
        : rows_(rows), cols_(cols), data_(std::move(data)) {
        as_matrix(data_, rows_, cols_);  // validates
    }

    static Matrix zeros(std::size_t rows, std::size_t cols) {
        return Matrix(rows, cols, Vector(rows * cols, 0.0));
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::span<const double> data() const { return data_; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i + rows_ * j]; }

    MatrixView view() const { return MatrixView{rows_, cols_, data_}; }
    operator MatrixView() const { return view(); }

    Matrix transposed() const {
        Vector out(data_.size());
        for (std::size_t j = 0; j < cols_; ++j)
            for (std::size_t i = 0; i < rows_; ++i) out[j + cols_ * i] = data_[i + rows_ * j];
        return Matrix(cols_, rows_, std::move(out));
    }

private:
    std::size_t rows_;
    std::size_t cols_;
    Vector data_;
};

inline double frobenius_norm(const MatrixView& m) { return norm2(m.data); }

class DenseTensor {
public:
    DenseTensor(Shape shape, Vector data) : shape_(std::move(shape)), data_(std::move(data)) {
        if (shape_.empty()) throw dimension_error("DenseTensor: order must be at least 1");
        for (std::size_t n : shape_) {
            if (n == 0) throw dimension_error("DenseTensor: every dimension must be positive");
        }
        if (shape_product(shape_) != data_.size()) {
            throw dimension_error("DenseTensor: shape " + shape_to_string(shape_) + " needs " +
                                  std::to_string(shape_product(shape_)) + " values, got " +
                                  std::to_string(data_.size()));
        }
    }

    static DenseTensor zeros(Shape shape) {
        const std::size_t n = shape_product(shape);
        return DenseTensor(std::move(shape), Vector(n, 0.0));
    }

    const Shape& shape() const { return shape_; }
    std::size_t order() const { return shape_.size(); }
    std::size_t dim(std::size_t mode) const { return shape_.at(mode); }
    std::size_t size() const { return data_.size(); }
    std::span<const double> data() const { return data_; }

    /// Linear offset of a 0-based multi-index (first index fastest).
    std::size_t offset(std::span<const std::size_t> index) const {
        require_same_length(index.size(), shape_.size(), "DenseTensor::offset");
        std::size_t off = 0;
        std::size_t stride = 1;
        for (std::size_t j = 0; j < shape_.size(); ++j) {
            if (index[j] >= shape_[j]) throw validation_error("DenseTensor: index out of range");
            off += index[j] * stride;
            stride *= shape_[j];
        }
        return off;
    }

    double operator()(std::span<const std::size_t> index) const { return data_[offset(index)]; }
    double at(std::initializer_list<std::size_t> index) const {
        return (*this)(std::span<const std::size_t>(index.begin(), index.size()));
    }

    double frobenius_norm() const { return norm2(data_); }
    /// Largest entry in magnitude.
    double max_abs() const { return sprank1::max_abs(data_); }
    bool is_zero() const { return all_zero(data_); }

    DenseTensor scaled(double c) const {
        Vector out(data_);
        for (double& v : out) v *= c;
        return DenseTensor(shape_, std::move(out));
    }

    friend bool operator==(const DenseTensor&, const DenseTensor&) = default;

private:
    Shape shape_;
    Vector data_;
};

/// Matlab reshape(t, rows, cols): same column-major element order, new labels.
inline Matrix reshape_to_matrix(const DenseTensor& t, std::size_t rows, std::size_t cols) {
    if (rows * cols != t.size()) {
        throw dimension_error("reshape_to_matrix: " + std::to_string(rows) + "x" +
                              std::to_string(cols) + " does not hold " +
                              std::to_string(t.size()) + " elements");
    }
    return Matrix(rows, cols, Vector(t.data().begin(), t.data().end()));
}

/// Mode-`mode` unfolding: n_mode x (prod of the other dims). Row i holds the
/// entries whose mode index is i; columns run over the remaining modes in
/// column-major order.
inline Matrix mode_unfolding(const DenseTensor& t, std::size_t mode) {
    if (mode >= t.order()) {
        throw validation_error("mode_unfolding: mode " + std::to_string(mode) +
                               " out of range for order " + std::to_string(t.order()));
    }
    const Shape& shape = t.shape();
    const std::size_t n = shape[mode];
    const std::size_t inner = shape_product(std::span(shape).first(mode));
    const std::size_t outer = t.size() / (inner * n);
    const auto data = t.data();
    Vector out(t.size());
    // Source is inner x n x outer; target column index is i_inner + inner * i_outer.
    for (std::size_t o = 0; o < outer; ++o)
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t i = 0; i < inner; ++i)
                out[k + n * (i + inner * o)] = data[i + inner * (k + n * o)];
    return Matrix(n, inner * outer, std::move(out));
}

/// M^T x.
inline Vector mat_vec_left(const MatrixView& m, std::span<const double> x) {
    require_same_length(x.size(), m.rows, "mat_vec_left");
    Vector out(m.cols);
    for (std::size_t j = 0; j < m.cols; ++j) {
        const auto col = m.column(j);
        double s = 0.0;
        for (std::size_t i = 0; i < m.rows; ++i) s += col[i] * x[i];
        out[j] = s;
    }
    return out;
}

/// M y.
inline Vector mat_vec(const MatrixView& m, std::span<const double> y) {
    require_same_length(y.size(), m.cols, "mat_vec");
    Vector out(m.rows, 0.0);
    for (std::size_t j = 0; j < m.cols; ++j) {
        const double yj = y[j];
        if (yj == 0.0) continue;
        const auto col = m.column(j);
        for (std::size_t i = 0; i < m.rows; ++i) out[i] += col[i] * yj;
    }
    return out;
}

namespace detail {

inline void check_factor_lengths(const Shape& shape, std::span<const Vector> xs,
                                 std::size_t skip = static_cast<std::size_t>(-1)) {
    if (xs.size() != shape.size()) {
        throw dimension_error("expected " + std::to_string(shape.size()) + " factor vectors, got " +
                              std::to_string(xs.size()));
    }
    for (std::size_t j = 0; j < shape.size(); ++j) {
        if (j == skip) continue;
        if (xs[j].size() != shape[j]) {
            throw dimension_error("factor " + std::to_string(j + 1) + " has length " +
                                  std::to_string(xs[j].size()) + ", mode size is " +
                                  std::to_string(shape[j]));
        }
    }
}

}  // namespace detail

/// Contract every mode except `mode` against the matching vector of `xs`.
/// Returns a vector of length n_mode; xs[mode] is ignored.
inline Vector contract_all_but(const DenseTensor& t, std::span<const Vector> xs, std::size_t mode) {
    if (mode >= t.order()) throw validation_error("contract_all_but: mode out of range");
    detail::check_factor_lengths(t.shape(), xs, mode);
    const Shape& shape = t.shape();
    Vector current(t.data().begin(), t.data().end());
    // Leading modes: view as n_k x rest and apply the transpose.
    for (std::size_t k = 0; k < mode; ++k) {
        const auto m = as_matrix(current, shape[k], current.size() / shape[k]);
        current = mat_vec_left(m, xs[k]);
    }
    // Trailing modes, last first: view as rest x n_k.
    for (std::size_t k = shape.size(); k-- > mode + 1;) {
        const auto m = as_matrix(current, current.size() / shape[k], shape[k]);
        current = mat_vec(m, xs[k]);
    }
    return current;
}

/// <t, x_1 o ... o x_d>, evaluated by contracting mode 1 first.
inline double multilinear_value(const DenseTensor& t, std::span<const Vector> xs) {
    detail::check_factor_lengths(t.shape(), xs);
    const std::size_t last = t.order() - 1;
    return dot(contract_all_but(t, xs, last), xs[last]);
}

}  // namespace sprank1
