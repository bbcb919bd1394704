#ifndef FRIED_MATRIX_HPP
#define FRIED_MATRIX_HPP

#include <cstddef>
#include <initializer_list>
#include <vector>

namespace fried {

/// Dense row-major matrix of doubles. The one numeric carrier used for
/// features, latent codes, network parameters and gradients.
class Matrix {
  public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix zeros(std::size_t rows, std::size_t cols) { return Matrix(rows, cols); }
    static Matrix row_vector(std::vector<double> values);
    static Matrix column_vector(const std::vector<double>& values);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    double* row_ptr(std::size_t r) { return data_.data() + r * cols_; }
    const double* row_ptr(std::size_t r) const { return data_.data() + r * cols_; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    bool all_finite() const;
    bool same_shape(const Matrix& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }
    bool operator==(const Matrix& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_ && data_ == other.data_;
    }

    Matrix& operator+=(const Matrix& other);
    Matrix& operator-=(const Matrix& other);
    Matrix& operator*=(double scalar);

    /// Rows of this matrix at the given indices, in the given order.
    Matrix take_rows(const std::vector<std::size_t>& indices) const;
    /// Columns [first, first+count).
    Matrix slice_cols(std::size_t first, std::size_t count) const;
    std::vector<double> column(std::size_t c) const;

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix matmul(const Matrix& a, const Matrix& b);              // a (n,k) * b (k,m)
Matrix matmul_transpose_a(const Matrix& a, const Matrix& b);  // a^T (k,n) * b (n,m)
Matrix matmul_transpose_b(const Matrix& a, const Matrix& b);  // a (n,k) * b^T (m,k)

/// Horizontal concatenation; row counts must match.
Matrix hcat(const Matrix& left, const Matrix& right);

/// Adds a row vector to every row.
void add_row_inplace(Matrix& m, const std::vector<double>& row);

std::vector<double> column_sums(const Matrix& m);
std::vector<double> column_means(const Matrix& m);

/// Mean of squared entries of (a - b); shapes must match.
double mean_squared_error(const Matrix& a, const Matrix& b);

}  // namespace fried

#endif
