#pragma once

#include <cstddef>
#include <vector>

#include "bkmr/errors.hpp"

// Dense double-precision linear algebra used throughout the library.
// Matrices are row-major and contiguous; hot loops route through the
// runtime-dispatched kernels in bkmr/simd.hpp.

namespace bkmr::la {

using Vector = std::vector<double>;

class NotPositiveDefinite : public Error {
public:
    using Error::Error;
};

class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double value = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, value) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }
    static Matrix diagonal(const Vector& d) {
        Matrix m(d.size(), d.size());
        for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
        return m;
    }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    double* row(std::size_t i) { return data_.data() + i * cols_; }
    const double* row(std::size_t i) const { return data_.data() + i * cols_; }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return data_.empty(); }
    bool square() const { return rows_ == cols_; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    std::size_t size() const { return data_.size(); }

    Matrix transposed() const;
    Vector diag() const;

    friend bool operator==(const Matrix& a, const Matrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// ---- vector helpers ----

double dot(const Vector& x, const Vector& y);
double norm2_sq(const Vector& x);
Vector add(const Vector& x, const Vector& y);
Vector sub(const Vector& x, const Vector& y);
Vector scaled(const Vector& x, double a);
bool all_finite(const Vector& x);

// ---- matrix products ----

Vector matvec(const Matrix& a, const Vector& x);    // A x
Vector matvec_t(const Matrix& a, const Vector& x);  // A^T x
Matrix matmul(const Matrix& a, const Matrix& b);    // A B
Matrix matmul_tn(const Matrix& a, const Matrix& b); // A^T B
Matrix crossprod(const Matrix& x);                  // X^T X, exactly symmetric

Matrix add(const Matrix& a, const Matrix& b);
Matrix sub(const Matrix& a, const Matrix& b);
Matrix scaled(const Matrix& a, double s);
void add_to_diagonal(Matrix& a, double s);
void symmetrize(Matrix& a); // A <- (A + A^T)/2

double trace(const Matrix& a);
// tr(A B) for symmetric B: sum_ij A_ij * B_ij
double trace_product_sym(const Matrix& a, const Matrix& b);
double max_abs(const Matrix& a);
double max_asymmetry(const Matrix& a); // max |A_ij - A_ji|
bool all_finite(const Matrix& a);
double frobenius_distance(const Matrix& a, const Matrix& b);

// ---- factorizations ----

// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
// Throws NotPositiveDefinite when a pivot is not strictly positive.
class Cholesky {
public:
    explicit Cholesky(const Matrix& a);

    const Matrix& lower() const { return l_; }
    std::size_t dim() const { return l_.rows(); }
    double log_det() const; // of the factored matrix

    Vector solve(const Vector& b) const;         // A^{-1} b
    Matrix solve(Matrix b) const;                // A^{-1} B
    Matrix inverse() const;                      // A^{-1}, symmetrized

    void solve_lower_in_place(Matrix& b) const;  // L X = B
    void solve_upper_in_place(Matrix& b) const;  // L^T X = B

private:
    Matrix l_;
};

// Eigendecomposition of a symmetric matrix: A = sum_k values[k] * v_k v_k^T
// where v_k is row k of `vectors`. Values are not sorted.
struct SymEig {
    Vector values;
    Matrix vectors;
};
SymEig sym_eig(const Matrix& a);

// Numerical rank via column-pivoted Householder QR:
// |R_kk| > rel_tol * |R_00| counts as an independent column.
std::size_t rank_qr(const Matrix& x, double rel_tol = 1e-10);

} // namespace bkmr::la
