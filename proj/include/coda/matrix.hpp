#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace coda {

// Dense row-major matrix of doubles. Dimensions in this project are small
// (statistic matrices are at most (D-1)x(D-1) with D <= 10; data matrices are
// n x P), so the implementation favours clarity and determinism over blocking.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix identity(std::size_t n);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

    const std::vector<double>& data() const noexcept { return data_; }

    Matrix transposed() const;
    Matrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
    void set_block(std::size_t r0, std::size_t c0, const Matrix& b);

    // Largest absolute entry (the max norm used by the reconstruction checks).
    double max_abs() const;

    // Determinant via LU with partial pivoting; intended for small matrices.
    double determinant() const;

    Matrix& operator*=(double s);
    Matrix& operator+=(const Matrix& other);
    Matrix& operator-=(const Matrix& other);

    friend Matrix operator*(const Matrix& a, const Matrix& b);
    friend Matrix operator*(double s, Matrix m) { m *= s; return m; }
    friend Matrix operator+(Matrix a, const Matrix& b) { a += b; return a; }
    friend Matrix operator-(Matrix a, const Matrix& b) { a -= b; return a; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// m placed in the top-left corner of an n x n zero matrix.
Matrix embed_top_left(const Matrix& m, std::size_t n);

// blockdiag(a, b).
Matrix block_diag(const Matrix& a, const Matrix& b);

double dot(std::span<const double> a, std::span<const double> b);

}  // namespace coda
