#pragma once
// Dense integer matrices over GMP integers. Small sizes, exact arithmetic.

#include "etale/ints.hpp"

#include <initializer_list>
#include <vector>

namespace etale {

class Mat {
public:
    Mat() : rows_(0), cols_(0) {}
    Mat(int rows, int cols) : rows_(rows), cols_(cols), a_(size_t(rows) * cols, Int(0)) {}

    static Mat identity(int n);
    static Mat from_rows(std::initializer_list<std::initializer_list<long>> rows);

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    Int& at(int r, int c) { return a_[size_t(r) * cols_ + c]; }
    const Int& at(int r, int c) const { return a_[size_t(r) * cols_ + c]; }

    Mat operator*(const Mat& o) const;
    bool operator==(const Mat& o) const { return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_; }

    void swap_rows(int i, int j);
    void swap_cols(int i, int j);
    void add_row(int dst, int src, const Int& factor); // row dst += factor * row src
    void add_col(int dst, int src, const Int& factor);
    void negate_row(int i);

    std::vector<Int> col(int c) const;
    std::string to_string() const;

private:
    int rows_, cols_;
    std::vector<Int> a_;
};

std::vector<Int> mat_vec(const Mat& m, const std::vector<Int>& v);

// Exact determinant (Bareiss fraction-free elimination). Square input.
Int det(const Mat& m);

} // namespace etale
