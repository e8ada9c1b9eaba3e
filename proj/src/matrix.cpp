#include "etale/matrix.hpp"

#include <sstream>

namespace etale {

Mat Mat::identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
}

Mat Mat::from_rows(std::initializer_list<std::initializer_list<long>> rows) {
    int r = int(rows.size());
    int c = r == 0 ? 0 : int(rows.begin()->size());
    Mat m(r, c);
    int i = 0;
    for (const auto& row : rows) {
        if (int(row.size()) != c) throw error("ragged matrix literal");
        int j = 0;
        for (long x : row) m.at(i, j++) = x;
        ++i;
    }
    return m;
}

Mat Mat::operator*(const Mat& o) const {
    if (cols_ != o.rows_) throw error("matrix dimension mismatch in product");
    Mat out(rows_, o.cols_);
    for (int i = 0; i < rows_; ++i)
        for (int k = 0; k < cols_; ++k) {
            const Int& x = at(i, k);
            if (x == 0) continue;
            for (int j = 0; j < o.cols_; ++j) out.at(i, j) += x * o.at(k, j);
        }
    return out;
}

void Mat::swap_rows(int i, int j) {
    if (i == j) return;
    for (int c = 0; c < cols_; ++c) std::swap(at(i, c), at(j, c));
}

void Mat::swap_cols(int i, int j) {
    if (i == j) return;
    for (int r = 0; r < rows_; ++r) std::swap(at(r, i), at(r, j));
}

void Mat::add_row(int dst, int src, const Int& factor) {
    for (int c = 0; c < cols_; ++c) at(dst, c) += factor * at(src, c);
}

void Mat::add_col(int dst, int src, const Int& factor) {
    for (int r = 0; r < rows_; ++r) at(r, dst) += factor * at(r, src);
}

void Mat::negate_row(int i) {
    for (int c = 0; c < cols_; ++c) at(i, c) = -at(i, c);
}

std::vector<Int> Mat::col(int c) const {
    std::vector<Int> v(rows_);
    for (int r = 0; r < rows_; ++r) v[r] = at(r, c);
    return v;
}

std::string Mat::to_string() const {
    std::ostringstream os;
    for (int r = 0; r < rows_; ++r) {
        os << (r == 0 ? "[" : " ");
        for (int c = 0; c < cols_; ++c) os << (c ? " " : "[") << at(r, c).get_str();
        os << "]" << (r + 1 == rows_ ? "]" : "\n");
    }
    return os.str();
}

std::vector<Int> mat_vec(const Mat& m, const std::vector<Int>& v) {
    if (int(v.size()) != m.cols()) throw error("matrix/vector dimension mismatch");
    std::vector<Int> out(m.rows(), Int(0));
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j)
            if (m.at(i, j) != 0) out[i] += m.at(i, j) * v[j];
    return out;
}

Int det(const Mat& m) {
    if (m.rows() != m.cols()) throw error("determinant of non-square matrix");
    int n = m.rows();
    if (n == 0) return 1;
    Mat a = m;
    Int prev(1);
    int sign = 1;
    for (int k = 0; k + 1 < n; ++k) {
        if (a.at(k, k) == 0) {
            int p = -1;
            for (int i = k + 1; i < n; ++i)
                if (a.at(i, k) != 0) { p = i; break; }
            if (p < 0) return 0;
            a.swap_rows(k, p);
            sign = -sign;
        }
        for (int i = k + 1; i < n; ++i)
            for (int j = k + 1; j < n; ++j) {
                Int t = a.at(i, j) * a.at(k, k) - a.at(i, k) * a.at(k, j);
                a.at(i, j) = t / prev; // exact by Bareiss
            }
        prev = a.at(k, k);
    }
    return sign > 0 ? a.at(n - 1, n - 1) : -a.at(n - 1, n - 1);
}

} // namespace etale
