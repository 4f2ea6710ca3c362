#include "arat/abft.hpp"

#include <cmath>
#include <stdexcept>

namespace arat {

Matrix matmul(const Matrix& x, const Matrix& y) {
    if (x.cols != y.rows) throw std::invalid_argument("matmul dimension mismatch");
    Matrix z(x.rows, y.cols);
    for (std::size_t i = 0; i < x.rows; ++i)
        for (std::size_t k = 0; k < x.cols; ++k) {
            double a = x.at(i, k);
            for (std::size_t j = 0; j < y.cols; ++j) z.at(i, j) += a * y.at(k, j);
        }
    return z;
}

Matrix abft_encode_rows(const Matrix& a) {
    Matrix r(a.rows + 1, a.cols);
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t j = 0; j < a.cols; ++j) {
            r.at(i, j) = a.at(i, j);
            r.at(a.rows, j) += a.at(i, j);
        }
    return r;
}

Matrix abft_encode_cols(const Matrix& b) {
    Matrix r(b.rows, b.cols + 1);
    for (std::size_t i = 0; i < b.rows; ++i) {
        for (std::size_t j = 0; j < b.cols; ++j) {
            r.at(i, j) = b.at(i, j);
            r.at(i, b.cols) += b.at(i, j);
        }
    }
    return r;
}

namespace {

// residual of one line (row or column): last element minus the sum of the
// others; zero when the checksum invariant holds
double line_residual(const Matrix& m, std::size_t idx, bool row) {
    double sum = 0.0;
    std::size_t n = row ? m.cols : m.rows;
    for (std::size_t k = 0; k + 1 < n; ++k) sum += row ? m.at(idx, k) : m.at(k, idx);
    double last = row ? m.at(idx, m.cols - 1) : m.at(m.rows - 1, idx);
    return last - sum;
}

bool flagged(double residual, double scale) {
    return std::fabs(residual) > 1e-9 * (1.0 + std::fabs(scale)) || std::isnan(residual);
}

} // namespace

AbftReport abft_verify_correct(Matrix& cf) {
    if (cf.rows < 2 || cf.cols < 2) throw std::invalid_argument("matrix too small to verify");
    AbftReport rep;
    std::vector<std::size_t> bad_rows, bad_cols;
    for (std::size_t i = 0; i < cf.rows; ++i)
        if (flagged(line_residual(cf, i, true), cf.at(i, cf.cols - 1))) bad_rows.push_back(i);
    for (std::size_t j = 0; j < cf.cols; ++j)
        if (flagged(line_residual(cf, j, false), cf.at(cf.rows - 1, j))) bad_cols.push_back(j);

    if (bad_rows.empty() && bad_cols.empty()) {
        rep.kind = AbftReport::Kind::Clean;
        return rep;
    }
    if (bad_rows.size() != 1 || bad_cols.size() != 1) {
        rep.kind = AbftReport::Kind::Uncorrectable;
        return rep;
    }

    std::size_t i = bad_rows[0], j = bad_cols[0];
    rep.kind = AbftReport::Kind::Corrected;
    rep.row = i;
    rep.col = j;
    rep.old_value = cf.at(i, j);
    // rebuild the cell from its row, excluding the corrupt value itself
    if (j + 1 == cf.cols) {
        double sum = 0.0;
        for (std::size_t k = 0; k + 1 < cf.cols; ++k) sum += cf.at(i, k);
        rep.new_value = sum;
    } else {
        double sum = 0.0;
        for (std::size_t k = 0; k + 1 < cf.cols; ++k)
            if (k != j) sum += cf.at(i, k);
        rep.new_value = cf.at(i, cf.cols - 1) - sum;
    }
    cf.at(i, j) = rep.new_value;
    return rep;
}

} // namespace arat
