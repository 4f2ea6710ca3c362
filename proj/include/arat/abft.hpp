#pragma once

#include <cstddef>
#include <vector>

namespace arat {

struct Matrix {
    std::size_t rows = 0, cols = 0;
    std::vector<double> a;
    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}
    double& at(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    double at(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
};

Matrix matmul(const Matrix& x, const Matrix& y);
Matrix abft_encode_rows(const Matrix& a); // append checksum row
Matrix abft_encode_cols(const Matrix& b); // append checksum column

struct AbftReport {
    enum class Kind { Clean, Corrected, Uncorrectable };
    Kind kind = Kind::Clean;
    std::size_t row = 0, col = 0;
    double old_value = 0.0, new_value = 0.0;
};

// verify the checksum invariants of a full matrix (data plus checksum row and
// column); locate and repair a single corrupt element in place.
AbftReport abft_verify_correct(Matrix& cf);

} // namespace arat
