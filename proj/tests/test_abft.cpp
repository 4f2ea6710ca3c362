#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "arat/abft.hpp"

#include "helpers.hpp"

using namespace arat;

namespace {

Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    Matrix m(rows.size(), rows.begin()->size());
    std::size_t i = 0;
    for (const auto& row : rows) {
        std::size_t j = 0;
        for (double v : row) m.at(i, j++) = v;
        ++i;
    }
    return m;
}

// full checksum product for a data pair: encode, multiply, hand back
Matrix checksum_product(const Matrix& a, const Matrix& b) {
    return matmul(abft_encode_rows(a), abft_encode_cols(b));
}

Matrix random_int_matrix(testutil::Rng& rng, std::size_t r, std::size_t c) {
    Matrix m(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j)
            m.at(i, j) = static_cast<double>(rng.below(19)) - 9.0;
    return m;
}

} // namespace

TEST_CASE("encode appends column sums as a bottom row") {
    Matrix a = from_rows({{1, 2}, {3, 4}});
    Matrix ar = abft_encode_rows(a);
    REQUIRE(ar.rows == 3);
    REQUIRE(ar.cols == 2);
    CHECK(ar.at(0, 0) == 1);
    CHECK(ar.at(1, 1) == 4);
    CHECK(ar.at(2, 0) == 4);
    CHECK(ar.at(2, 1) == 6);
}

TEST_CASE("encode appends row sums as a last column") {
    Matrix b = from_rows({{1, 0}, {0, 1}});
    Matrix bc = abft_encode_cols(b);
    REQUIRE(bc.rows == 2);
    REQUIRE(bc.cols == 3);
    CHECK(bc.at(0, 2) == 1);
    CHECK(bc.at(1, 2) == 1);
}

TEST_CASE("matmul rejects mismatched shapes and multiplies correctly") {
    Matrix a = from_rows({{1, 2}, {3, 4}});
    Matrix b = from_rows({{5, 6}, {7, 8}});
    Matrix c = matmul(a, b);
    CHECK(c.at(0, 0) == 19);
    CHECK(c.at(0, 1) == 22);
    CHECK(c.at(1, 0) == 43);
    CHECK(c.at(1, 1) == 50);
    Matrix bad(3, 2);
    CHECK_THROWS_AS(matmul(a, bad), std::invalid_argument);
}

TEST_CASE("checksum product carries the sums of the plain product") {
    testutil::Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        Matrix a = random_int_matrix(rng, 3, 3);
        Matrix b = random_int_matrix(rng, 3, 3);
        Matrix c = matmul(a, b);
        Matrix cf = checksum_product(a, b);
        REQUIRE(cf.rows == 4);
        REQUIRE(cf.cols == 4);
        // interior equals the plain product
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) CHECK(cf.at(i, j) == c.at(i, j));
        // bottom row holds the column sums of the product
        for (std::size_t j = 0; j < 3; ++j) {
            double s = c.at(0, j) + c.at(1, j) + c.at(2, j);
            CHECK(cf.at(3, j) == s);
        }
        // last column holds the row sums
        for (std::size_t i = 0; i < 3; ++i) {
            double s = c.at(i, 0) + c.at(i, 1) + c.at(i, 2);
            CHECK(cf.at(i, 3) == s);
        }
    }
}

TEST_CASE("clean product verifies clean and stays untouched") {
    Matrix a = from_rows({{1, 2}, {3, 4}});
    Matrix b = from_rows({{5, 6}, {7, 8}});
    Matrix cf = checksum_product(a, b);
    Matrix before = cf;
    AbftReport rep = abft_verify_correct(cf);
    CHECK(rep.kind == AbftReport::Kind::Clean);
    for (std::size_t i = 0; i < cf.rows; ++i)
        for (std::size_t j = 0; j < cf.cols; ++j) CHECK(cf.at(i, j) == before.at(i, j));
}

TEST_CASE("single interior corruption is located and repaired exactly") {
    Matrix a = from_rows({{1, 2}, {3, 4}});
    Matrix b = from_rows({{5, 6}, {7, 8}});
    Matrix cf = checksum_product(a, b);
    double good = cf.at(0, 1);
    cf.at(0, 1) += 5;
    AbftReport rep = abft_verify_correct(cf);
    REQUIRE(rep.kind == AbftReport::Kind::Corrected);
    CHECK(rep.row == 0);
    CHECK(rep.col == 1);
    CHECK(rep.old_value == good + 5);
    CHECK(rep.new_value == good);
    CHECK(cf.at(0, 1) == good);
}

TEST_CASE("corruption in a checksum line is repaired too") {
    Matrix a = from_rows({{2, 1, 0}, {0, 1, 3}, {4, 0, 1}});
    Matrix b = from_rows({{1, 2, 0}, {0, 1, 1}, {2, 0, 3}});

    // bottom checksum row, interior column
    Matrix cf = checksum_product(a, b);
    double good = cf.at(3, 2);
    cf.at(3, 2) -= 7;
    AbftReport rep = abft_verify_correct(cf);
    REQUIRE(rep.kind == AbftReport::Kind::Corrected);
    CHECK(rep.row == 3);
    CHECK(rep.col == 2);
    CHECK(cf.at(3, 2) == good);

    // the corner cell is both a row and a column checksum
    cf = checksum_product(a, b);
    good = cf.at(3, 3);
    cf.at(3, 3) += 2;
    rep = abft_verify_correct(cf);
    REQUIRE(rep.kind == AbftReport::Kind::Corrected);
    CHECK(rep.row == 3);
    CHECK(rep.col == 3);
    CHECK(cf.at(3, 3) == good);
}

TEST_CASE("exhaustive single-cell sweep over a 3x3 product") {
    testutil::Rng rng(29);
    Matrix a = random_int_matrix(rng, 3, 3);
    Matrix b = random_int_matrix(rng, 3, 3);
    Matrix clean = checksum_product(a, b);
    double deltas[] = {5.0, -3.0, 1.0, 1024.0};
    for (std::size_t i = 0; i < clean.rows; ++i)
        for (std::size_t j = 0; j < clean.cols; ++j)
            for (double d : deltas) {
                Matrix cf = clean;
                cf.at(i, j) += d;
                AbftReport rep = abft_verify_correct(cf);
                REQUIRE(rep.kind == AbftReport::Kind::Corrected);
                CHECK(rep.row == i);
                CHECK(rep.col == j);
                CHECK(rep.new_value == clean.at(i, j));
                for (std::size_t x = 0; x < cf.rows; ++x)
                    for (std::size_t y = 0; y < cf.cols; ++y)
                        CHECK(cf.at(x, y) == clean.at(x, y));
            }
}

TEST_CASE("two corruptions in distinct rows and columns are uncorrectable") {
    Matrix a = from_rows({{1, 2}, {3, 4}});
    Matrix b = from_rows({{5, 6}, {7, 8}});
    Matrix cf = checksum_product(a, b);
    cf.at(0, 0) += 3;
    cf.at(1, 1) += 3;
    AbftReport rep = abft_verify_correct(cf);
    CHECK(rep.kind == AbftReport::Kind::Uncorrectable);
}

TEST_CASE("two corruptions sharing a row are uncorrectable, even cancelling ones") {
    Matrix a = from_rows({{1, 2}, {3, 4}});
    Matrix b = from_rows({{5, 6}, {7, 8}});

    Matrix cf = checksum_product(a, b);
    cf.at(0, 0) += 3;
    cf.at(0, 1) += 4;
    CHECK(abft_verify_correct(cf).kind == AbftReport::Kind::Uncorrectable);

    // equal and opposite deltas cancel in the row sum: only columns flag
    cf = checksum_product(a, b);
    cf.at(0, 0) += 3;
    cf.at(0, 1) -= 3;
    CHECK(abft_verify_correct(cf).kind == AbftReport::Kind::Uncorrectable);
}

TEST_CASE("nan corruption is flagged") {
    Matrix a = from_rows({{1, 2}, {3, 4}});
    Matrix b = from_rows({{5, 6}, {7, 8}});
    Matrix cf = checksum_product(a, b);
    double good = cf.at(1, 0);
    cf.at(1, 0) = std::nan("");
    AbftReport rep = abft_verify_correct(cf);
    // a NaN poisons its row and column residuals; the cell is rebuilt from
    // the untouched row checksum
    REQUIRE(rep.kind == AbftReport::Kind::Corrected);
    CHECK(rep.row == 1);
    CHECK(rep.col == 0);
    CHECK(cf.at(1, 0) == good);
}

TEST_CASE("degenerate shapes are rejected") {
    Matrix tiny(1, 1);
    CHECK_THROWS_AS(abft_verify_correct(tiny), std::invalid_argument);
}
