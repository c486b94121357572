// tsent - entropy of Markov tree shifts on Cayley trees
//
// Small dense matrices used throughout: boolean matrices for relations and
// transition rules, and arbitrary-precision natural matrices for exact powers.

#ifndef TSENT_MATRIX_HPP_
#define TSENT_MATRIX_HPP_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <boost/multiprecision/gmp.hpp>

#include "error.hpp"

namespace tsent {

  //! Exact non-negative integer; counts overflow 64 bits almost immediately.
  using Natural = boost::multiprecision::mpz_int;

  //! Natural logarithm of an exact natural, -inf for zero.
  inline double log_natural(Natural const& x) {
    if (x.is_zero()) {
      return -std::numeric_limits<double>::infinity();
    }
    long   exp      = 0;
    double mantissa = mpz_get_d_2exp(&exp, x.backend().data());
    return std::log(mantissa) + static_cast<double>(exp) * std::log(2.0);
  }

  ////////////////////////////////////////////////////////////////////////
  // BitMatrix
  ////////////////////////////////////////////////////////////////////////

  class BitMatrix {
   public:
    using Rows = std::vector<std::vector<int>>;

    BitMatrix() = default;

    BitMatrix(std::size_t rows, std::size_t cols, bool fill = false)
        : _rows(rows), _cols(cols), _data(rows * cols, fill ? 1 : 0) {}

    //! Builds from nested rows; every row must have the same length and
    //! every entry must be 0 or 1.
    static BitMatrix from_rows(Rows const& rows) {
      std::size_t const r = rows.size();
      std::size_t const c = r == 0 ? 0 : rows.front().size();
      BitMatrix         m(r, c);
      for (std::size_t i = 0; i < r; ++i) {
        if (rows[i].size() != c) {
          throw Error(ErrorCode::NonSquare,
                      "row " + std::to_string(i) + " has length "
                          + std::to_string(rows[i].size()) + ", expected "
                          + std::to_string(c));
        }
        for (std::size_t j = 0; j < c; ++j) {
          int v = rows[i][j];
          if (v != 0 && v != 1) {
            throw Error(ErrorCode::NonBinaryEntry,
                        "entry (" + std::to_string(i) + "," + std::to_string(j)
                            + ") = " + std::to_string(v));
          }
          m.set(i, j, v == 1);
        }
      }
      return m;
    }

    static BitMatrix identity(std::size_t n) {
      BitMatrix m(n, n);
      for (std::size_t i = 0; i < n; ++i) {
        m.set(i, i, true);
      }
      return m;
    }

    [[nodiscard]] std::size_t rows() const noexcept {
      return _rows;
    }
    [[nodiscard]] std::size_t cols() const noexcept {
      return _cols;
    }
    [[nodiscard]] bool is_square() const noexcept {
      return _rows == _cols;
    }

    [[nodiscard]] bool operator()(std::size_t i, std::size_t j) const {
      return _data[i * _cols + j] != 0;
    }

    void set(std::size_t i, std::size_t j, bool value) {
      _data[i * _cols + j] = value ? 1 : 0;
    }

    [[nodiscard]] std::size_t row_sum(std::size_t i) const {
      std::size_t s = 0;
      for (std::size_t j = 0; j < _cols; ++j) {
        s += _data[i * _cols + j];
      }
      return s;
    }

    [[nodiscard]] std::size_t col_sum(std::size_t j) const {
      std::size_t s = 0;
      for (std::size_t i = 0; i < _rows; ++i) {
        s += _data[i * _cols + j];
      }
      return s;
    }

    [[nodiscard]] bool all_ones() const {
      for (auto v : _data) {
        if (v == 0) {
          return false;
        }
      }
      return true;
    }

    //! No zero row and no zero column.
    [[nodiscard]] bool is_essential() const {
      for (std::size_t i = 0; i < _rows; ++i) {
        if (row_sum(i) == 0) {
          return false;
        }
      }
      for (std::size_t j = 0; j < _cols; ++j) {
        if (col_sum(j) == 0) {
          return false;
        }
      }
      return true;
    }

    [[nodiscard]] BitMatrix transpose() const {
      BitMatrix t(_cols, _rows);
      for (std::size_t i = 0; i < _rows; ++i) {
        for (std::size_t j = 0; j < _cols; ++j) {
          t.set(j, i, (*this)(i, j));
        }
      }
      return t;
    }

    //! Boolean product (AND/OR).
    [[nodiscard]] BitMatrix operator*(BitMatrix const& that) const {
      BitMatrix out(_rows, that._cols);
      for (std::size_t i = 0; i < _rows; ++i) {
        for (std::size_t l = 0; l < _cols; ++l) {
          if (!(*this)(i, l)) {
            continue;
          }
          for (std::size_t j = 0; j < that._cols; ++j) {
            if (that(l, j)) {
              out.set(i, j, true);
            }
          }
        }
      }
      return out;
    }

    [[nodiscard]] Rows to_rows() const {
      Rows out(_rows, std::vector<int>(_cols, 0));
      for (std::size_t i = 0; i < _rows; ++i) {
        for (std::size_t j = 0; j < _cols; ++j) {
          out[i][j] = (*this)(i, j) ? 1 : 0;
        }
      }
      return out;
    }

    [[nodiscard]] std::vector<std::uint8_t> const& data() const noexcept {
      return _data;
    }

    bool operator==(BitMatrix const&) const = default;

   private:
    std::size_t               _rows = 0;
    std::size_t               _cols = 0;
    std::vector<std::uint8_t> _data;
  };

  ////////////////////////////////////////////////////////////////////////
  // NaturalMatrix
  ////////////////////////////////////////////////////////////////////////

  class NaturalMatrix {
   public:
    NaturalMatrix() = default;

    explicit NaturalMatrix(std::size_t n) : _n(n), _data(n * n) {}

    explicit NaturalMatrix(BitMatrix const& m) : NaturalMatrix(m.rows()) {
      for (std::size_t i = 0; i < _n; ++i) {
        for (std::size_t j = 0; j < _n; ++j) {
          if (m(i, j)) {
            at(i, j) = 1;
          }
        }
      }
    }

    static NaturalMatrix identity(std::size_t n) {
      NaturalMatrix m(n);
      for (std::size_t i = 0; i < n; ++i) {
        m.at(i, i) = 1;
      }
      return m;
    }

    [[nodiscard]] std::size_t size() const noexcept {
      return _n;
    }

    [[nodiscard]] Natural const& operator()(std::size_t i,
                                            std::size_t j) const {
      return _data[i * _n + j];
    }

    Natural& at(std::size_t i, std::size_t j) {
      return _data[i * _n + j];
    }

    [[nodiscard]] Natural row_sum(std::size_t i) const {
      Natural s = 0;
      for (std::size_t j = 0; j < _n; ++j) {
        s += _data[i * _n + j];
      }
      return s;
    }

    [[nodiscard]] NaturalMatrix operator*(NaturalMatrix const& that) const {
      NaturalMatrix out(_n);
      for (std::size_t i = 0; i < _n; ++i) {
        for (std::size_t l = 0; l < _n; ++l) {
          Natural const& a = (*this)(i, l);
          if (a.is_zero()) {
            continue;
          }
          for (std::size_t j = 0; j < _n; ++j) {
            out.at(i, j) += a * that(l, j);
          }
        }
      }
      return out;
    }

    bool operator==(NaturalMatrix const&) const = default;

   private:
    std::size_t          _n = 0;
    std::vector<Natural> _data;
  };

}  // namespace tsent

#endif  // TSENT_MATRIX_HPP_
