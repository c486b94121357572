// tsent - entropy of Markov tree shifts on Cayley trees
//
// Relation matrices of semigroups G = <S_k | K> and the geometry of their
// Cayley trees: level counts, semiball and ball sizes, primitivity,
// irreducibility, period with cyclic classes, and the Perron root.
//
// Generators are indexed from 0 in this library; reports print them as
// s1, ..., sk.

#ifndef TSENT_CAYLEY_GEOMETRY_HPP_
#define TSENT_CAYLEY_GEOMETRY_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "matrix.hpp"

namespace tsent {

  namespace detail {
    struct RelationFlags {
      std::once_flag             once;
      bool                       irreducible = false;
      bool                       primitive   = false;
      std::optional<std::size_t> exponent;
      std::size_t                period = 0;
    };

    inline std::vector<bool> reachable_from(BitMatrix const& m,
                                            std::size_t      start,
                                            bool             reverse) {
      std::vector<bool>       seen(m.rows(), false);
      std::vector<std::size_t> stack = {start};
      seen[start]                    = true;
      while (!stack.empty()) {
        std::size_t u = stack.back();
        stack.pop_back();
        for (std::size_t v = 0; v < m.rows(); ++v) {
          bool edge = reverse ? m(v, u) : m(u, v);
          if (edge && !seen[v]) {
            seen[v] = true;
            stack.push_back(v);
          }
        }
      }
      return seen;
    }

    inline bool strongly_connected(BitMatrix const& m) {
      if (m.rows() == 0) {
        return false;
      }
      auto fwd = reachable_from(m, 0, false);
      auto bwd = reachable_from(m, 0, true);
      return std::all_of(fwd.begin(), fwd.end(), [](bool b) { return b; })
             && std::all_of(bwd.begin(), bwd.end(), [](bool b) { return b; });
    }

    // Breadth-first levels from vertex 0; the period is the gcd over all
    // edges u->v of level(u) + 1 - level(v). Requires strong connectivity.
    inline std::pair<std::size_t, std::vector<std::size_t>>
    bfs_period(BitMatrix const& m) {
      std::size_t const        n = m.rows();
      std::vector<long>        level(n, -1);
      std::queue<std::size_t>  queue;
      level[0] = 0;
      queue.push(0);
      while (!queue.empty()) {
        std::size_t u = queue.front();
        queue.pop();
        for (std::size_t v = 0; v < n; ++v) {
          if (m(u, v) && level[v] < 0) {
            level[v] = level[u] + 1;
            queue.push(v);
          }
        }
      }
      long g = 0;
      for (std::size_t u = 0; u < n; ++u) {
        for (std::size_t v = 0; v < n; ++v) {
          if (m(u, v)) {
            g = std::gcd(g, std::abs(level[u] + 1 - level[v]));
          }
        }
      }
      std::vector<std::size_t> lv(n);
      for (std::size_t v = 0; v < n; ++v) {
        lv[v] = static_cast<std::size_t>(level[v]);
      }
      return {static_cast<std::size_t>(g), lv};
    }

    //! Smallest m in [1, (n-1)^2 + 1] with m-th boolean power positive.
    inline std::optional<std::size_t> primitivity_exponent(BitMatrix const& m) {
      std::size_t const n     = m.rows();
      std::size_t const bound = (n - 1) * (n - 1) + 1;
      BitMatrix         power = m;
      for (std::size_t e = 1; e <= bound; ++e) {
        if (power.all_ones()) {
          return e;
        }
        power = power * m;
      }
      return std::nullopt;
    }
  }  // namespace detail

  ////////////////////////////////////////////////////////////////////////
  // RelationMatrix
  ////////////////////////////////////////////////////////////////////////

  //! The k x k binary relation matrix K of G = <S_k | K>: K(i, j) = 0 means
  //! s_i s_j is the identity, so s_j never follows s_i in a reduced word.
  //! Immutable after validation; structural flags are computed on first use
  //! and shared between copies.
  class RelationMatrix {
   public:
    explicit RelationMatrix(BitMatrix m)
        : _m(std::move(m)), _flags(std::make_shared<detail::RelationFlags>()) {
      if (!_m.is_square()) {
        throw Error(ErrorCode::NonSquare,
                    "relation matrix is " + std::to_string(_m.rows()) + "x"
                        + std::to_string(_m.cols()));
      }
      if (_m.rows() == 0) {
        throw Error(ErrorCode::NonSquare, "relation matrix is empty");
      }
      for (std::size_t i = 0; i < _m.rows(); ++i) {
        if (_m.row_sum(i) == 0) {
          throw Error(ErrorCode::DeadRow,
                      "row " + std::to_string(i) + " of K has no successor");
        }
      }
    }

    [[nodiscard]] std::size_t k() const noexcept {
      return _m.rows();
    }

    [[nodiscard]] bool operator()(std::size_t i, std::size_t j) const {
      return _m(i, j);
    }

    [[nodiscard]] BitMatrix const& matrix() const noexcept {
      return _m;
    }

    [[nodiscard]] std::size_t row_sum(std::size_t i) const {
      return _m.row_sum(i);
    }

    [[nodiscard]] bool is_irreducible() const {
      return flags().irreducible;
    }

    [[nodiscard]] bool is_primitive() const {
      return flags().primitive;
    }

    //! Smallest m with K^m > 0, if K is primitive.
    [[nodiscard]] std::optional<std::size_t> primitivity_exponent() const {
      return flags().exponent;
    }

    [[nodiscard]] std::size_t period() const {
      auto const& f = flags();
      if (!f.irreducible) {
        throw Error(ErrorCode::NotIrreducible, "period of a reducible K");
      }
      return f.period;
    }

    bool operator==(RelationMatrix const& that) const {
      return _m == that._m;
    }

   private:
    detail::RelationFlags const& flags() const {
      std::call_once(_flags->once, [this] {
        _flags->irreducible = detail::strongly_connected(_m);
        _flags->exponent    = detail::primitivity_exponent(_m);
        _flags->primitive   = _flags->exponent.has_value();
        if (_flags->irreducible) {
          _flags->period = detail::bfs_period(_m).first;
        }
      });
      return *_flags;
    }

    BitMatrix                              _m;
    std::shared_ptr<detail::RelationFlags> _flags;
  };

  inline RelationMatrix validate_relation(BitMatrix::Rows const& raw) {
    if (raw.empty()) {
      throw Error(ErrorCode::NonSquare, "relation matrix is empty");
    }
    for (auto const& row : raw) {
      if (row.size() != raw.size()) {
        throw Error(ErrorCode::NonSquare, "relation matrix must be square");
      }
    }
    return RelationMatrix(BitMatrix::from_rows(raw));
  }

  inline bool is_primitive(RelationMatrix const& K) {
    return K.is_primitive();
  }

  inline bool is_irreducible(RelationMatrix const& K) {
    return K.is_irreducible();
  }

  // Same tests on a bare square matrix (used for transition matrices too).
  inline bool is_irreducible(BitMatrix const& m) {
    return detail::strongly_connected(m);
  }

  inline bool is_primitive(BitMatrix const& m) {
    return m.rows() > 0 && detail::primitivity_exponent(m).has_value();
  }

  struct CyclicStructure {
    std::size_t                           period = 1;
    std::vector<std::vector<std::size_t>> classes;
  };

  //! Period P and the P cyclic classes of an irreducible matrix; class c
  //! holds the vertices whose BFS level from vertex 0 is c mod P, so every
  //! edge goes from class c to class c + 1 mod P.
  inline CyclicStructure period_and_classes(BitMatrix const& m) {
    if (!is_irreducible(m)) {
      throw Error(ErrorCode::NotIrreducible,
                  "cyclic classes need an irreducible matrix");
    }
    auto [period, level] = detail::bfs_period(m);
    CyclicStructure out;
    out.period = period;
    out.classes.resize(period);
    for (std::size_t v = 0; v < m.rows(); ++v) {
      out.classes[level[v] % period].push_back(v);
    }
    return out;
  }

  inline CyclicStructure period_and_classes(RelationMatrix const& K) {
    return period_and_classes(K.matrix());
  }

  //! Perron root of an irreducible binary matrix to within tol, from the
  //! Collatz-Wielandt bracket min_i (Mv)_i / v_i <= rho(M) <= max_i (Mv)_i / v_i
  //! applied to M = K^P (P the period) and then taking the P-th root.
  inline double spectral_radius(BitMatrix const& m,
                                double           tol,
                                std::size_t      max_iters = 1'000'000) {
    if (!(tol > 0)) {
      throw Error(ErrorCode::InvalidArgument, "tolerance must be positive");
    }
    if (!is_irreducible(m)) {
      throw Error(ErrorCode::NotIrreducible,
                  "spectral radius needs an irreducible matrix");
    }
    std::size_t const n      = m.rows();
    std::size_t const period = period_and_classes(m).period;

    // K^P as a real matrix; entries are small so doubles are exact here.
    std::vector<double> mp(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      mp[i * n + i] = 1.0;
    }
    for (std::size_t p = 0; p < period; ++p) {
      std::vector<double> next(n * n, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t l = 0; l < n; ++l) {
          if (mp[i * n + l] == 0.0) {
            continue;
          }
          for (std::size_t j = 0; j < n; ++j) {
            if (m(l, j)) {
              next[i * n + j] += mp[i * n + l];
            }
          }
        }
      }
      mp = std::move(next);
    }

    std::vector<double> v(n, 1.0);
    std::vector<double> w(n);
    auto const root = [period](double x) {
      return std::pow(x, 1.0 / static_cast<double>(period));
    };
    for (std::size_t it = 0; it < max_iters; ++it) {
      double lo = std::numeric_limits<double>::infinity();
      double hi = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
          s += mp[i * n + j] * v[j];
        }
        w[i] = s;
        lo   = std::min(lo, s / v[i]);
        hi   = std::max(hi, s / v[i]);
      }
      double const rlo = root(lo);
      double const rhi = root(hi);
      if (rhi - rlo <= tol) {
        return 0.5 * (rlo + rhi);
      }
      double const scale = *std::max_element(w.begin(), w.end());
      for (std::size_t i = 0; i < n; ++i) {
        v[i] = w[i] / scale;
      }
    }
    throw Error(ErrorCode::NoConvergence,
                "Collatz-Wielandt bracket did not close within "
                    + std::to_string(max_iters) + " iterations");
  }

  inline double spectral_radius(RelationMatrix const& K, double tol) {
    return spectral_radius(K.matrix(), tol);
  }

  ////////////////////////////////////////////////////////////////////////
  // BallGeometry
  ////////////////////////////////////////////////////////////////////////

  //! Exact sizes of the Cayley tree's levels, semiballs and balls. Matrix
  //! powers of K are memoized; the cache is guarded so one instance can be
  //! queried from several threads.
  class BallGeometry {
   public:
    explicit BallGeometry(RelationMatrix K) : _K(std::move(K)) {
      _powers.push_back(NaturalMatrix::identity(_K.k()));
    }

    BallGeometry(BallGeometry const&)            = delete;
    BallGeometry& operator=(BallGeometry const&) = delete;

    [[nodiscard]] RelationMatrix const& relation() const noexcept {
      return _K;
    }

    //! K^e with exact entries.
    [[nodiscard]] NaturalMatrix power(std::size_t e) const {
      std::lock_guard<std::mutex> lock(_mutex);
      if (_powers.size() == 1) {
        _powers.emplace_back(_K.matrix());
      }
      while (_powers.size() <= e) {
        _powers.push_back(_powers.back() * _powers[1]);
      }
      return _powers[e];
    }

    //! [L_0, ..., L_n] with L_0 = 1 and L_l = sum_j K^l(i, j): the number of
    //! reduced words of length l + 1 starting with s_i.
    [[nodiscard]] std::vector<Natural> level_counts(std::size_t i,
                                                    std::size_t n) const {
      check_index(i);
      std::vector<Natural> out;
      out.reserve(n + 1);
      out.emplace_back(1);
      for (std::size_t l = 1; l <= n; ++l) {
        out.push_back(power(l).row_sum(i));
      }
      return out;
    }

    [[nodiscard]] Natural semiball_size(std::size_t i, std::size_t n) const {
      Natural s = 0;
      for (auto const& x : level_counts(i, n)) {
        s += x;
      }
      return s;
    }

    //! |Delta_0| = 1 and |Delta_n| = 1 + sum_i |semiball(s_i, n - 1)|.
    [[nodiscard]] Natural ball_size(std::size_t n) const {
      if (n == 0) {
        return Natural(1);
      }
      Natural s = 1;
      for (std::size_t i = 0; i < _K.k(); ++i) {
        s += semiball_size(i, n - 1);
      }
      return s;
    }

   private:
    void check_index(std::size_t i) const {
      if (i >= _K.k()) {
        throw Error(ErrorCode::IndexOutOfRange,
                    "generator index " + std::to_string(i) + " with k = "
                        + std::to_string(_K.k()));
      }
    }

    RelationMatrix                     _K;
    mutable std::mutex                 _mutex;
    mutable std::vector<NaturalMatrix> _powers;
  };

  inline std::vector<Natural> level_counts(RelationMatrix const& K,
                                           std::size_t           i,
                                           std::size_t           n) {
    return BallGeometry(K).level_counts(i, n);
  }

  inline Natural semiball_size(RelationMatrix const& K,
                               std::size_t           i,
                               std::size_t           n) {
    return BallGeometry(K).semiball_size(i, n);
  }

  inline Natural ball_size(RelationMatrix const& K, std::size_t n) {
    return BallGeometry(K).ball_size(n);
  }

}  // namespace tsent

#endif  // TSENT_CAYLEY_GEOMETRY_HPP_
