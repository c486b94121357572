// tsent - entropy of Markov tree shifts on Cayley trees
//
// Markov tree shifts X_A on the Cayley tree of G = <S_k | K>, their
// structural classification, exact pattern counts, and an independent
// brute-force enumeration oracle.
//
// Edge convention: the edge g -> g s_l carries A_l, i.e. the transition
// matrix is indexed by the child's generator.

#ifndef TSENT_TREE_SHIFT_HPP_
#define TSENT_TREE_SHIFT_HPP_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cayley_geometry.hpp"
#include "error.hpp"
#include "matrix.hpp"

namespace tsent {

  struct Classification {
    bool                       is_hom = false;
    std::optional<std::size_t> full_row_index;
    std::optional<std::size_t> constant_row_sum;
    //! r when k = 2r and K(i, j) = 0 exactly when |i - j| = r (the free
    //! group F_r with s_{r+i} = s_i^{-1}).
    std::optional<std::size_t> free_group_rank;
    //! |A| <= 2r - 1; only meaningful when free_group_rank is set.
    bool alphabet_small_enough = false;

    bool operator==(Classification const&) const = default;
  };

  //! A validated Markov tree shift: relation K, alphabet, and one transition
  //! matrix per generator.
  class MarkovSystem {
   public:
    MarkovSystem(RelationMatrix           K,
                 std::vector<std::string> symbols,
                 std::vector<BitMatrix>   transitions);

    [[nodiscard]] RelationMatrix const& relation() const noexcept {
      return _K;
    }
    [[nodiscard]] std::size_t k() const noexcept {
      return _K.k();
    }
    [[nodiscard]] std::size_t alphabet_size() const noexcept {
      return _symbols.size();
    }
    [[nodiscard]] std::vector<std::string> const& symbols() const noexcept {
      return _symbols;
    }
    [[nodiscard]] BitMatrix const& transition(std::size_t i) const {
      return _A.at(i);
    }
    [[nodiscard]] std::vector<BitMatrix> const& transitions() const noexcept {
      return _A;
    }
    [[nodiscard]] Classification const& classification() const noexcept {
      return _class;
    }

    bool operator==(MarkovSystem const& that) const {
      return _K == that._K && _symbols == that._symbols && _A == that._A;
    }

   private:
    RelationMatrix           _K;
    std::vector<std::string> _symbols;
    std::vector<BitMatrix>   _A;
    Classification           _class;
  };

  //! F_r convention: k = 2r, K(i, j) = 0 iff |i - j| = r.
  inline std::optional<std::size_t> free_group_rank(RelationMatrix const& K) {
    std::size_t const k = K.k();
    if (k % 2 != 0) {
      return std::nullopt;
    }
    std::size_t const r = k / 2;
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        std::size_t const d = i > j ? i - j : j - i;
        if (K(i, j) == (d == r)) {
          return std::nullopt;
        }
      }
    }
    return r;
  }

  //! The F_r relation matrix in the convention above.
  inline RelationMatrix free_group_relation(std::size_t r) {
    if (r == 0) {
      throw Error(ErrorCode::InvalidArgument, "free group rank must be >= 1");
    }
    BitMatrix m(2 * r, 2 * r, true);
    for (std::size_t i = 0; i < r; ++i) {
      m.set(i, i + r, false);
      m.set(i + r, i, false);
    }
    return RelationMatrix(std::move(m));
  }

  inline Classification classify(RelationMatrix const&         K,
                                 std::vector<BitMatrix> const& A) {
    Classification c;
    std::size_t const k = K.k();
    c.is_hom            = true;
    for (std::size_t i = 1; i < A.size(); ++i) {
      if (!(A[i] == A[0])) {
        c.is_hom = false;
      }
    }
    for (std::size_t i = 0; i < k; ++i) {
      if (K.row_sum(i) == k) {
        c.full_row_index = i;
        break;
      }
    }
    std::size_t const m     = K.row_sum(0);
    bool              equal = true;
    for (std::size_t i = 1; i < k; ++i) {
      equal = equal && K.row_sum(i) == m;
    }
    if (equal) {
      c.constant_row_sum = m;
    }
    c.free_group_rank = free_group_rank(K);
    if (c.free_group_rank && !A.empty()) {
      c.alphabet_small_enough = A[0].rows() <= 2 * *c.free_group_rank - 1;
    }
    return c;
  }

  inline Classification classify(MarkovSystem const& sys) {
    return classify(sys.relation(), sys.transitions());
  }

  inline MarkovSystem::MarkovSystem(RelationMatrix           K,
                                    std::vector<std::string> symbols,
                                    std::vector<BitMatrix>   transitions)
      : _K(std::move(K)), _symbols(std::move(symbols)),
        _A(std::move(transitions)) {
    if (_symbols.empty()) {
      throw Error(ErrorCode::EmptyAlphabet, "alphabet has no symbols");
    }
    if (_A.size() != _K.k()) {
      throw Error(ErrorCode::DimensionMismatch,
                  "expected " + std::to_string(_K.k())
                      + " transition matrices, got "
                      + std::to_string(_A.size()));
    }
    for (std::size_t i = 0; i < _A.size(); ++i) {
      if (_A[i].rows() != _symbols.size() || _A[i].cols() != _symbols.size()) {
        throw Error(ErrorCode::DimensionMismatch,
                    "A[" + std::to_string(i) + "] is "
                        + std::to_string(_A[i].rows()) + "x"
                        + std::to_string(_A[i].cols()) + ", alphabet has "
                        + std::to_string(_symbols.size()) + " symbols");
      }
    }
    _class = classify(_K, _A);
  }

  inline MarkovSystem validate_system(RelationMatrix                      K,
                                      std::vector<std::string>            alphabet,
                                      std::vector<BitMatrix::Rows> const& A_list) {
    if (alphabet.empty()) {
      throw Error(ErrorCode::EmptyAlphabet, "alphabet has no symbols");
    }
    std::vector<BitMatrix> A;
    A.reserve(A_list.size());
    for (std::size_t i = 0; i < A_list.size(); ++i) {
      if (A_list[i].size() != alphabet.size()) {
        throw Error(ErrorCode::DimensionMismatch,
                    "A[" + std::to_string(i) + "] has "
                        + std::to_string(A_list[i].size()) + " rows");
      }
      try {
        A.push_back(BitMatrix::from_rows(A_list[i]));
      } catch (Error const& e) {
        if (e.code() == ErrorCode::NonSquare) {
          throw Error(ErrorCode::DimensionMismatch,
                      "A[" + std::to_string(i) + "]: " + e.what());
        }
        throw Error(e.code(), "A[" + std::to_string(i) + "]: " + e.what());
      }
    }
    return MarkovSystem(std::move(K), std::move(alphabet), std::move(A));
  }

  //! Symbols "0", "1", ... for systems built in code.
  inline std::vector<std::string> default_symbols(std::size_t n) {
    std::vector<std::string> out;
    for (std::size_t a = 0; a < n; ++a) {
      out.push_back(std::to_string(a));
    }
    return out;
  }

  ////////////////////////////////////////////////////////////////////////
  // Exact counts
  ////////////////////////////////////////////////////////////////////////

  //! Pattern counts up to some depth. Indexing is [m][generator][symbol]
  //! for stem and branch counts and [m][symbol] for ball counts.
  //!
  //!   stem[m][j][a]   = p^{(s_j)}_{m;a}: patterns on the depth-m semiball at
  //!                     s_j whose root carries a;
  //!   ball[m][a]      = p_{m;a}: patterns on the ball Delta_m, root a;
  //!   branch[m][i][a] = q^{(s_i)}_{m;a}: patterns on the root plus the
  //!                     depth-(m-1) semiball hanging below it via s_i.
  struct ExactCountTable {
    using PerSymbol    = std::vector<Natural>;
    using PerGenerator = std::vector<PerSymbol>;

    std::size_t               depth = 0;
    std::vector<PerGenerator> stem;
    std::vector<PerSymbol>    ball;
    std::vector<PerGenerator> branch;

    [[nodiscard]] bool has_ball_counts() const noexcept {
      return !ball.empty();
    }

    [[nodiscard]] Natural stem_total(std::size_t m, std::size_t j) const {
      return sum(stem.at(m).at(j));
    }

    [[nodiscard]] Natural ball_total(std::size_t m) const {
      return sum(ball.at(m));
    }

    [[nodiscard]] Natural branch_total(std::size_t m, std::size_t i) const {
      return sum(branch.at(m).at(i));
    }

    bool operator==(ExactCountTable const&) const = default;

   private:
    static Natural sum(PerSymbol const& v) {
      Natural s = 0;
      for (auto const& x : v) {
        s += x;
      }
      return s;
    }
  };

  constexpr std::size_t default_exact_depth_cap = 12;

  namespace detail {
    // (A p)_a = sum_b A(a, b) p_b
    inline std::vector<Natural> apply(BitMatrix const&            A,
                                      std::vector<Natural> const& p) {
      std::vector<Natural> out(A.rows());
      for (std::size_t a = 0; a < A.rows(); ++a) {
        for (std::size_t b = 0; b < A.cols(); ++b) {
          if (A(a, b)) {
            out[a] += p[b];
          }
        }
      }
      return out;
    }

    inline void check_depth(std::size_t n, std::size_t cap) {
      if (n > cap) {
        throw Error(ErrorCode::DepthCapExceeded,
                    "depth " + std::to_string(n) + " exceeds cap "
                        + std::to_string(cap));
      }
    }
  }  // namespace detail

  //! p^{(s_j)}_{m;a} for all m <= n from
  //!   p^{(s_j)}_{0;a} = 1,
  //!   p^{(s_j)}_{m;a} = prod_{l : K(j,l)=1} (A_l p^{(s_l)}_{m-1})_a.
  inline ExactCountTable exact_stem_counts(MarkovSystem const& sys,
                                           std::size_t         n,
                                           std::size_t cap = default_exact_depth_cap) {
    detail::check_depth(n, cap);
    std::size_t const k = sys.k();
    std::size_t const q = sys.alphabet_size();
    ExactCountTable   t;
    t.depth = n;
    t.stem.assign(1, ExactCountTable::PerGenerator(
                         k, ExactCountTable::PerSymbol(q, Natural(1))));
    for (std::size_t m = 1; m <= n; ++m) {
      auto const&                          prev = t.stem[m - 1];
      std::vector<std::vector<Natural>>    pushed(k);
      for (std::size_t l = 0; l < k; ++l) {
        pushed[l] = detail::apply(sys.transition(l), prev[l]);
      }
      ExactCountTable::PerGenerator next(k, ExactCountTable::PerSymbol(q, Natural(1)));
      for (std::size_t j = 0; j < k; ++j) {
        for (std::size_t l = 0; l < k; ++l) {
          if (!sys.relation()(j, l)) {
            continue;
          }
          for (std::size_t a = 0; a < q; ++a) {
            next[j][a] *= pushed[l][a];
          }
        }
      }
      t.stem.push_back(std::move(next));
    }
    return t;
  }

  //! Stem counts plus the root decomposition
  //!   q^{(s_i)}_{m;a} = (A_i p^{(s_i)}_{m-1})_a,  p_{m;a} = prod_i q^{(s_i)}_{m;a},
  //! with q_{0;a} = p_{0;a} = 1.
  inline ExactCountTable exact_ball_counts(MarkovSystem const& sys,
                                           std::size_t         n,
                                           std::size_t cap = default_exact_depth_cap) {
    ExactCountTable   t = exact_stem_counts(sys, n, cap);
    std::size_t const k = sys.k();
    std::size_t const q = sys.alphabet_size();
    t.branch.assign(1, ExactCountTable::PerGenerator(
                           k, ExactCountTable::PerSymbol(q, Natural(1))));
    t.ball.assign(1, ExactCountTable::PerSymbol(q, Natural(1)));
    for (std::size_t m = 1; m <= n; ++m) {
      ExactCountTable::PerGenerator br(k);
      ExactCountTable::PerSymbol    ball(q, Natural(1));
      for (std::size_t i = 0; i < k; ++i) {
        br[i] = detail::apply(sys.transition(i), t.stem[m - 1][i]);
        for (std::size_t a = 0; a < q; ++a) {
          ball[a] *= br[i][a];
        }
      }
      t.branch.push_back(std::move(br));
      t.ball.push_back(std::move(ball));
    }
    return t;
  }

  ////////////////////////////////////////////////////////////////////////
  // Brute-force oracle
  ////////////////////////////////////////////////////////////////////////

  //! Enumeration is refused once |tree| * log2|A| exceeds this many bits.
  constexpr double oracle_max_bits = 25.0;
  //! Hard cap on explicit tree size (matters only for |A| = 1).
  constexpr std::size_t oracle_max_nodes = std::size_t(1) << 20;

  namespace detail {
    // Explicit finite subtree of the Cayley tree, nodes in BFS order so that
    // parent[v] < v. generator[v] is the last letter of the word at v;
    // the root has none.
    struct ExplicitTree {
      static constexpr std::size_t none = static_cast<std::size_t>(-1);

      std::vector<std::size_t> parent;
      std::vector<std::size_t> generator;

      std::size_t size() const noexcept {
        return parent.size();
      }

      // Attaches the subtree of depth `depth` rooted at a new node reached
      // from `from` via generator `g`.
      void grow(RelationMatrix const& K,
                std::size_t           from,
                std::size_t           g,
                std::size_t           depth) {
        std::vector<std::pair<std::size_t, std::size_t>> frontier;
        parent.push_back(from);
        generator.push_back(g);
        frontier.emplace_back(size() - 1, 0);
        for (std::size_t head = 0; head < frontier.size(); ++head) {
          auto [v, d] = frontier[head];
          if (d == depth) {
            continue;
          }
          for (std::size_t l = 0; l < K.k(); ++l) {
            if (K(generator[v], l)) {
              parent.push_back(v);
              generator.push_back(l);
              frontier.emplace_back(size() - 1, d + 1);
              if (size() > oracle_max_nodes) {
                throw Error(ErrorCode::OracleTooLarge,
                            "explicit tree exceeds node cap");
              }
            }
          }
        }
      }

      // Depth-n semiball rooted at a node whose last letter is s_i.
      static ExplicitTree semiball(RelationMatrix const& K,
                                   std::size_t           i,
                                   std::size_t           n) {
        ExplicitTree t;
        t.grow(K, none, i, n);
        return t;
      }

      static ExplicitTree ball(RelationMatrix const& K, std::size_t n) {
        ExplicitTree t;
        t.parent.push_back(none);
        t.generator.push_back(none);
        if (n > 0) {
          for (std::size_t i = 0; i < K.k(); ++i) {
            t.grow(K, 0, i, n - 1);
          }
        }
        return t;
      }

      // Root plus the depth-(m-1) semiball below it via s_i.
      static ExplicitTree branch(RelationMatrix const& K,
                                 std::size_t           i,
                                 std::size_t           m) {
        ExplicitTree t;
        t.parent.push_back(none);
        t.generator.push_back(none);
        if (m > 0) {
          t.grow(K, 0, i, m - 1);
        }
        return t;
      }
    };

    // Counts, per root symbol, the assignments t of symbols to the nodes of
    // `tree` with A_{gen(v)}(t_parent(v), t_v) = 1 on every edge.
    inline std::vector<Natural> enumerate(MarkovSystem const& sys,
                                          ExplicitTree const& tree) {
      std::size_t const q = sys.alphabet_size();
      std::size_t const n = tree.size();
      if (static_cast<double>(n) * std::log2(static_cast<double>(q))
          > oracle_max_bits) {
        throw Error(ErrorCode::OracleTooLarge,
                    std::to_string(n) + " nodes over " + std::to_string(q)
                        + " symbols exceeds the enumeration guard");
      }
      std::vector<std::uint64_t> per_root(q, 0);
      std::vector<std::size_t>   label(n, 0);
      // Odometer over labels with early rejection: position v is only
      // advanced past labels that violate the edge to its parent.
      auto ok = [&](std::size_t v) {
        return v == 0
               || sys.transition(tree.generator[v])(label[tree.parent[v]],
                                                    label[v]);
      };
      std::size_t v = 0;
      while (true) {
        if (label[v] < q && ok(v)) {
          if (v + 1 == n) {
            ++per_root[label[0]];
            ++label[v];
          } else {
            ++v;
            label[v] = 0;
          }
          continue;
        }
        if (label[v] < q) {
          ++label[v];
          continue;
        }
        if (v == 0) {
          break;
        }
        --v;
        ++label[v];
      }
      std::vector<Natural> out(q);
      for (std::size_t a = 0; a < q; ++a) {
        out[a] = per_root[a];
      }
      return out;
    }
  }  // namespace detail

  //! Builds Delta_m, every semiball and every root branch explicitly for
  //! m <= n and counts admissible labelings by exhaustive enumeration.
  //! Throws OracleTooLarge when |Delta_n| * log2|A| > 25.
  inline ExactCountTable brute_force_counts(MarkovSystem const& sys,
                                            std::size_t         n) {
    auto const& K = sys.relation();
    {
      auto const ball = detail::ExplicitTree::ball(K, n);
      if (static_cast<double>(ball.size())
              * std::log2(static_cast<double>(sys.alphabet_size()))
          > oracle_max_bits) {
        throw Error(ErrorCode::OracleTooLarge,
                    "|Delta_" + std::to_string(n) + "| = "
                        + std::to_string(ball.size())
                        + " is too large to enumerate");
      }
    }
    ExactCountTable t;
    t.depth = n;
    for (std::size_t m = 0; m <= n; ++m) {
      ExactCountTable::PerGenerator stem;
      ExactCountTable::PerGenerator branch;
      for (std::size_t j = 0; j < sys.k(); ++j) {
        stem.push_back(
            detail::enumerate(sys, detail::ExplicitTree::semiball(K, j, m)));
        branch.push_back(
            detail::enumerate(sys, detail::ExplicitTree::branch(K, j, m)));
      }
      t.stem.push_back(std::move(stem));
      t.branch.push_back(std::move(branch));
      t.ball.push_back(
          detail::enumerate(sys, detail::ExplicitTree::ball(K, m)));
    }
    return t;
  }

  //! Largest n with |Delta_n| * log2|A| within the oracle guard.
  inline std::size_t max_oracle_depth(MarkovSystem const& sys,
                                      std::size_t         limit = 64) {
    std::size_t best = 0;
    for (std::size_t n = 0; n <= limit; ++n) {
      try {
        auto const ball = detail::ExplicitTree::ball(sys.relation(), n);
        if (static_cast<double>(ball.size())
                * std::log2(static_cast<double>(sys.alphabet_size()))
            > oracle_max_bits) {
          break;
        }
      } catch (Error const&) {
        break;
      }
      best = n;
    }
    return best;
  }

}  // namespace tsent

#endif  // TSENT_TREE_SHIFT_HPP_
