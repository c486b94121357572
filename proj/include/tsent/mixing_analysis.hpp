// tsent - entropy of Markov tree shifts on Cayley trees
//
// Graph representation of a Markov tree shift, strong connectivity, pivot
// search, and entropy-existence certificates.

#ifndef TSENT_MIXING_ANALYSIS_HPP_
#define TSENT_MIXING_ANALYSIS_HPP_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cayley_geometry.hpp"
#include "matrix.hpp"
#include "tree_shift.hpp"

namespace tsent {

  struct Vertex {
    std::size_t symbol    = 0;
    std::size_t generator = 0;

    bool operator==(Vertex const&) const = default;
  };

  //! Digraph on pairs (a, s_i) with an edge (a, s_i) -> (b, s_j) iff
  //! K(s_i, s_j) = 1 and A_j(a, b) = 1. Vertices are ordered by symbol,
  //! then generator: index(a, i) = a * k + i.
  class GraphRep {
   public:
    GraphRep(std::size_t k, std::size_t q, BitMatrix adjacency)
        : _k(k), _q(q), _adj(std::move(adjacency)) {}

    [[nodiscard]] std::size_t generators() const noexcept {
      return _k;
    }
    [[nodiscard]] std::size_t symbols() const noexcept {
      return _q;
    }
    [[nodiscard]] std::size_t vertex_count() const noexcept {
      return _k * _q;
    }
    [[nodiscard]] BitMatrix const& adjacency() const noexcept {
      return _adj;
    }

    [[nodiscard]] std::size_t index(Vertex v) const noexcept {
      return v.symbol * _k + v.generator;
    }
    [[nodiscard]] Vertex vertex(std::size_t index) const noexcept {
      return {index / _k, index % _k};
    }

    [[nodiscard]] bool has_edge(Vertex from, Vertex to) const {
      return _adj(index(from), index(to));
    }

    [[nodiscard]] std::size_t edge_count() const {
      std::size_t s = 0;
      for (std::size_t v = 0; v < vertex_count(); ++v) {
        s += _adj.row_sum(v);
      }
      return s;
    }

   private:
    std::size_t _k;
    std::size_t _q;
    BitMatrix   _adj;
  };

  inline GraphRep build_graph_representation(MarkovSystem const& sys) {
    std::size_t const k = sys.k();
    std::size_t const q = sys.alphabet_size();
    BitMatrix         adj(k * q, k * q);
    for (std::size_t a = 0; a < q; ++a) {
      for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t b = 0; b < q; ++b) {
          for (std::size_t j = 0; j < k; ++j) {
            if (sys.relation()(i, j) && sys.transition(j)(a, b)) {
              adj.set(a * k + i, b * k + j, true);
            }
          }
        }
      }
    }
    return GraphRep(k, q, std::move(adj));
  }

  //! Strongly connected components (Tarjan, iterative), each sorted, in the
  //! order Tarjan's algorithm closes them.
  inline std::vector<std::vector<std::size_t>>
  strongly_connected_components(BitMatrix const& adj) {
    std::size_t const n    = adj.rows();
    constexpr auto    none = static_cast<std::size_t>(-1);
    std::vector<std::size_t> index(n, none), low(n, 0);
    std::vector<bool>        on_stack(n, false);
    std::vector<std::size_t> stack;
    std::vector<std::vector<std::size_t>> out;
    std::size_t              counter = 0;

    // Explicit call stack of (vertex, next neighbour to look at).
    std::vector<std::pair<std::size_t, std::size_t>> calls;
    for (std::size_t root = 0; root < n; ++root) {
      if (index[root] != none) {
        continue;
      }
      calls.emplace_back(root, 0);
      index[root] = low[root] = counter++;
      stack.push_back(root);
      on_stack[root] = true;
      while (!calls.empty()) {
        auto& [v, next] = calls.back();
        bool descended  = false;
        while (next < n) {
          std::size_t w = next++;
          if (!adj(v, w)) {
            continue;
          }
          if (index[w] == none) {
            index[w] = low[w] = counter++;
            stack.push_back(w);
            on_stack[w] = true;
            calls.emplace_back(w, 0);
            descended = true;
            break;
          }
          if (on_stack[w]) {
            low[v] = std::min(low[v], index[w]);
          }
        }
        if (descended) {
          continue;
        }
        std::size_t const done = v;
        if (low[done] == index[done]) {
          std::vector<std::size_t> comp;
          std::size_t              w = none;
          do {
            w = stack.back();
            stack.pop_back();
            on_stack[w] = false;
            comp.push_back(w);
          } while (w != done);
          std::sort(comp.begin(), comp.end());
          out.push_back(std::move(comp));
        }
        calls.pop_back();
        if (!calls.empty()) {
          std::size_t const parent = calls.back().first;
          low[parent]              = std::min(low[parent], low[done]);
        }
      }
    }
    return out;
  }

  inline bool is_strongly_connected(GraphRep const& g) {
    return g.vertex_count() > 0
           && strongly_connected_components(g.adjacency()).size() == 1;
  }

  struct Pivot {
    Vertex      vertex;
    std::size_t target_generator = 0;
    std::size_t walk_length      = 0;
  };

  struct PivotSearch {
    std::optional<Pivot> pivot;
    //! Number of boolean powers A_1, A_2, ... inspected.
    std::size_t powers_examined = 0;
  };

  namespace detail {
    // Row-packed boolean matrix; rows are compared as a whole for the
    // eventual-periodicity seen-set.
    class PackedBoolMatrix {
     public:
      explicit PackedBoolMatrix(BitMatrix const& m)
          : _n(m.rows()), _words((m.rows() + 63) / 64),
            _bits(_n * _words, 0) {
        for (std::size_t i = 0; i < _n; ++i) {
          for (std::size_t j = 0; j < _n; ++j) {
            if (m(i, j)) {
              _bits[i * _words + j / 64] |= std::uint64_t(1) << (j % 64);
            }
          }
        }
      }

      bool operator()(std::size_t i, std::size_t j) const {
        return (_bits[i * _words + j / 64] >> (j % 64)) & 1U;
      }

      PackedBoolMatrix times(PackedBoolMatrix const& that) const {
        PackedBoolMatrix out(*this);
        std::fill(out._bits.begin(), out._bits.end(), 0);
        for (std::size_t i = 0; i < _n; ++i) {
          for (std::size_t l = 0; l < _n; ++l) {
            if (!(*this)(i, l)) {
              continue;
            }
            for (std::size_t w = 0; w < _words; ++w) {
              out._bits[i * _words + w] |= that._bits[l * _words + w];
            }
          }
        }
        return out;
      }

      std::vector<std::uint64_t> const& bits() const noexcept {
        return _bits;
      }

     private:
      std::size_t                _n;
      std::size_t                _words;
      std::vector<std::uint64_t> _bits;
    };
  }  // namespace detail

  //! Scans the boolean powers A_N of the adjacency matrix for a vertex
  //! (a, s_i), a generator s_j and N such that A_N((a, s_i), (b, s_j)) = 1
  //! for every symbol b. Stops when a power repeats, since the sequence is
  //! eventually periodic. Triples are tried in ascending (a, i, j) order.
  inline PivotSearch find_pivot_search(GraphRep const& g) {
    PivotSearch out;
    std::size_t const k = g.generators();
    std::size_t const q = g.symbols();
    if (g.vertex_count() == 0) {
      return out;
    }
    detail::PackedBoolMatrix const base(g.adjacency());
    detail::PackedBoolMatrix       power = base;
    std::set<std::vector<std::uint64_t>> seen;
    for (std::size_t N = 1;; ++N) {
      if (!seen.insert(power.bits()).second) {
        return out;
      }
      out.powers_examined = N;
      for (std::size_t a = 0; a < q; ++a) {
        for (std::size_t i = 0; i < k; ++i) {
          std::size_t const from = g.index({a, i});
          for (std::size_t j = 0; j < k; ++j) {
            bool all = true;
            for (std::size_t b = 0; b < q && all; ++b) {
              all = power(from, g.index({b, j}));
            }
            if (all) {
              out.pivot = Pivot{{a, i}, j, N};
              return out;
            }
          }
        }
      }
      power = power.times(base);
    }
  }

  inline std::optional<Pivot> find_pivot(GraphRep const& g) {
    return find_pivot_search(g).pivot;
  }

  ////////////////////////////////////////////////////////////////////////
  // Certificates
  ////////////////////////////////////////////////////////////////////////

  enum class CertificateKind {
    PrimitiveK_StemExists,
    IrreducibleK_StemExists,
    FullRow_TopEqualsStem,
    HomConstantRowSum_TopEqualsStem,
    FreeGroupHom_TopEqualsStem,
    FreeGroupSmallAlphabet_TopEqualsStem,
    PivotSC_TopEqualsStem
  };

  constexpr std::string_view to_string(CertificateKind kind) noexcept {
    switch (kind) {
      case CertificateKind::PrimitiveK_StemExists:
        return "PrimitiveK_StemExists";
      case CertificateKind::IrreducibleK_StemExists:
        return "IrreducibleK_StemExists";
      case CertificateKind::FullRow_TopEqualsStem:
        return "FullRow_TopEqualsStem";
      case CertificateKind::HomConstantRowSum_TopEqualsStem:
        return "HomConstantRowSum_TopEqualsStem";
      case CertificateKind::FreeGroupHom_TopEqualsStem:
        return "FreeGroupHom_TopEqualsStem";
      case CertificateKind::FreeGroupSmallAlphabet_TopEqualsStem:
        return "FreeGroupSmallAlphabet_TopEqualsStem";
      case CertificateKind::PivotSC_TopEqualsStem:
        return "PivotSC_TopEqualsStem";
    }
    return "Unknown";
  }

  constexpr bool claims_top_equals_stem(CertificateKind kind) noexcept {
    return kind != CertificateKind::PrimitiveK_StemExists
           && kind != CertificateKind::IrreducibleK_StemExists;
  }

  struct Certificate {
    CertificateKind                                  kind;
    std::vector<std::pair<std::string, std::string>> evidence;
  };

  namespace detail {
    inline std::string gen_name(std::size_t i) {
      return "s" + std::to_string(i + 1);
    }

    // A_{r+i} = A_i^T for every i < r.
    inline bool inverse_transposed(MarkovSystem const& sys, std::size_t r) {
      for (std::size_t i = 0; i < r; ++i) {
        if (!(sys.transition(r + i) == sys.transition(i).transpose())) {
          return false;
        }
      }
      return true;
    }
  }  // namespace detail

  //! One certificate per sufficient condition whose hypotheses hold. Every
  //! "TopEqualsStem" kind also requires an irreducible K. For an irreducible
  //! K of period P > 1 the per-generator stem values may oscillate with
  //! period P (e.g. K = [010;101;010]), so IrreducibleK_StemExists and
  //! PivotSC_TopEqualsStem additionally need K primitive, or A hom with
  //! constant row sum m (every semiball is then the same m-ary tree). An
  //! empty result claims nothing.
  inline std::vector<Certificate> existence_certificate(MarkovSystem const& sys) {
    std::vector<Certificate> out;
    auto const&              K   = sys.relation();
    auto const&              cls = sys.classification();
    bool const               irreducible = K.is_irreducible();
    bool const               stem_settles
        = K.is_primitive() || (cls.is_hom && cls.constant_row_sum);

    if (auto e = K.primitivity_exponent()) {
      out.push_back({CertificateKind::PrimitiveK_StemExists,
                     {{"exponent", std::to_string(*e)}}});
    }
    if (irreducible && stem_settles) {
      out.push_back({CertificateKind::IrreducibleK_StemExists,
                     {{"period", std::to_string(K.period())}}});
    }
    if (irreducible && cls.full_row_index) {
      out.push_back({CertificateKind::FullRow_TopEqualsStem,
                     {{"row", detail::gen_name(*cls.full_row_index)}}});
    }
    if (irreducible && cls.is_hom && cls.constant_row_sum) {
      out.push_back({CertificateKind::HomConstantRowSum_TopEqualsStem,
                     {{"row_sum", std::to_string(*cls.constant_row_sum)}}});
    }
    if (irreducible && cls.free_group_rank) {
      std::size_t const r = *cls.free_group_rank;
      if (detail::inverse_transposed(sys, r)) {
        bool same = true;
        for (std::size_t i = 1; i < r; ++i) {
          same = same && sys.transition(i) == sys.transition(0);
        }
        if (same) {
          out.push_back({CertificateKind::FreeGroupHom_TopEqualsStem,
                         {{"rank", std::to_string(r)}}});
        }
        if (cls.alphabet_small_enough) {
          out.push_back(
              {CertificateKind::FreeGroupSmallAlphabet_TopEqualsStem,
               {{"rank", std::to_string(r)},
                {"alphabet_size", std::to_string(sys.alphabet_size())},
                {"bound", std::to_string(2 * r - 1)}}});
        }
      }
    }
    auto const g = build_graph_representation(sys);
    if (stem_settles && is_strongly_connected(g)) {
      if (auto p = find_pivot(g)) {
        out.push_back(
            {CertificateKind::PivotSC_TopEqualsStem,
             {{"pivot_symbol", sys.symbols()[p->vertex.symbol]},
              {"pivot_generator", detail::gen_name(p->vertex.generator)},
              {"target_generator", detail::gen_name(p->target_generator)},
              {"walk_length", std::to_string(p->walk_length)}}});
      }
    }
    return out;
  }

}  // namespace tsent

#endif  // TSENT_MIXING_ANALYSIS_HPP_
