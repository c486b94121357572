// tsent - entropy of Markov tree shifts on Cayley trees
//
// Normalized log-domain recursions for the stem entropy, the topological
// entropy on the ball around the identity, and the full d-ary tree entropy
// with its series bracket.
//
// Internally every quantity is in nats. For each generator j and symbol a
// the state keeps
//
//   ell_j[a] = log p^{(s_j)}_{n;a} - t_j,   t_j = log max_a p^{(s_j)}_{n;a},
//
// so max_a ell_j[a] = 0 and t obeys
//
//   t_j(n) = sum_l K(j, l) t_l(n - 1) + log r_j(n).

#ifndef TSENT_ENTROPY_ENGINE_HPP_
#define TSENT_ENTROPY_ENGINE_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cayley_geometry.hpp"
#include "error.hpp"
#include "log_domain.hpp"
#include "matrix.hpp"
#include "tree_shift.hpp"

namespace tsent {

  //! Hard ceiling on iterations; t grows like rho(K)^n and must stay finite.
  constexpr std::size_t max_iteration_cap = 600;

  struct EntropyOptions {
    std::size_t max_iters = 300;
    double      eps       = 1e-13;
    double      eps_zero  = 1e-13;
    LogBase     base      = LogBase::E;
  };

  struct TraceRow {
    std::size_t         n = 0;
    double              h = 0.0;
    std::vector<double> per_generator;
    double              spread = 0.0;
    //! log r at this step, in nats, one per generator (one entry for ball
    //! and full-tree runs).
    std::vector<double> log_r;
    double              envelope = 0.0;
  };

  //! Partial sums S_N and tails of the full-tree series, in the estimate's
  //! base. valid is false when the bracket is not guaranteed (non-hom or
  //! non-essential matrices, or d = 1).
  struct SeriesBracket {
    std::vector<double> partial_sums;
    std::vector<double> tails;
    bool                valid = false;

    [[nodiscard]] double lower(std::size_t N) const {
      return partial_sums.at(N);
    }
    [[nodiscard]] double upper(std::size_t N) const {
      return partial_sums.at(N) + tails.at(N);
    }
  };

  struct EntropyEstimate {
    double                       value = 0.0;
    LogBase                      base  = LogBase::E;
    std::vector<double>          per_generator;
    std::vector<TraceRow>        trace;
    bool                         converged       = false;
    std::size_t                  iterations_used = 0;
    std::vector<double>          upper_envelope;
    std::optional<SeriesBracket> series;

    [[nodiscard]] double max_spread() const {
      if (per_generator.empty()) {
        return 0.0;
      }
      auto [lo, hi]
          = std::minmax_element(per_generator.begin(), per_generator.end());
      return *hi - *lo;
    }

    //! Same estimate expressed in another base.
    [[nodiscard]] EntropyEstimate in_base(LogBase target) const {
      double const    f   = nats_per_unit(base) / nats_per_unit(target);
      EntropyEstimate out = *this;
      out.base            = target;
      out.value *= f;
      for (auto& x : out.per_generator) {
        x *= f;
      }
      for (auto& x : out.upper_envelope) {
        x *= f;
      }
      for (auto& row : out.trace) {
        row.h *= f;
        row.spread *= f;
        row.envelope *= f;
        for (auto& x : row.per_generator) {
          x *= f;
        }
      }
      if (out.series) {
        for (auto& x : out.series->partial_sums) {
          x *= f;
        }
        for (auto& x : out.series->tails) {
          x *= f;
        }
      }
      return out;
    }
  };

  ////////////////////////////////////////////////////////////////////////
  // LogCountState
  ////////////////////////////////////////////////////////////////////////

  class LogCountState {
   public:
    explicit LogCountState(MarkovSystem const& sys)
        : _sys(&sys),
          _ell(sys.k(), std::vector<double>(sys.alphabet_size(), 0.0)),
          _t(sys.k(), 0.0),
          _size(sys.k(), 1.0) {
      for (auto const& A : sys.transitions()) {
        _logA.push_back(log_matrix(A));
      }
    }

    [[nodiscard]] std::size_t depth() const noexcept {
      return _n;
    }

    //! t^{(s_j)}_n = log max_a p^{(s_j)}_{n;a}, nats.
    [[nodiscard]] double log_max(std::size_t j) const {
      return _t[j];
    }

    //! log p^{(s_j)}_n = t_j + log sum_a exp(ell_j[a]), nats.
    [[nodiscard]] double log_total(std::size_t j) const {
      return _t[j] + log_sum_exp(_ell[j]);
    }

    [[nodiscard]] std::vector<double> const& normalized(std::size_t j) const {
      return _ell[j];
    }

    //! |semiball(s_j, n)| in floating point.
    [[nodiscard]] double semiball_size(std::size_t j) const {
      return _size[j];
    }

    [[nodiscard]] std::vector<std::vector<double>> const&
    log_r_history() const noexcept {
      return _log_r;
    }

    //! log (A_l exp(ell_l))_a for every l, a.
    [[nodiscard]] std::vector<std::vector<double>> pushed() const {
      std::size_t const                k = _sys->k();
      std::size_t const                q = _sys->alphabet_size();
      std::vector<std::vector<double>> out(k, std::vector<double>(q));
      std::vector<double>              terms(q);
      for (std::size_t l = 0; l < k; ++l) {
        for (std::size_t a = 0; a < q; ++a) {
          for (std::size_t b = 0; b < q; ++b) {
            terms[b] = _logA[l][a * q + b] + _ell[l][b];
          }
          out[l][a] = log_sum_exp(terms);
        }
      }
      return out;
    }

    //! Advances to depth n + 1. Throws EmptyShift if some generator has no
    //! admissible pattern left.
    void step() {
      std::size_t const   k    = _sys->k();
      std::size_t const   q    = _sys->alphabet_size();
      auto const&         K    = _sys->relation();
      auto const          push = pushed();
      std::vector<double> t(k, 0.0);
      std::vector<double> size(k, 1.0);
      std::vector<double> log_r(k, 0.0);
      std::vector<std::vector<double>> ell(k, std::vector<double>(q, 0.0));
      for (std::size_t j = 0; j < k; ++j) {
        for (std::size_t l = 0; l < k; ++l) {
          if (!K(j, l)) {
            continue;
          }
          for (std::size_t a = 0; a < q; ++a) {
            ell[j][a] += push[l][a];
          }
          t[j] += _t[l];
          size[j] += _size[l];
        }
        double const m = *std::max_element(ell[j].begin(), ell[j].end());
        if (m == neg_inf) {
          throw Error(ErrorCode::EmptyShift,
                      "no admissible pattern on the depth-"
                          + std::to_string(_n + 1) + " semiball at s"
                          + std::to_string(j + 1));
        }
        for (auto& x : ell[j]) {
          x -= m;
        }
        log_r[j] = m;
        t[j] += m;
      }
      _ell  = std::move(ell);
      _t    = std::move(t);
      _size = std::move(size);
      _log_r.push_back(std::move(log_r));
      ++_n;
    }

    //! log p_{n+1;a} for the ball Delta_{n+1} around the identity:
    //! sum_i [ t_i + log (A_i exp(ell_i))_a ].
    [[nodiscard]] std::vector<double> log_ball_counts_next() const {
      std::size_t const   q    = _sys->alphabet_size();
      auto const          push = pushed();
      std::vector<double> out(q, 0.0);
      for (std::size_t i = 0; i < _sys->k(); ++i) {
        for (std::size_t a = 0; a < q; ++a) {
          out[a] += _t[i] + push[i][a];
        }
      }
      return out;
    }

    //! |Delta_{n+1}| = 1 + sum_i |semiball(s_i, n)|.
    [[nodiscard]] double ball_size_next() const {
      double s = 1.0;
      for (double x : _size) {
        s += x;
      }
      return s;
    }

    static std::vector<double> log_matrix(BitMatrix const& A) {
      std::vector<double> out(A.rows() * A.cols());
      for (std::size_t a = 0; a < A.rows(); ++a) {
        for (std::size_t b = 0; b < A.cols(); ++b) {
          out[a * A.cols() + b] = A(a, b) ? 0.0 : neg_inf;
        }
      }
      return out;
    }

   private:
    MarkovSystem const*              _sys;
    std::vector<std::vector<double>> _logA;
    std::vector<std::vector<double>> _ell;
    std::vector<double>              _t;
    std::vector<double>              _size;
    std::vector<std::vector<double>> _log_r;
    std::size_t                      _n = 0;
  };

  namespace detail {
    inline void check_options(EntropyOptions const& opts) {
      if (opts.max_iters == 0 || !(opts.eps > 0) || !(opts.eps_zero > 0)) {
        throw Error(ErrorCode::InvalidArgument,
                    "max_iters, eps and eps_zero must be positive");
      }
    }

    inline std::size_t iteration_budget(EntropyOptions const& opts) {
      return std::min(opts.max_iters, max_iteration_cap);
    }

    // resolution = log|A| / |domain| in the reporting base, the largest gap
    // between h_n and the total-count envelope. A step settles when h has
    // stopped moving (relative change below eps, or |h| below eps_zero) and
    // the resolution is below max(eps |h|, eps_zero).
    inline bool settled(double h, double prev, double resolution,
                        EntropyOptions const& opts) {
      bool const still = std::abs(h) < opts.eps_zero
                         || std::abs(h - prev) < opts.eps * std::abs(prev);
      return still
             && resolution <= std::max(opts.eps * std::abs(h), opts.eps_zero);
    }

    // Supports of the stem counts shrink with depth and stop changing after
    // at most k q steps, so emptiness is decided by their fixed point.
    inline void require_nonempty(BitMatrix const&              K,
                                 std::vector<BitMatrix> const& A) {
      std::size_t const              k = A.size();
      std::size_t const              q = A.front().rows();
      std::vector<std::vector<bool>> live(k, std::vector<bool>(q, true));
      auto const reaches = [&](std::size_t l, std::size_t a) {
        for (std::size_t b = 0; b < q; ++b) {
          if (A[l](a, b) && live[l][b]) {
            return true;
          }
        }
        return false;
      };
      for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t j = 0; j < k; ++j) {
          for (std::size_t a = 0; a < q; ++a) {
            if (!live[j][a]) {
              continue;
            }
            for (std::size_t l = 0; l < k; ++l) {
              if (K(j, l) && !reaches(l, a)) {
                live[j][a] = false;
                changed    = true;
                break;
              }
            }
          }
        }
      }
      for (std::size_t a = 0; a < q; ++a) {
        bool ok = true;
        for (std::size_t i = 0; i < k && ok; ++i) {
          ok = reaches(i, a);
        }
        if (ok) {
          return;
        }
      }
      throw Error(ErrorCode::EmptyShift, "no configuration on the whole tree");
    }

    inline double spread_of(std::vector<double> const& v) {
      auto [lo, hi] = std::minmax_element(v.begin(), v.end());
      return *hi - *lo;
    }

    inline double stem_envelope(LogCountState const& s, std::size_t k) {
      double best = neg_inf;
      for (std::size_t j = 0; j < k; ++j) {
        best = std::max(best, s.log_total(j) / s.semiball_size(j));
      }
      return best;
    }

    inline std::vector<double> stem_values(LogCountState const& s,
                                           std::size_t          k,
                                           double               unit) {
      std::vector<double> h(k);
      for (std::size_t j = 0; j < k; ++j) {
        h[j] = s.log_max(j) / s.semiball_size(j) / unit;
      }
      return h;
    }
  }  // namespace detail

  ////////////////////////////////////////////////////////////////////////
  // Stem entropy
  ////////////////////////////////////////////////////////////////////////

  //! Per-generator stem entropy h^{(s_j)}_n = t_j / |semiball(s_j, n)|,
  //! iterated until every generator's relative change drops below eps (or
  //! |h| < eps_zero). value is the maximum over generators. On hitting the
  //! iteration budget the partial estimate is returned with
  //! converged = false.
  inline EntropyEstimate stem_entropy(MarkovSystem const&   sys,
                                      EntropyOptions const& opts = {}) {
    detail::check_options(opts);
    detail::require_nonempty(sys.relation().matrix(), sys.transitions());
    double const    unit = nats_per_unit(opts.base);
    std::size_t const k  = sys.k();
    LogCountState   state(sys);
    EntropyEstimate est;
    est.base = opts.base;

    auto record = [&](std::vector<double> const& h) {
      TraceRow row;
      row.n             = state.depth();
      row.per_generator = h;
      row.h             = *std::max_element(h.begin(), h.end());
      row.spread        = detail::spread_of(h);
      row.log_r         = state.depth() == 0
                              ? std::vector<double>(k, 0.0)
                              : state.log_r_history().back();
      row.envelope      = detail::stem_envelope(state, k) / unit;
      est.upper_envelope.push_back(row.envelope);
      est.trace.push_back(std::move(row));
    };

    double const log_q
        = std::log(static_cast<double>(sys.alphabet_size())) / unit;
    std::vector<double> prev = detail::stem_values(state, k, unit);
    record(prev);
    std::size_t const budget = detail::iteration_budget(opts);
    for (std::size_t n = 1; n <= budget; ++n) {
      state.step();
      auto h = detail::stem_values(state, k, unit);
      record(h);
      bool done = true;
      for (std::size_t j = 0; j < k; ++j) {
        done = done
               && detail::settled(h[j], prev[j],
                                  log_q / state.semiball_size(j), opts);
      }
      prev = std::move(h);
      if (done) {
        est.converged = true;
        break;
      }
    }
    est.per_generator   = prev;
    est.value           = est.trace.back().h;
    est.iterations_used = state.depth();
    return est;
  }

  //! max_j log p^{(s_j)}_n / |semiball(s_j, n)| for n = 0..n_max; its
  //! infimum over n is the stem entropy when K is irreducible.
  inline std::vector<double> stem_upper_envelope(MarkovSystem const& sys,
                                                 std::size_t         n_max,
                                                 LogBase base = LogBase::E) {
    if (n_max > max_iteration_cap) {
      throw Error(ErrorCode::InvalidArgument,
                  "envelope depth above the iteration cap");
    }
    LogCountState       state(sys);
    std::vector<double> out;
    out.push_back(detail::stem_envelope(state, sys.k()) / nats_per_unit(base));
    for (std::size_t n = 1; n <= n_max; ++n) {
      state.step();
      out.push_back(detail::stem_envelope(state, sys.k())
                    / nats_per_unit(base));
    }
    return out;
  }

  ////////////////////////////////////////////////////////////////////////
  // Topological entropy on the ball around the identity
  ////////////////////////////////////////////////////////////////////////

  //! h_n = log max_a p_{n;a} / |Delta_n|, where the ball Delta_n is the root
  //! plus k semiballs of depth n - 1. The envelope column holds
  //! log p_n / |Delta_n| and per_generator the stem values reached at the
  //! same depth.
  inline EntropyEstimate topological_entropy_cayley(
      MarkovSystem const&   sys,
      EntropyOptions const& opts = {}) {
    detail::check_options(opts);
    detail::require_nonempty(sys.relation().matrix(), sys.transitions());
    double const      unit = nats_per_unit(opts.base);
    std::size_t const k    = sys.k();
    std::size_t const q    = sys.alphabet_size();
    LogCountState     state(sys);
    EntropyEstimate   est;
    est.base = opts.base;

    {
      TraceRow row;
      row.n             = 0;
      row.per_generator = detail::stem_values(state, k, unit);
      row.log_r         = {0.0};
      row.envelope      = std::log(static_cast<double>(q)) / unit;
      est.upper_envelope.push_back(row.envelope);
      est.trace.push_back(std::move(row));
    }
    double            prev   = 0.0;
    std::size_t const budget = detail::iteration_budget(opts);
    for (std::size_t n = 1; n <= budget; ++n) {
      auto const   log_p = state.log_ball_counts_next();
      double const size  = state.ball_size_next();
      double const top   = *std::max_element(log_p.begin(), log_p.end());
      if (top == neg_inf) {
        throw Error(ErrorCode::EmptyShift,
                    "no admissible pattern on Delta_" + std::to_string(n));
      }
      state.step();
      TraceRow row;
      row.n             = n;
      row.h             = top / size / unit;
      row.per_generator = detail::stem_values(state, k, unit);
      row.spread        = detail::spread_of(row.per_generator);
      row.log_r         = {top};
      row.envelope      = log_sum_exp(log_p) / size / unit;
      est.upper_envelope.push_back(row.envelope);
      double const res  = std::log(static_cast<double>(q)) / size / unit;
      bool const   done = detail::settled(row.h, prev, res, opts);
      prev              = row.h;
      est.trace.push_back(std::move(row));
      if (done) {
        est.converged = true;
        break;
      }
    }
    est.value           = est.trace.back().h;
    est.per_generator   = est.trace.back().per_generator;
    est.iterations_used = state.depth();
    return est;
  }

  ////////////////////////////////////////////////////////////////////////
  // Full d-ary tree
  ////////////////////////////////////////////////////////////////////////

  //! Entropy of the Markov shift given by d transition matrices on the full
  //! d-ary rooted tree (K = all ones), where stem and topological entropy
  //! coincide. The normalized vector obeys
  //!
  //!   p_n = (A_1 p_{n-1}) .* ... .* (A_d p_{n-1}),  r_n = max_a p_n[a],
  //!
  //! and h = sum_n log r_n (d - 1) / d^{n+1}. For hom essential inputs the
  //! partial sums S_N bracket h from below and S_N + log|A| / d^N from above.
  inline EntropyEstimate fulltree_entropy(std::vector<BitMatrix> const& A,
                                          EntropyOptions const& opts = {}) {
    detail::check_options(opts);
    if (A.empty()) {
      throw Error(ErrorCode::DimensionMismatch, "need at least one matrix");
    }
    std::size_t const d = A.size();
    std::size_t const q = A.front().rows();
    if (q == 0) {
      throw Error(ErrorCode::EmptyAlphabet, "alphabet has no symbols");
    }
    for (std::size_t i = 0; i < d; ++i) {
      if (A[i].rows() != q || A[i].cols() != q) {
        throw Error(ErrorCode::DimensionMismatch,
                    "A[" + std::to_string(i) + "] does not match A[0]");
      }
    }
    detail::require_nonempty(BitMatrix(d, d, true), A);
    double const unit = nats_per_unit(opts.base);
    double const dd   = static_cast<double>(d);

    std::vector<std::vector<double>> logA;
    for (auto const& m : A) {
      logA.push_back(LogCountState::log_matrix(m));
    }
    bool hom = true;
    bool essential = true;
    for (auto const& m : A) {
      hom       = hom && m == A.front();
      essential = essential && m.is_essential();
    }

    EntropyEstimate est;
    est.base = opts.base;
    SeriesBracket series;
    series.valid = hom && essential && d >= 2;

    double const log_q  = std::log(static_cast<double>(q));
    double       t      = 0.0;
    double       size   = 1.0;  // |Delta_n| = 1 + d + ... + d^n
    double       weight = (dd - 1.0) / dd;  // (d - 1) / d^{n+1}
    double       sum    = 0.0;
    double       tail   = log_q;  // log|A| / d^N
    std::vector<double> ell(q, 0.0);

    auto record = [&](std::size_t n, double log_r) {
      TraceRow row;
      row.n             = n;
      row.h             = t / size / unit;
      row.per_generator = {row.h};
      row.log_r         = {log_r};
      row.envelope      = (t + log_sum_exp(ell)) / size / unit;
      est.upper_envelope.push_back(row.envelope);
      est.trace.push_back(std::move(row));
      series.partial_sums.push_back(sum / unit);
      series.tails.push_back(tail / unit);
    };

    record(0, 0.0);
    double              prev   = 0.0;
    std::size_t const   budget = detail::iteration_budget(opts);
    std::vector<double> terms(q);
    std::size_t         n = 0;
    for (n = 1; n <= budget; ++n) {
      std::vector<double> next(q, 0.0);
      for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t a = 0; a < q; ++a) {
          for (std::size_t b = 0; b < q; ++b) {
            terms[b] = logA[i][a * q + b] + ell[b];
          }
          next[a] += log_sum_exp(terms);
        }
      }
      double const m = *std::max_element(next.begin(), next.end());
      if (m == neg_inf) {
        throw Error(ErrorCode::EmptyShift,
                    "no admissible pattern at depth " + std::to_string(n));
      }
      for (auto& x : next) {
        x -= m;
      }
      ell = std::move(next);
      t   = dd * t + m;
      size = dd * size + 1.0;
      weight /= dd;
      sum += m * weight;
      tail /= dd;
      record(n, m);
      double const h = est.trace.back().h;
      bool const done = detail::settled(h, prev, log_q / size / unit, opts);
      prev            = h;
      if (done) {
        est.converged = true;
        break;
      }
    }
    est.value           = est.trace.back().h;
    est.per_generator   = {est.value};
    est.iterations_used = est.trace.back().n;
    est.series          = std::move(series);
    return est;
  }

  inline EntropyEstimate fulltree_entropy(MarkovSystem const&   sys,
                                          EntropyOptions const& opts = {}) {
    return fulltree_entropy(sys.transitions(), opts);
  }

}  // namespace tsent

#endif  // TSENT_ENTROPY_ENGINE_HPP_
