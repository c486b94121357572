#include <chrono>
#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "tsent/entropy_engine.hpp"
#include "tsent/mixing_analysis.hpp"

using namespace tsent;
using oracle::Rows;

namespace {

  Rows const golden = {{1, 1}, {1, 0}};
  Rows const flip   = {{0, 1}, {1, 1}};
  Rows const X1     = {{0, 1, 0}, {1, 0, 1}, {0, 1, 0}};
  Rows const X2     = {{0, 1, 1}, {1, 0, 0}, {0, 1, 1}};

  Rows transpose(Rows const& A) {
    return BitMatrix::from_rows(A).transpose().to_rows();
  }

  MarkovSystem free_group(Rows const& A1, Rows const& A2) {
    return oracle::system(oracle::free_group2(),
                          {A1, A2, transpose(A1), transpose(A2)});
  }

  EntropyOptions base10() {
    EntropyOptions o;
    o.base = LogBase::Ten;
    return o;
  }

  struct TableRow {
    MarkovSystem sys;
    double       value;
    std::size_t  max_iterations;
  };

  std::vector<TableRow> table_rows() {
    return {
        {free_group(flip, golden), 0.1261881372008, 100},
        {free_group(golden, golden), 0.2332621211030, 100},
        {free_group(X1, X2), 0.1681464340595, 100},
        {oracle::system(golden, {golden, golden}), 0.2178219813166, 120},
        {oracle::system(golden, {flip, flip}), 0.2178219813166, 120},
        {oracle::system(golden, {flip, golden}), 0.1267559612313, 120},
        {oracle::system(golden, {golden, flip}), 0.1267559612313, 120},
    };
  }

  double log_max(std::vector<Natural> const& v) {
    Natural m = 0;
    for (auto const& x : v) {
      m = x > m ? x : m;
    }
    return log_natural(m);
  }

  double log_sum(std::vector<Natural> const& v) {
    Natural s = 0;
    for (auto const& x : v) {
      s += x;
    }
    return log_natural(s);
  }

  void expect_close(double actual, double expected, double rel) {
    EXPECT_NEAR(actual, expected, rel * std::max(1.0, std::abs(expected)));
  }

  std::vector<Rows> primitive_relations() {
    return {golden, oracle::ones(2), oracle::free_group2(), oracle::bethe3(),
            oracle::ones(3), {{0, 1, 0}, {0, 1, 1}, {1, 0, 0}}};
  }

}  // namespace

TEST(StemEntropy, TableValues) {
  for (auto const& row : table_rows()) {
    auto const start = std::chrono::steady_clock::now();
    auto const est   = stem_entropy(row.sys, base10());
    EXPECT_LT(std::chrono::steady_clock::now() - start, std::chrono::seconds(1));
    EXPECT_TRUE(est.converged);
    EXPECT_LE(est.iterations_used, row.max_iterations);
    EXPECT_NEAR(est.value, row.value, 1e-9);
    for (double h : est.per_generator) {
      EXPECT_NEAR(h, row.value, 1e-9);
    }
  }
}

TEST(TopologicalEntropy, TableValues) {
  for (auto const& row : table_rows()) {
    auto const est = topological_entropy_cayley(row.sys, base10());
    EXPECT_TRUE(est.converged);
    EXPECT_LE(est.iterations_used, row.max_iterations);
    EXPECT_NEAR(est.value, row.value, 1e-9);
  }
}

TEST(LogCountState, MatchesExactCounts) {
  std::mt19937 rng(12);
  for (int trial = 0; trial < 60; ++trial) {
    std::size_t const k = 1 + trial % 3;
    std::size_t const q = 1 + trial % 3;
    Rows const        K = oracle::random_relation(rng, k);
    std::vector<Rows> A;
    while (A.size() < k) {
      Rows a = oracle::random_binary(rng, q, 0.6);
      if (oracle::essential(a)) {
        A.push_back(a);
      }
    }
    auto const    sys   = oracle::system(K, A);
    auto const    exact = exact_ball_counts(sys, 10);
    LogCountState state(sys);
    for (std::size_t n = 0; n <= 10; ++n) {
      if (n > 0) {
        auto const ball = state.log_ball_counts_next();
        for (std::size_t a = 0; a < q; ++a) {
          expect_close(ball[a], log_natural(exact.ball[n][a]), 1e-10);
        }
        state.step();
      }
      for (std::size_t j = 0; j < k; ++j) {
        expect_close(state.log_max(j), log_max(exact.stem[n][j]), 1e-10);
        expect_close(state.log_total(j), log_sum(exact.stem[n][j]), 1e-10);
        EXPECT_DOUBLE_EQ(
            state.semiball_size(j),
            semiball_size(sys.relation(), j, n).convert_to<double>());
      }
    }
  }
}

TEST(StemEntropy, BaseInvariance) {
  for (auto const& row : table_rows()) {
    EntropyOptions e;
    EntropyOptions two;
    two.base     = LogBase::Two;
    auto const a = stem_entropy(row.sys, e);
    auto const b = stem_entropy(row.sys, two);
    EXPECT_NEAR(b.value * std::log(2.0), a.value, 1e-12);
    EXPECT_NEAR(a.in_base(LogBase::Ten).value, stem_entropy(row.sys, base10()).value,
                1e-12);
    auto const t = topological_entropy_cayley(row.sys, two);
    EXPECT_NEAR(t.value * std::log(2.0),
                topological_entropy_cayley(row.sys, e).value, 1e-12);
  }
}

TEST(StemEntropy, GeneratorsAgreeForPrimitiveK) {
  std::mt19937 rng(21);
  for (auto const& K : primitive_relations()) {
    for (int trial = 0; trial < 10; ++trial) {
      std::size_t const q = 2 + trial % 3;
      std::vector<Rows> A;
      while (A.size() < K.size()) {
        Rows a = oracle::random_binary(rng, q, 0.6);
        if (oracle::essential(a)) {
          A.push_back(a);
        }
      }
      auto const est = stem_entropy(oracle::system(K, A));
      EXPECT_TRUE(est.converged);
      EXPECT_LT(est.max_spread(), 1e-8);
    }
  }
}

TEST(StemEntropy, PeriodTwoRelationWithHomPrimitiveA) {
  Rows const K = {{0, 1}, {1, 0}};
  for (auto const& A : {golden, flip, oracle::ones(2), Rows{{1, 1, 0}, {0, 1, 1}, {1, 0, 1}}}) {
    auto const est = stem_entropy(oracle::hom(K, A));
    EXPECT_LT(est.max_spread(), 1e-8);
    for (auto const& row : est.trace) {
      EXPECT_LT(row.spread, 1e-8);
    }
  }
}

TEST(StemEntropy, EnvelopeBoundsValueFromAbove) {
  std::mt19937 rng(4);
  std::vector<MarkovSystem> systems;
  for (auto const& row : table_rows()) {
    systems.push_back(row.sys);
  }
  for (auto const& K : primitive_relations()) {
    std::size_t const q = 2 + K.size() % 2;
    std::vector<Rows> A;
    while (A.size() < K.size()) {
      Rows a = oracle::random_binary(rng, q, 0.6);
      if (oracle::essential(a)) {
        A.push_back(a);
      }
    }
    systems.push_back(oracle::system(K, A));
  }
  for (auto const& sys : systems) {
    auto const est = stem_entropy(sys);
    ASSERT_TRUE(est.converged);
    for (double e : est.upper_envelope) {
      EXPECT_LE(est.value, e + 1e-9);
    }
    EXPECT_NEAR(est.upper_envelope.back(), est.value, 1e-6);
  }
}

TEST(StemUpperEnvelope, GoldenMeanAndFullShift) {
  auto const fib = stem_upper_envelope(oracle::hom(golden, golden), 80, LogBase::Ten);
  for (double e : fib) {
    EXPECT_GE(e, 0.2178219813166 - 1e-9);
  }
  EXPECT_DOUBLE_EQ(fib.front(), std::log10(2.0));

  for (std::size_t q = 1; q <= 4; ++q) {
    auto const env = stem_upper_envelope(
        oracle::hom(oracle::free_group2(), oracle::ones(q)), 20);
    for (double e : env) {
      EXPECT_NEAR(e, std::log(static_cast<double>(q)), 1e-12);
    }
  }
}

TEST(Entropy, FullShiftLaw) {
  for (auto const& K : primitive_relations()) {
    for (std::size_t q = 1; q <= 4; ++q) {
      for (LogBase base : {LogBase::E, LogBase::Two, LogBase::Ten}) {
        EntropyOptions o;
        o.base            = base;
        auto const   sys  = oracle::hom(K, oracle::ones(q));
        double const want = std::log(static_cast<double>(q)) / nats_per_unit(base);
        auto const   s    = stem_entropy(sys, o);
        auto const   t    = topological_entropy_cayley(sys, o);
        EXPECT_TRUE(s.converged && t.converged);
        EXPECT_NEAR(s.value, want, 1e-12);
        EXPECT_NEAR(t.value, want, 1e-12);
        EXPECT_NEAR(fulltree_entropy(std::vector<BitMatrix>(
                                         K.size(), BitMatrix::from_rows(oracle::ones(q))),
                                     o)
                        .value,
                    want, 1e-12);
        for (auto const& row : t.trace) {
          EXPECT_NEAR(row.envelope, want, 1e-12);
        }
      }
    }
  }
}

TEST(TopologicalEntropy, AgreesWithStemUnderCertificates) {
  std::mt19937 rng(8);
  int          checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t const k = 2 + trial % 3;
    std::size_t const q = 2 + trial % 2;
    Rows const        K = oracle::random_irreducible(rng, k);
    if (spectral_radius(validate_relation(K), 1e-12) < 1.0 + 1e-9) {
      continue;
    }
    std::vector<Rows> A;
    while (A.size() < k) {
      Rows a = oracle::random_binary(rng, q, 0.6);
      if (oracle::essential(a)) {
        A.push_back(a);
      }
    }
    if (trial % 3 == 0) {
      A.assign(k, A.front());
    }
    auto const sys   = oracle::system(K, A);
    bool       claim = false;
    for (auto const& c : existence_certificate(sys)) {
      claim = claim || claims_top_equals_stem(c.kind);
    }
    if (!claim) {
      continue;
    }
    auto const s = stem_entropy(sys);
    auto const t = topological_entropy_cayley(sys);
    ASSERT_TRUE(s.converged && t.converged);
    EXPECT_LT(std::abs(s.value - t.value), 1e-8);
    ++checked;
  }
  EXPECT_GT(checked, 50);
}

TEST(TopologicalEntropy, SpuriousEarlyAgreementDoesNotStopTheRun) {
  // h_1 = log 2 / 3 and h_2 = log 4 / 6 coincide for this system.
  auto const sys = oracle::system(golden, {golden, {{0, 1}, {1, 0}}});
  auto const t   = topological_entropy_cayley(sys);
  ASSERT_GT(t.trace.size(), 2U);
  EXPECT_DOUBLE_EQ(t.trace[1].h, t.trace[2].h);
  EXPECT_TRUE(t.converged);
  EXPECT_GT(t.iterations_used, 10U);
  EXPECT_NEAR(t.value, stem_entropy(sys).value, 1e-8);
}

TEST(StemEntropy, ZeroEntropyWaitsForTheEnvelope) {
  auto const est = stem_entropy(oracle::system(golden, {{{0, 1}, {1, 0}}, {{1, 0}, {0, 1}}}));
  EXPECT_TRUE(est.converged);
  EXPECT_EQ(est.value, 0.0);
  EXPECT_GT(est.iterations_used, 1U);
  EXPECT_LT(est.upper_envelope.back(), 1e-13);
}

TEST(FulltreeEntropy, MatchesStemOnFullRelation) {
  for (auto const& A : {golden, flip, X1, X2, Rows{{1, 1, 0}, {1, 0, 1}, {0, 1, 1}}}) {
    auto const sys = oracle::hom(oracle::ones(2), A);
    auto const f   = fulltree_entropy(sys);
    auto const s   = stem_entropy(sys);
    ASSERT_TRUE(f.converged);
    EXPECT_NEAR(f.value, s.value, 1e-10);
  }
  auto const d3 = oracle::hom(oracle::ones(3), golden);
  EXPECT_NEAR(fulltree_entropy(d3).value, stem_entropy(d3).value, 1e-10);
}

TEST(FulltreeEntropy, SandwichedByExactCounts) {
  for (auto const& A : {golden, flip, X1}) {
    auto const   sys   = oracle::hom(oracle::ones(2), A);
    double const h     = fulltree_entropy(sys).value;
    auto const   exact = exact_ball_counts(sys, 12);
    for (std::size_t n = 1; n <= 12; ++n) {
      double const size = semiball_size(sys.relation(), 0, n).convert_to<double>();
      EXPECT_LE(log_max(exact.stem[n][0]) / size, h + 1e-12);
      EXPECT_GE(log_sum(exact.stem[n][0]) / size, h - 1e-12);
    }
  }
}

TEST(FulltreeEntropy, TrivialCases) {
  EXPECT_NEAR(fulltree_entropy(std::vector<BitMatrix>(
                                   2, BitMatrix::from_rows(oracle::ones(2))))
                  .value,
              std::log(2.0), 1e-12);
  auto const one = fulltree_entropy(
      std::vector<BitMatrix>(3, BitMatrix::from_rows({{1}})));
  EXPECT_EQ(one.value, 0.0);
  EXPECT_TRUE(one.converged);
}

TEST(FulltreeEntropy, SeriesBracket) {
  auto const est = fulltree_entropy(oracle::hom(oracle::ones(2), golden));
  ASSERT_TRUE(est.converged);
  ASSERT_TRUE(est.series);
  EXPECT_TRUE(est.series->valid);
  for (std::size_t N = 0; N < est.series->partial_sums.size(); ++N) {
    EXPECT_LE(est.series->lower(N), est.value + 1e-15);
    EXPECT_GE(est.series->upper(N), est.value - 1e-15);
    if (N > 0) {
      EXPECT_GE(est.series->lower(N), est.series->lower(N - 1));
    }
  }
  EXPECT_NEAR(est.series->tails[30], std::log(2.0) / std::pow(2.0, 30), 1e-24);
}

TEST(FulltreeEntropy, SeriesNotClaimedForNonHom) {
  auto const est = fulltree_entropy(oracle::system(oracle::ones(2), {golden, flip}));
  ASSERT_TRUE(est.series);
  EXPECT_FALSE(est.series->valid);
}

TEST(Entropy, EmptyShift) {
  Rows const zero = {{0, 0}, {0, 0}};
  Rows const nil  = {{0, 1}, {0, 0}};
  for (auto const& A : {zero, nil}) {
    auto const sys = oracle::hom(golden, A);
    for (auto run : {+[](MarkovSystem const& s) { (void)stem_entropy(s); },
                     +[](MarkovSystem const& s) { (void)topological_entropy_cayley(s); },
                     +[](MarkovSystem const& s) { (void)fulltree_entropy(s); }}) {
      try {
        run(sys);
        ADD_FAILURE() << "expected EmptyShift";
      } catch (Error const& e) {
        EXPECT_EQ(e.code(), ErrorCode::EmptyShift);
      }
    }
  }
}

TEST(Entropy, IterationBudget) {
  EntropyOptions o;
  o.max_iters    = 3;
  auto const sys = oracle::hom(golden, golden);
  auto const s   = stem_entropy(sys, o);
  EXPECT_FALSE(s.converged);
  EXPECT_EQ(s.iterations_used, 3U);
  EXPECT_EQ(s.trace.size(), 4U);
  EXPECT_FALSE(topological_entropy_cayley(sys, o).converged);

  o.max_iters = 5000;
  EXPECT_LE(stem_entropy(oracle::hom({{0, 1}, {1, 0}}, golden), o).iterations_used,
            max_iteration_cap);

  o.max_iters = 0;
  EXPECT_THROW((void)stem_entropy(sys, o), Error);
}

TEST(Entropy, TraceColumns) {
  auto const est = stem_entropy(oracle::system(golden, {flip, golden}));
  for (std::size_t i = 0; i < est.trace.size(); ++i) {
    auto const& row = est.trace[i];
    EXPECT_EQ(row.n, i);
    EXPECT_EQ(row.per_generator.size(), 2U);
    EXPECT_EQ(row.log_r.size(), 2U);
    EXPECT_GE(row.envelope, row.h);
  }
}
