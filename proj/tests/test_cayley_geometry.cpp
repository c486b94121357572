#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "tsent/cayley_geometry.hpp"

using namespace tsent;
using oracle::Rows;

namespace {

  std::vector<Natural> nat(std::vector<int> const& xs) {
    return {xs.begin(), xs.end()};
  }

  ErrorCode code_of(Rows const& raw) {
    try {
      (void)validate_relation(raw);
    } catch (Error const& e) {
      return e.code();
    }
    ADD_FAILURE() << "no error";
    return ErrorCode::InvalidArgument;
  }

}  // namespace

TEST(ValidateRelation, AcceptsGoldenMeanAndSingleGenerator) {
  EXPECT_EQ(validate_relation(oracle::fibonacci()).k(), 2U);
  EXPECT_EQ(validate_relation({{1}}).k(), 1U);
}

TEST(ValidateRelation, RejectsMalformedInput) {
  EXPECT_EQ(code_of({{0, 0}, {1, 1}}), ErrorCode::DeadRow);
  EXPECT_EQ(code_of({{1, 1}}), ErrorCode::NonSquare);
  EXPECT_EQ(code_of({{1, 2}, {1, 1}}), ErrorCode::NonBinaryEntry);
  EXPECT_EQ(code_of({}), ErrorCode::NonSquare);
}

TEST(LevelCounts, GoldenMean) {
  auto const K = validate_relation(oracle::fibonacci());
  EXPECT_EQ(level_counts(K, 0, 3), nat({1, 2, 3, 5}));
  EXPECT_EQ(level_counts(K, 1, 3), nat({1, 1, 2, 3}));
}

TEST(LevelCounts, FreeSemigroup) {
  EXPECT_EQ(level_counts(validate_relation(oracle::ones(2)), 0, 2),
            nat({1, 2, 4}));
}

TEST(LevelCounts, MatchesSchoolbookPowers) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    Rows const K = oracle::random_relation(rng, 1 + trial % 4);
    auto const R = validate_relation(K);
    for (std::size_t i = 0; i < K.size(); ++i) {
      auto const L = level_counts(R, i, 8);
      for (std::size_t l = 0; l <= 8; ++l) {
        auto const P   = oracle::power(K, l);
        Natural    sum = 0;
        for (auto const& x : P[i]) {
          sum += x;
        }
        EXPECT_EQ(L[l], sum);
      }
    }
  }
}

TEST(LevelCounts, IndexOutOfRange) {
  auto const K = validate_relation(oracle::fibonacci());
  try {
    (void)level_counts(K, 2, 1);
    FAIL();
  } catch (Error const& e) {
    EXPECT_EQ(e.code(), ErrorCode::IndexOutOfRange);
  }
  EXPECT_THROW((void)semiball_size(K, 5, 0), Error);
}

TEST(SemiballSize, Examples) {
  EXPECT_EQ(semiball_size(validate_relation(oracle::fibonacci()), 0, 3), 11);
  EXPECT_EQ(semiball_size(validate_relation(oracle::ones(2)), 0, 2), 7);
  for (auto const& K : {oracle::fibonacci(), oracle::free_group2(),
                        oracle::bethe3(), Rows{{1}}}) {
    for (std::size_t i = 0; i < K.size(); ++i) {
      EXPECT_EQ(semiball_size(validate_relation(K), i, 0), 1);
    }
  }
}

TEST(BallSize, FreeGroupOfRankTwo) {
  auto const K = validate_relation(oracle::free_group2());
  EXPECT_EQ(ball_size(K, 0), 1);
  EXPECT_EQ(ball_size(K, 1), 5);
  EXPECT_EQ(ball_size(K, 2), 17);
  EXPECT_EQ(oracle::ball_size_by_words(oracle::free_group2(), 2), 17U);
}

TEST(BallSize, MatchesWordEnumeration) {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 25; ++trial) {
    Rows const K = oracle::random_relation(rng, 1 + trial % 4);
    auto const R = validate_relation(K);
    for (std::size_t n = 0; n <= 6; ++n) {
      EXPECT_EQ(ball_size(R, n), oracle::ball_size_by_words(K, n));
      for (std::size_t i = 0; i < K.size(); ++i) {
        EXPECT_EQ(semiball_size(R, i, n),
                  oracle::semiball_size_by_words(K, i, n));
      }
    }
  }
}

TEST(BallSize, ConsistentWithSemiballs) {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    Rows const   K = oracle::random_relation(rng, 1 + trial % 5);
    BallGeometry g(validate_relation(K));
    for (std::size_t n = 1; n <= 20; ++n) {
      Natural s = 1;
      for (std::size_t i = 0; i < K.size(); ++i) {
        s += g.semiball_size(i, n - 1);
      }
      EXPECT_EQ(g.ball_size(n), s);
    }
  }
}

// |semiball(i, n + q(m+1))| = |semiball(i, n)|
//   + sum_l sum_{j<q} K^{n + j(m+1) + 1}(i, l) |semiball(l, m)|
TEST(SemiballDecomposition, ExactIdentityOnRandomIrreducibleK) {
  std::mt19937 rng(2024);
  int          checked = 0;
  for (int trial = 0; trial < 12; ++trial) {
    Rows const   K = oracle::random_irreducible(rng, 1 + trial % 4);
    BallGeometry g(validate_relation(K));
    for (std::size_t i = 0; i < K.size(); ++i) {
      for (std::size_t n = 0; n <= 4; ++n) {
        for (std::size_t m = 0; m <= 4; ++m) {
          for (std::size_t q = 1; q <= 3; ++q) {
            Natural rhs = g.semiball_size(i, n);
            for (std::size_t l = 0; l < K.size(); ++l) {
              for (std::size_t j = 0; j < q; ++j) {
                rhs += g.power(n + j * (m + 1) + 1)(i, l)
                       * g.semiball_size(l, m);
              }
            }
            EXPECT_EQ(g.semiball_size(i, n + q * (m + 1)), rhs);
            ++checked;
          }
        }
      }
    }
  }
  EXPECT_GT(checked, 200);
}

TEST(Primitivity, Examples) {
  EXPECT_TRUE(is_primitive(validate_relation(oracle::fibonacci())));
  EXPECT_FALSE(is_primitive(validate_relation({{0, 1}, {1, 0}})));
  EXPECT_TRUE(is_primitive(validate_relation(oracle::free_group2())));
  auto const P = oracle::power(oracle::free_group2(), 2);
  for (auto const& row : P) {
    for (auto const& x : row) {
      EXPECT_GT(x, 0);
    }
  }
}

TEST(Irreducibility, Examples) {
  EXPECT_TRUE(is_irreducible(validate_relation({{0, 1}, {1, 0}})));
  EXPECT_FALSE(is_irreducible(validate_relation({{1, 1}, {0, 1}})));
  EXPECT_TRUE(is_irreducible(validate_relation(oracle::free_group2())));
}

TEST(Primitivity, WielandtAgreesWithPeriodExhaustively) {
  for (std::size_t k : {2U, 3U}) {
    for (auto const& K : oracle::all_binary(k)) {
      bool dead = false;
      for (auto const& row : K) {
        dead = dead || std::accumulate(row.begin(), row.end(), 0) == 0;
      }
      if (dead) {
        continue;
      }
      auto const R = validate_relation(K);
      bool const expected = R.is_irreducible() && R.period() == 1;
      EXPECT_EQ(R.is_primitive(), expected);
      EXPECT_EQ(R.is_primitive(), oracle::primitive(K));
      EXPECT_EQ(R.is_irreducible(), oracle::irreducible(K));
      if (R.is_irreducible()) {
        EXPECT_EQ(R.period(), oracle::period(K));
      }
      if (auto e = R.primitivity_exponent()) {
        EXPECT_LE(*e, (k - 1) * (k - 1) + 1);
      }
    }
  }
}

TEST(Period, CyclicClasses) {
  auto c = period_and_classes(validate_relation({{0, 1}, {1, 0}}));
  EXPECT_EQ(c.period, 2U);
  EXPECT_EQ(c.classes,
            (std::vector<std::vector<std::size_t>>{{0}, {1}}));

  c = period_and_classes(validate_relation(oracle::fibonacci()));
  EXPECT_EQ(c.period, 1U);
  EXPECT_EQ(c.classes, (std::vector<std::vector<std::size_t>>{{0, 1}}));

  c = period_and_classes(validate_relation({{0, 1, 0}, {0, 0, 1}, {1, 0, 0}}));
  EXPECT_EQ(c.period, 3U);
  EXPECT_EQ(c.classes,
            (std::vector<std::vector<std::size_t>>{{0}, {1}, {2}}));
}

TEST(Period, ClassesRealizeBlockForm) {
  std::mt19937 rng(8);
  for (int trial = 0; trial < 40; ++trial) {
    Rows const K = oracle::random_irreducible(rng, 2 + trial % 5);
    auto const c = period_and_classes(validate_relation(K));
    std::vector<std::size_t> cls(K.size());
    for (std::size_t p = 0; p < c.classes.size(); ++p) {
      for (std::size_t v : c.classes[p]) {
        cls[v] = p;
      }
    }
    for (std::size_t i = 0; i < K.size(); ++i) {
      for (std::size_t j = 0; j < K.size(); ++j) {
        if (K[i][j]) {
          EXPECT_EQ(cls[j], (cls[i] + 1) % c.period);
        }
      }
    }
  }
}

TEST(Period, RequiresIrreducible) {
  auto const K = validate_relation({{1, 1}, {0, 1}});
  try {
    (void)K.period();
    FAIL();
  } catch (Error const& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotIrreducible);
  }
  EXPECT_THROW((void)spectral_radius(K, 1e-10), Error);
}

TEST(SpectralRadius, Examples) {
  EXPECT_NEAR(spectral_radius(validate_relation(oracle::fibonacci()), 1e-10),
              (1.0 + std::sqrt(5.0)) / 2.0, 1e-10);
  EXPECT_NEAR(spectral_radius(validate_relation(oracle::ones(2)), 1e-12), 2.0,
              1e-12);
  EXPECT_NEAR(spectral_radius(validate_relation({{0, 1}, {1, 0}}), 1e-12), 1.0,
              1e-12);
  EXPECT_NEAR(spectral_radius(validate_relation(oracle::free_group2()), 1e-12),
              3.0, 1e-12);
}

TEST(SpectralRadius, RatioOfPowersConverges) {
  std::mt19937 rng(99);
  std::vector<Rows> cases = {oracle::fibonacci(), oracle::free_group2(),
                             oracle::bethe3()};
  while (cases.size() < 8) {
    Rows K = oracle::random_irreducible(rng, 3);
    if (oracle::primitive(K)) {
      cases.push_back(K);
    }
  }
  for (auto const& K : cases) {
    BallGeometry g(validate_relation(K));
    double const rho = spectral_radius(g.relation(), 1e-13);
    auto const   P   = g.power(200);
    auto const   Q   = g.power(201);
    for (std::size_t i = 0; i < K.size(); ++i) {
      for (std::size_t j = 0; j < K.size(); ++j) {
        double const ratio
            = std::exp(log_natural(Q(i, j)) - log_natural(P(i, j)));
        EXPECT_NEAR(ratio, rho, 1e-6);
      }
    }
  }
}

TEST(LevelCounts, GrowthComparableToSpectralRadius) {
  std::mt19937 rng(123);
  int          tested = 0;
  while (tested < 6) {
    Rows const   K = oracle::random_irreducible(rng, 2 + tested % 3);
    BallGeometry g(validate_relation(K));
    double const rho = spectral_radius(g.relation(), 1e-13);
    if (rho < 1.0 + 1e-6) {
      continue;
    }
    ++tested;
    for (std::size_t i = 0; i < K.size(); ++i) {
      auto const L  = g.level_counts(i, 200);
      double     lo = INFINITY;
      double     hi = 0.0;
      for (std::size_t n = 50; n <= 200; ++n) {
        double const r
            = std::exp(log_natural(L[n]) - static_cast<double>(n) * std::log(rho));
        lo = std::min(lo, r);
        hi = std::max(hi, r);
      }
      EXPECT_GT(lo, 0.0);
      EXPECT_LT(hi / lo, 1e3);
    }
  }
}
