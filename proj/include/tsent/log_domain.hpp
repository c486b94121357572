// tsent - entropy of Markov tree shifts on Cayley trees
//
// Log-domain helpers and logarithm bases.

#ifndef TSENT_LOG_DOMAIN_HPP_
#define TSENT_LOG_DOMAIN_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <string_view>

#include "error.hpp"

namespace tsent {

  inline constexpr double neg_inf = -std::numeric_limits<double>::infinity();

  //! log(sum_i exp(x_i)); -inf for an empty span or when every x_i is -inf.
  inline double log_sum_exp(std::span<double const> xs) {
    double m = neg_inf;
    for (double x : xs) {
      m = std::max(m, x);
    }
    if (m == neg_inf) {
      return neg_inf;
    }
    double s = 0.0;
    for (double x : xs) {
      s += std::exp(x - m);
    }
    return m + std::log(s);
  }

  enum class LogBase { E, Two, Ten };

  //! ln(b): a value in nats divided by this is the value in base b.
  constexpr double nats_per_unit(LogBase base) noexcept {
    switch (base) {
      case LogBase::E: return 1.0;
      case LogBase::Two: return 0.69314718055994530942;
      case LogBase::Ten: return 2.30258509299404568402;
    }
    return 1.0;
  }

  constexpr std::string_view to_string(LogBase base) noexcept {
    switch (base) {
      case LogBase::E: return "e";
      case LogBase::Two: return "2";
      case LogBase::Ten: return "10";
    }
    return "e";
  }

  inline LogBase parse_log_base(std::string_view s) {
    if (s == "e") {
      return LogBase::E;
    }
    if (s == "2") {
      return LogBase::Two;
    }
    if (s == "10") {
      return LogBase::Ten;
    }
    throw Error(ErrorCode::InvalidArgument,
                "log base must be one of e, 2, 10 (got '" + std::string(s)
                    + "')");
  }

}  // namespace tsent

#endif  // TSENT_LOG_DOMAIN_HPP_
