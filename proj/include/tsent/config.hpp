// tsent - entropy of Markov tree shifts on Cayley trees
//
// System configuration files. A config is a JSON document:
//
//   {
//     "generators": ["s1", "s2"],            optional, default s1..sk
//     "K": [[1, 1], [1, 0]],                 k x k, rows of 0/1
//     "alphabet": ["0", "1"],
//     "A": [ [[1, 1], [1, 0]], [[0, 1], [1, 1]] ],   one matrix per generator
//     "options": {
//       "log_base": "10",                    "e" | "2" | "10"
//       "max_iters": 300,
//       "eps": 1e-13,
//       "auto_inverse_transpose": false
//     }
//   }
//
// With auto_inverse_transpose the file lists r matrices (and optionally r
// generator names); they are extended to 2r by appending transposes for the
// inverse generators, and K becomes the F_r relation. An explicit K is then
// optional but must equal that relation.

#ifndef TSENT_CONFIG_HPP_
#define TSENT_CONFIG_HPP_

#include <cstddef>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "cayley_geometry.hpp"
#include "error.hpp"
#include "log_domain.hpp"
#include "matrix.hpp"
#include "tree_shift.hpp"

namespace tsent {

  struct ConfigOptions {
    LogBase     log_base               = LogBase::Ten;
    std::size_t max_iters              = 300;
    double      eps                    = 1e-13;
    bool        auto_inverse_transpose = false;

    // Which options the file set explicitly (flags overriding these warn).
    bool has_log_base  = false;
    bool has_max_iters = false;
    bool has_eps       = false;

    bool operator==(ConfigOptions const&) const = default;
  };

  struct SystemConfig {
    std::vector<std::string>                   generators;
    std::optional<BitMatrix::Rows>             K;
    std::vector<std::string>                   alphabet;
    std::vector<BitMatrix::Rows>               A;
    ConfigOptions                              options;

    bool operator==(SystemConfig const&) const = default;
  };

  struct LoadedSystem {
    SystemConfig             config;
    MarkovSystem             system;
    std::vector<std::string> generator_names;
  };

  namespace detail {
    using nlohmann::json;

    inline std::size_t line_of(std::string_view text, std::size_t byte) {
      std::size_t line = 1;
      for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
          ++line;
        }
      }
      return line;
    }

    [[noreturn]] inline void bad_field(std::string const& path,
                                       std::string const& what) {
      throw Error(ErrorCode::ParseError, "field '" + path + "': " + what);
    }

    inline BitMatrix::Rows parse_matrix(json const& j, std::string const& path) {
      if (!j.is_array()) {
        bad_field(path, "expected an array of rows");
      }
      BitMatrix::Rows rows;
      for (std::size_t i = 0; i < j.size(); ++i) {
        std::string const rp = path + "[" + std::to_string(i) + "]";
        if (!j[i].is_array()) {
          bad_field(rp, "expected an array of 0/1 entries");
        }
        std::vector<int> row;
        for (std::size_t c = 0; c < j[i].size(); ++c) {
          auto const& e = j[i][c];
          if (!e.is_number_integer()) {
            bad_field(rp + "[" + std::to_string(c) + "]", "expected an integer");
          }
          row.push_back(e.get<int>());
        }
        rows.push_back(std::move(row));
      }
      return rows;
    }

    inline std::vector<std::string> parse_names(json const&        j,
                                                std::string const& path) {
      if (!j.is_array()) {
        bad_field(path, "expected an array of strings");
      }
      std::vector<std::string> out;
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_string()) {
          bad_field(path + "[" + std::to_string(i) + "]", "expected a string");
        }
        out.push_back(j[i].get<std::string>());
      }
      return out;
    }

    [[noreturn]] inline void invalid(std::string const& path, Error const& e) {
      throw Error(ErrorCode::ValidationError, e.code(),
                  path + ": " + e.what());
    }

    [[noreturn]] inline void invalid(std::string const& path,
                                     ErrorCode          cause,
                                     std::string const& what) {
      throw Error(ErrorCode::ValidationError, cause,
                  path + ": " + std::string(to_string(cause)) + ": " + what);
    }

    inline void check_unique(std::vector<std::string> const& names,
                             std::string const&              path) {
      std::set<std::string> seen;
      for (auto const& n : names) {
        if (!seen.insert(n).second) {
          invalid(path, ErrorCode::InvalidArgument,
                  "duplicate name '" + n + "'");
        }
      }
    }
  }  // namespace detail

  //! Parses a config document. Throws ParseError with a line number for
  //! malformed JSON and a field path for schema violations; value-level
  //! checks happen in build_system.
  inline SystemConfig parse_config(std::string_view text) {
    using nlohmann::json;
    json doc;
    try {
      doc = json::parse(text);
    } catch (json::parse_error const& e) {
      throw Error(ErrorCode::ParseError,
                  "line " + std::to_string(detail::line_of(text, e.byte))
                      + ": " + e.what());
    }
    if (!doc.is_object()) {
      detail::bad_field("<root>", "expected an object");
    }
    static std::set<std::string> const known
        = {"generators", "K", "alphabet", "A", "options"};
    for (auto const& [key, value] : doc.items()) {
      if (!known.contains(key)) {
        detail::bad_field(key, "unknown field");
      }
    }
    SystemConfig cfg;
    if (doc.contains("generators")) {
      cfg.generators = detail::parse_names(doc["generators"], "generators");
    }
    if (doc.contains("K")) {
      cfg.K = detail::parse_matrix(doc["K"], "K");
    }
    if (!doc.contains("alphabet")) {
      detail::bad_field("alphabet", "missing");
    }
    cfg.alphabet = detail::parse_names(doc["alphabet"], "alphabet");
    if (!doc.contains("A") || !doc["A"].is_array()) {
      detail::bad_field("A", "expected an array of matrices");
    }
    for (std::size_t i = 0; i < doc["A"].size(); ++i) {
      cfg.A.push_back(
          detail::parse_matrix(doc["A"][i], "A[" + std::to_string(i) + "]"));
    }
    if (doc.contains("options")) {
      auto const& o = doc["options"];
      if (!o.is_object()) {
        detail::bad_field("options", "expected an object");
      }
      for (auto const& [key, value] : o.items()) {
        std::string const path = "options." + key;
        if (key == "log_base") {
          if (!value.is_string()) {
            detail::bad_field(path, "expected \"e\", \"2\" or \"10\"");
          }
          try {
            cfg.options.log_base = parse_log_base(value.get<std::string>());
          } catch (Error const& e) {
            detail::bad_field(path, e.what());
          }
          cfg.options.has_log_base = true;
        } else if (key == "max_iters") {
          if (!value.is_number_integer() || value.get<long long>() <= 0) {
            detail::bad_field(path, "expected a positive integer");
          }
          cfg.options.max_iters     = value.get<std::size_t>();
          cfg.options.has_max_iters = true;
        } else if (key == "eps") {
          if (!value.is_number() || !(value.get<double>() > 0)) {
            detail::bad_field(path, "expected a positive number");
          }
          cfg.options.eps     = value.get<double>();
          cfg.options.has_eps = true;
        } else if (key == "auto_inverse_transpose") {
          if (!value.is_boolean()) {
            detail::bad_field(path, "expected true or false");
          }
          cfg.options.auto_inverse_transpose = value.get<bool>();
        } else {
          detail::bad_field(path, "unknown option");
        }
      }
    }
    return cfg;
  }

  //! Validates a parsed config into a Markov system. Failures surface as
  //! ValidationError whose cause() is the underlying code (DeadRow, ...).
  inline LoadedSystem build_system(SystemConfig const& cfg) {
    std::vector<BitMatrix::Rows> A     = cfg.A;
    std::vector<std::string>     names = cfg.generators;
    std::optional<RelationMatrix> K;

    if (cfg.options.auto_inverse_transpose) {
      std::size_t const r = A.size();
      if (r == 0) {
        detail::invalid("A", ErrorCode::DimensionMismatch,
                        "auto_inverse_transpose needs at least one matrix");
      }
      if (!names.empty() && names.size() != r) {
        detail::invalid("generators", ErrorCode::DimensionMismatch,
                        "expected " + std::to_string(r) + " names, got "
                            + std::to_string(names.size()));
      }
      if (names.empty()) {
        for (std::size_t i = 0; i < r; ++i) {
          names.push_back("s" + std::to_string(i + 1));
        }
      }
      for (std::size_t i = 0; i < r; ++i) {
        names.push_back(names[i] + "^-1");
        BitMatrix m;
        try {
          m = BitMatrix::from_rows(A[i]);
        } catch (Error const& e) {
          detail::invalid("A[" + std::to_string(i) + "]", e);
        }
        A.push_back(m.transpose().to_rows());
      }
      K = free_group_relation(r);
      if (cfg.K && *cfg.K != K->matrix().to_rows()) {
        detail::invalid("K", ErrorCode::InvalidArgument,
                        "explicit K differs from the F_"
                            + std::to_string(r) + " relation");
      }
    } else {
      if (!cfg.K) {
        detail::invalid("K", ErrorCode::DimensionMismatch, "missing");
      }
      try {
        K = validate_relation(*cfg.K);
      } catch (Error const& e) {
        detail::invalid("K", e);
      }
      if (names.empty()) {
        for (std::size_t i = 0; i < K->k(); ++i) {
          names.push_back("s" + std::to_string(i + 1));
        }
      } else if (names.size() != K->k()) {
        detail::invalid("generators", ErrorCode::DimensionMismatch,
                        "expected " + std::to_string(K->k()) + " names, got "
                            + std::to_string(names.size()));
      }
    }
    detail::check_unique(names, "generators");
    detail::check_unique(cfg.alphabet, "alphabet");
    if (A.size() != K->k()) {
      detail::invalid("A", ErrorCode::DimensionMismatch,
                      "expected " + std::to_string(K->k())
                          + " matrices, got " + std::to_string(A.size()));
    }
    try {
      auto sys = validate_system(*K, cfg.alphabet, A);
      return LoadedSystem{cfg, std::move(sys), std::move(names)};
    } catch (Error const& e) {
      detail::invalid("A", e);
    }
  }

  inline SystemConfig read_config_file(std::string const& path) {
    std::ifstream in(path);
    if (!in) {
      throw Error(ErrorCode::ParseError, "cannot open '" + path + "'");
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
  }

  inline LoadedSystem load_config(std::string const& path) {
    return build_system(read_config_file(path));
  }

  //! Writes the config back as JSON; explicitly set options only.
  inline std::string serialize_config(SystemConfig const& cfg) {
    using nlohmann::ordered_json;
    ordered_json doc;
    if (!cfg.generators.empty()) {
      doc["generators"] = cfg.generators;
    }
    if (cfg.K) {
      doc["K"] = *cfg.K;
    }
    doc["alphabet"] = cfg.alphabet;
    doc["A"]        = cfg.A;
    ordered_json opts = ordered_json::object();
    if (cfg.options.has_log_base) {
      opts["log_base"] = std::string(to_string(cfg.options.log_base));
    }
    if (cfg.options.has_max_iters) {
      opts["max_iters"] = cfg.options.max_iters;
    }
    if (cfg.options.has_eps) {
      opts["eps"] = cfg.options.eps;
    }
    if (cfg.options.auto_inverse_transpose) {
      opts["auto_inverse_transpose"] = true;
    }
    if (!opts.empty()) {
      doc["options"] = opts;
    }
    return doc.dump(2) + "\n";
  }

}  // namespace tsent

#endif  // TSENT_CONFIG_HPP_
