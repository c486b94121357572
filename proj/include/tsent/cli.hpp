// tsent - entropy of Markov tree shifts on Cayley trees
//
// Command dispatch and report rendering behind the tsent executable. run()
// is pure: it reads a loaded system and flags and returns the rendered
// report, warnings and exit code, so batch mode can call it concurrently.

#ifndef TSENT_CLI_HPP_
#define TSENT_CLI_HPP_

#include <algorithm>
#include <cstddef>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "cayley_geometry.hpp"
#include "config.hpp"
#include "entropy_engine.hpp"
#include "error.hpp"
#include "log_domain.hpp"
#include "mixing_analysis.hpp"
#include "tree_shift.hpp"

namespace tsent::cli {

  enum class Format { Text, Csv, Json };

  inline Format parse_format(std::string_view s) {
    if (s == "text") {
      return Format::Text;
    }
    if (s == "csv") {
      return Format::Csv;
    }
    if (s == "json") {
      return Format::Json;
    }
    throw Error(ErrorCode::InvalidArgument,
                "format must be text, csv or json (got '" + std::string(s)
                    + "')");
  }

  struct Flags {
    std::optional<std::size_t> iters;
    std::optional<double>      eps;
    std::optional<LogBase>     log_base;
    std::size_t                depth  = 3;
    Format                     format = Format::Text;
  };

  namespace exit_code {
    constexpr int ok             = 0;
    constexpr int invalid        = 1;
    constexpr int no_certificate = 2;
    constexpr int no_convergence = 3;
    constexpr int oracle_failed  = 4;
  }  // namespace exit_code

  struct Report {
    std::string              output;
    std::vector<std::string> warnings;
    int                      exit_code = exit_code::ok;
  };

  inline std::vector<std::string> const& commands() {
    static std::vector<std::string> const all
        = {"analyze", "stem", "top", "fulltree", "oracle", "certify"};
    return all;
  }

  //! Exit code for an error escaping run() or load_config().
  inline int exit_code_for(Error const&) {
    return exit_code::invalid;
  }

  namespace detail {
    using nlohmann::ordered_json;

    // 13 decimals, truncated rather than rounded (the usual table style).
    inline std::string fixed(double x) {
      char buf[512];
      std::snprintf(buf, sizeof buf, "%.20f", x);
      std::string s   = buf;
      auto const  dot = s.find('.');
      if (dot == std::string::npos) {
        return s;
      }
      s.resize(std::min(s.size(), dot + 14));
      if (s == "-0.0000000000000") {
        s.erase(0, 1);
      }
      return s;
    }

    inline std::string full(double x) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.17g", x);
      return buf;
    }

    inline std::string yes_no(bool b) {
      return b ? "true" : "false";
    }

    struct Resolved {
      EntropyOptions           opts;
      std::vector<std::string> warnings;
    };

    inline Resolved resolve(ConfigOptions const& cfg, Flags const& flags) {
      Resolved r;
      r.opts.max_iters = cfg.max_iters;
      r.opts.eps       = cfg.eps;
      r.opts.base      = cfg.log_base;
      if (flags.iters) {
        if (cfg.has_max_iters) {
          r.warnings.push_back("warning: --iters " + std::to_string(*flags.iters)
                               + " overrides options.max_iters "
                               + std::to_string(cfg.max_iters));
        }
        r.opts.max_iters = *flags.iters;
      }
      if (flags.eps) {
        if (cfg.has_eps) {
          r.warnings.push_back("warning: --eps " + full(*flags.eps)
                               + " overrides options.eps " + full(cfg.eps));
        }
        r.opts.eps = *flags.eps;
      }
      if (flags.log_base) {
        if (cfg.has_log_base) {
          r.warnings.push_back(
              "warning: --log-base " + std::string(to_string(*flags.log_base))
              + " overrides options.log_base "
              + std::string(to_string(cfg.log_base)));
        }
        r.opts.base = *flags.log_base;
      }
      return r;
    }

    // Ordered key/value list rendered as text, CSV or JSON.
    class Fields {
     public:
      void add(std::string key, std::string text, ordered_json value) {
        _rows.push_back({std::move(key), std::move(text), std::move(value)});
      }
      void add(std::string key, double x) {
        _rows.push_back({std::move(key), fixed(x), x});
      }
      void add(std::string key, std::string s) {
        ordered_json v = s;
        _rows.push_back({std::move(key), std::move(s), std::move(v)});
      }
      void add(std::string key, bool b) {
        _rows.push_back({std::move(key), yes_no(b), b});
      }
      void add(std::string key, std::size_t x) {
        _rows.push_back({std::move(key), std::to_string(x), x});
      }

      [[nodiscard]] std::string text() const {
        std::string out;
        for (auto const& r : _rows) {
          out += r.key + ": " + r.text + "\n";
        }
        return out;
      }

      [[nodiscard]] std::string csv() const {
        std::string out = "key,value\n";
        for (auto const& r : _rows) {
          std::string v = r.value.is_number_float()
                              ? full(r.value.get<double>())
                              : r.text;
          out += r.key + "," + quote(v) + "\n";
        }
        return out;
      }

      [[nodiscard]] ordered_json json() const {
        ordered_json out = ordered_json::object();
        for (auto const& r : _rows) {
          out[r.key] = r.value;
        }
        return out;
      }

     private:
      static std::string quote(std::string const& s) {
        if (s.find_first_of(",\"\n") == std::string::npos) {
          return s;
        }
        std::string out = "\"";
        for (char c : s) {
          if (c == '"') {
            out += '"';
          }
          out += c;
        }
        return out + "\"";
      }

      struct Row {
        std::string  key;
        std::string  text;
        ordered_json value;
      };
      std::vector<Row> _rows;
    };

    inline std::string join(std::vector<std::string> const& parts,
                            std::string const&              sep) {
      std::string out;
      for (std::size_t i = 0; i < parts.size(); ++i) {
        out += (i ? sep : "") + parts[i];
      }
      return out;
    }

    inline ordered_json trace_json(EntropyEstimate const& est) {
      ordered_json rows = ordered_json::array();
      for (auto const& row : est.trace) {
        rows.push_back({{"n", row.n},
                        {"h", row.h},
                        {"per_generator", row.per_generator},
                        {"spread", row.spread},
                        {"log_r", row.log_r},
                        {"envelope", row.envelope}});
      }
      return rows;
    }

    inline std::string stem_csv(EntropyEstimate const& est, std::size_t k) {
      std::vector<std::string> head = {"n"};
      for (std::size_t j = 0; j < k; ++j) {
        head.push_back("h_s" + std::to_string(j + 1));
      }
      head.push_back("envelope");
      std::string out = join(head, ",") + "\n";
      for (auto const& row : est.trace) {
        std::vector<std::string> cells = {std::to_string(row.n)};
        for (double h : row.per_generator) {
          cells.push_back(full(h));
        }
        cells.push_back(full(row.envelope));
        out += join(cells, ",") + "\n";
      }
      return out;
    }

    inline std::string scalar_csv(EntropyEstimate const& est) {
      bool const  series = est.series.has_value();
      std::string out = series ? "n,h,envelope,series_lower,series_upper\n"
                               : "n,h,envelope\n";
      for (auto const& row : est.trace) {
        out += std::to_string(row.n) + "," + full(row.h) + ","
               + full(row.envelope);
        if (series) {
          out += "," + full(est.series->lower(row.n)) + ","
                 + full(est.series->upper(row.n));
        }
        out += "\n";
      }
      return out;
    }

    inline std::string trace_text(EntropyEstimate const&          est,
                                   std::vector<std::string> const& names,
                                   bool                            per_gen) {
      std::vector<std::string> head = {"n", "h"};
      if (per_gen) {
        for (auto const& n : names) {
          head.push_back("h_" + n);
        }
      }
      head.push_back("envelope");
      std::string out = "trace:\n  " + join(head, " ") + "\n";
      for (auto const& row : est.trace) {
        std::vector<std::string> cells = {std::to_string(row.n), fixed(row.h)};
        if (per_gen) {
          for (double h : row.per_generator) {
            cells.push_back(fixed(h));
          }
        }
        cells.push_back(fixed(row.envelope));
        out += "  " + join(cells, " ") + "\n";
      }
      return out;
    }

    inline void estimate_fields(Fields&                         f,
                                EntropyEstimate const&          est,
                                std::vector<std::string> const& names,
                                bool                            per_gen) {
      f.add("base", std::string(to_string(est.base)));
      f.add("value", est.value);
      f.add("converged", est.converged);
      f.add("iterations", est.iterations_used);
      if (per_gen) {
        for (std::size_t j = 0; j < est.per_generator.size(); ++j) {
          f.add("h_" + names[j], est.per_generator[j]);
        }
        f.add("spread", est.max_spread());
      }
      if (est.series) {
        std::size_t const N = est.trace.back().n;
        f.add("series_valid", est.series->valid);
        f.add("series_lower", est.series->lower(N));
        f.add("series_upper", est.series->upper(N));
      }
    }

    inline Report render_estimate(std::string const&              command,
                                  EntropyEstimate const&          est,
                                  std::vector<std::string> const& names,
                                  bool                            per_gen,
                                  Format                          format) {
      Fields f;
      f.add("command", command);
      estimate_fields(f, est, names, per_gen);
      Report r;
      switch (format) {
        case Format::Text:
          r.output = f.text() + trace_text(est, names, per_gen);
          break;
        case Format::Csv:
          r.output = per_gen ? stem_csv(est, names.size()) : scalar_csv(est);
          break;
        case Format::Json: {
          auto doc     = f.json();
          doc["trace"] = trace_json(est);
          if (est.series) {
            doc["series"] = {{"partial_sums", est.series->partial_sums},
                             {"tails", est.series->tails}};
          }
          r.output = doc.dump(2) + "\n";
          break;
        }
      }
      r.exit_code = est.converged ? exit_code::ok : exit_code::no_convergence;
      return r;
    }

    inline std::string render_fields(Fields const& f, Format format) {
      switch (format) {
        case Format::Text: return f.text();
        case Format::Csv: return f.csv();
        case Format::Json: return f.json().dump(2) + "\n";
      }
      return {};
    }

    inline void certificate_fields(Fields&                         f,
                                   std::vector<Certificate> const& certs) {
      f.add("certificates", certs.size());
      for (std::size_t c = 0; c < certs.size(); ++c) {
        std::string const        key = "certificate." + std::to_string(c + 1);
        std::vector<std::string> parts;
        ordered_json             ev = ordered_json::object();
        for (auto const& [name, value] : certs[c].evidence) {
          parts.push_back(name + "=" + value);
          ev[name] = value;
        }
        std::string text = std::string(to_string(certs[c].kind));
        if (!parts.empty()) {
          text += " (" + join(parts, ", ") + ")";
        }
        f.add(key, text,
              ordered_json{{"kind", std::string(to_string(certs[c].kind))},
                           {"evidence", ev}});
      }
    }

    inline Report analyze(LoadedSystem const& ls, Format format) {
      auto const& sys = ls.system;
      auto const& K   = sys.relation();
      auto const& cls = sys.classification();
      Fields      f;
      f.add("command", std::string("analyze"));
      f.add("generators", join(ls.generator_names, ","),
            ordered_json(ls.generator_names));
      f.add("alphabet", join(sys.symbols(), ","), ordered_json(sys.symbols()));
      f.add("k", sys.k());
      f.add("alphabet_size", sys.alphabet_size());
      f.add("K.irreducible", K.is_irreducible());
      f.add("K.primitive", K.is_primitive());
      if (auto e = K.primitivity_exponent()) {
        f.add("K.exponent", *e);
      }
      if (K.is_irreducible()) {
        f.add("K.period", K.period());
        f.add("K.spectral_radius", spectral_radius(K, 1e-13));
      }
      f.add("hom", cls.is_hom);
      if (cls.full_row_index) {
        f.add("full_row", ls.generator_names[*cls.full_row_index]);
      }
      if (cls.constant_row_sum) {
        f.add("constant_row_sum", *cls.constant_row_sum);
      }
      if (cls.free_group_rank) {
        f.add("free_group_rank", *cls.free_group_rank);
        f.add("alphabet_small_enough", cls.alphabet_small_enough);
      }
      auto const g = build_graph_representation(sys);
      f.add("graph.vertices", g.vertex_count());
      f.add("graph.edges", g.edge_count());
      bool const sc = is_strongly_connected(g);
      f.add("graph.strongly_connected", sc);
      auto const search = find_pivot_search(g);
      f.add("graph.powers_examined", search.powers_examined);
      if (search.pivot) {
        auto const& p = *search.pivot;
        f.add("graph.pivot",
              "(" + sys.symbols()[p.vertex.symbol] + ", "
                  + ls.generator_names[p.vertex.generator] + ") -> "
                  + ls.generator_names[p.target_generator] + " in "
                  + std::to_string(p.walk_length),
              ordered_json{
                  {"symbol", sys.symbols()[p.vertex.symbol]},
                  {"generator", ls.generator_names[p.vertex.generator]},
                  {"target_generator", ls.generator_names[p.target_generator]},
                  {"walk_length", p.walk_length}});
      }
      certificate_fields(f, existence_certificate(sys));
      return Report{render_fields(f, format), {}, exit_code::ok};
    }

    inline Report certify(LoadedSystem const& ls, Format format) {
      auto const certs = existence_certificate(ls.system);
      Fields     f;
      f.add("command", std::string("certify"));
      certificate_fields(f, certs);
      return Report{render_fields(f, format), {},
                    certs.empty() ? exit_code::no_certificate : exit_code::ok};
    }

    inline std::string tuple(std::vector<Natural> const& v) {
      std::vector<std::string> parts;
      for (auto const& x : v) {
        parts.push_back(x.str());
      }
      return "(" + join(parts, ",") + ")";
    }

    inline ordered_json tuple_json(std::vector<Natural> const& v) {
      ordered_json out = ordered_json::array();
      for (auto const& x : v) {
        out.push_back(x.str());
      }
      return out;
    }

    inline Report oracle(LoadedSystem const& ls, std::size_t depth,
                         Format format) {
      auto const& sys    = ls.system;
      auto const  exact  = exact_ball_counts(sys, depth);
      auto const  brute  = brute_force_counts(sys, depth);
      std::size_t mismatches = 0;
      Fields      f;
      f.add("command", std::string("oracle"));
      f.add("depth", depth);
      for (std::size_t m = 0; m <= depth; ++m) {
        std::string const at = "n" + std::to_string(m) + ".";
        auto emit = [&](std::string const&          key,
                        std::vector<Natural> const& e,
                        std::vector<Natural> const& b) {
          bool const same = e == b;
          mismatches += same ? 0 : 1;
          std::string text = tuple(e);
          if (!same) {
            text += " != brute " + tuple(b);
          }
          f.add(at + key, text,
                same ? tuple_json(e)
                     : ordered_json{{"exact", tuple_json(e)},
                                    {"brute", tuple_json(b)}});
        };
        for (std::size_t j = 0; j < sys.k(); ++j) {
          emit("stem." + ls.generator_names[j], exact.stem[m][j],
               brute.stem[m][j]);
        }
        for (std::size_t i = 0; i < sys.k(); ++i) {
          emit("branch." + ls.generator_names[i], exact.branch[m][i],
               brute.branch[m][i]);
        }
        emit("ball", exact.ball[m], brute.ball[m]);
      }
      f.add("mismatches", mismatches);
      f.add("result", std::string(mismatches == 0 ? "PASS" : "FAIL"));
      return Report{render_fields(f, format), {},
                    mismatches == 0 ? exit_code::ok : exit_code::oracle_failed};
    }
  }  // namespace detail

  //! Runs one command against a loaded system. Throws UnknownCommand for a
  //! command outside commands(); module errors propagate unchanged.
  inline Report run(std::string const& command, LoadedSystem const& ls,
                    Flags const& flags) {
    auto resolved = detail::resolve(ls.config.options, flags);
    Report report;
    if (command == "analyze") {
      report = detail::analyze(ls, flags.format);
    } else if (command == "stem") {
      report = detail::render_estimate(
          command, stem_entropy(ls.system, resolved.opts), ls.generator_names,
          true, flags.format);
    } else if (command == "top") {
      report = detail::render_estimate(
          command, topological_entropy_cayley(ls.system, resolved.opts),
          ls.generator_names, false, flags.format);
    } else if (command == "fulltree") {
      report = detail::render_estimate(
          command, fulltree_entropy(ls.system, resolved.opts),
          ls.generator_names, false, flags.format);
    } else if (command == "oracle") {
      report = detail::oracle(ls, flags.depth, flags.format);
    } else if (command == "certify") {
      report = detail::certify(ls, flags.format);
    } else {
      throw Error(ErrorCode::UnknownCommand,
                  "'" + command + "' (expected one of "
                      + detail::join(commands(), ", ") + ")");
    }
    report.warnings = std::move(resolved.warnings);
    return report;
  }

}  // namespace tsent::cli

#endif  // TSENT_CLI_HPP_
