// tsent - command-line front end
//
//   tsent <command> <config-path> [--iters N] [--eps E] [--log-base e|2|10]
//         [--depth D] [--format text|csv|json] [--batch DIR]
//
// With --batch every *.json file in DIR is run (in parallel) and the
// reports are printed keyed by file name, in sorted order. The exit code is
// the largest one over all files.

#include <algorithm>
#include <filesystem>
#include <future>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "tsent/tsent.hpp"

namespace fs = std::filesystem;

namespace {

  struct Outcome {
    std::string              name;
    tsent::cli::Report       report;
    std::optional<std::string> error;
  };

  Outcome run_one(std::string const& command, fs::path const& path,
                  tsent::cli::Flags const& flags) {
    Outcome out;
    out.name = path.filename().string();
    try {
      auto const loaded = tsent::load_config(path.string());
      out.report        = tsent::cli::run(command, loaded, flags);
    } catch (tsent::Error const& e) {
      out.error            = e.what();
      out.report.exit_code = tsent::cli::exit_code_for(e);
    }
    return out;
  }

  int print_single(Outcome const& o) {
    for (auto const& w : o.report.warnings) {
      std::cerr << w << "\n";
    }
    if (o.error) {
      std::cerr << "error: " << *o.error << "\n";
    }
    std::cout << o.report.output;
    return o.report.exit_code;
  }

  int print_batch(std::vector<Outcome> const& all, tsent::cli::Format format) {
    int code = 0;
    if (format == tsent::cli::Format::Json) {
      nlohmann::ordered_json doc = nlohmann::ordered_json::object();
      for (auto const& o : all) {
        nlohmann::ordered_json entry;
        entry["exit_code"] = o.report.exit_code;
        if (o.error) {
          entry["error"] = *o.error;
        } else {
          entry["report"] = nlohmann::ordered_json::parse(o.report.output);
        }
        doc[o.name] = entry;
        code        = std::max(code, o.report.exit_code);
        for (auto const& w : o.report.warnings) {
          std::cerr << o.name << ": " << w << "\n";
        }
      }
      std::cout << doc.dump(2) << "\n";
      return code;
    }
    for (auto const& o : all) {
      std::cout << "== " << o.name << " ==\n";
      for (auto const& w : o.report.warnings) {
        std::cerr << o.name << ": " << w << "\n";
      }
      if (o.error) {
        std::cerr << o.name << ": error: " << *o.error << "\n";
      }
      std::cout << o.report.output;
      code = std::max(code, o.report.exit_code);
    }
    return code;
  }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entropy of Markov tree shifts on Cayley trees"};

  std::string                command;
  std::string                config_path;
  std::string                batch_dir;
  std::optional<std::size_t> iters;
  std::optional<double>      eps;
  std::string                log_base;
  std::size_t                depth  = 3;
  std::string                format = "text";

  app.add_option("command", command,
                 "analyze | stem | top | fulltree | oracle | certify")
      ->required();
  app.add_option("config", config_path, "system config (JSON)");
  app.add_option("--iters", iters, "maximum iterations")
      ->check(CLI::PositiveNumber);
  app.add_option("--eps", eps, "relative convergence tolerance")
      ->check(CLI::PositiveNumber);
  app.add_option("--log-base", log_base, "logarithm base")
      ->check(CLI::IsMember({"e", "2", "10"}));
  app.add_option("--depth", depth, "oracle depth");
  app.add_option("--format", format, "report format")
      ->check(CLI::IsMember({"text", "csv", "json"}));
  app.add_option("--batch", batch_dir, "run every *.json config in DIR")
      ->check(CLI::ExistingDirectory);

  try {
    app.parse(argc, argv);
  } catch (CLI::ParseError const& e) {
    return app.exit(e) == 0 ? 0 : tsent::cli::exit_code::invalid;
  }

  tsent::cli::Flags flags;
  flags.iters  = iters;
  flags.eps    = eps;
  flags.depth  = depth;
  flags.format = tsent::cli::parse_format(format);
  if (!log_base.empty()) {
    flags.log_base = tsent::parse_log_base(log_base);
  }

  auto const& known = tsent::cli::commands();
  if (std::find(known.begin(), known.end(), command) == known.end()) {
    std::cerr << "error: "
              << tsent::Error(tsent::ErrorCode::UnknownCommand, command).what()
              << "\n";
    return tsent::cli::exit_code::invalid;
  }

  if (batch_dir.empty()) {
    if (config_path.empty()) {
      std::cerr << "error: a config path or --batch DIR is required\n";
      return tsent::cli::exit_code::invalid;
    }
    return print_single(run_one(command, config_path, flags));
  }

  std::vector<fs::path> files;
  for (auto const& entry : fs::directory_iterator(batch_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<std::future<Outcome>> pending;
  for (auto const& f : files) {
    pending.push_back(std::async(std::launch::async, run_one, command, f, flags));
  }
  std::vector<Outcome> all;
  for (auto& p : pending) {
    all.push_back(p.get());
  }
  return print_batch(all, flags.format);
}
