#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "shiftlog/cli.hpp"

namespace shiftlog::cli {

namespace {

// Leftover arguments are overrides: "--section.key value" or "--section.key=value".
void apply_overrides(Config& config, const std::vector<std::string>& extras) {
  for (std::size_t i = 0; i < extras.size(); ++i) {
    const std::string& arg = extras[i];
    if (arg.rfind("--", 0) != 0 || arg.size() == 2) throw ConfigError(fmt::format("unexpected argument '{}'", arg));
    const std::string body = arg.substr(2);
    const auto eq = body.find('=');
    if (eq != std::string::npos) {
      config.set(body.substr(0, eq), body.substr(eq + 1));
    } else if (i + 1 < extras.size()) {
      config.set(body, extras[++i]);
    } else {
      throw ConfigError(fmt::format("override '{}' has no value", arg));
    }
  }
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw ConfigError(fmt::format("cannot write {}", path.string()));
}

}  // namespace

int main_entry(int argc, char** argv) {
  CLI::App app{"Shifted Littlewood-Paley experiments"};
  app.allow_extras();
  std::string command, config_path, out_dir;
  bool list = false;
  app.add_option("command", command, "experiment to run");
  app.add_option("--config", config_path, "INI configuration file");
  app.add_option("--out", out_dir, "directory for <command>.report and <command>.csv");
  app.add_flag("--list", list, "list commands and exit");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitPass : kExitConfigError;
  }
  if (list) {
    for (const auto& name : command_names()) std::cout << name << '\n';
    return kExitPass;
  }

  const auto start = std::chrono::steady_clock::now();
  try {
    if (command.empty()) throw ConfigError("no command given; use --list");
    Config config = config_path.empty() ? Config() : Config::from_file(config_path);
    apply_overrides(config, app.remaining());

    std::map<std::string, std::string> outputs;
    std::filesystem::path dir;
    if (!out_dir.empty()) {
      dir = out_dir;
      std::filesystem::create_directories(dir);
      outputs["report"] = (dir / (command + ".report")).string();
      outputs["csv"] = (dir / (command + ".csv")).string();
    }
    const CommandOutput out = run_command(command, config, outputs);
    const std::string text = out.report.text();
    std::cout << text;
    if (!out_dir.empty()) {
      write_file(dir / (command + ".report"), text);
      if (out.csv) write_file(dir / (command + ".csv"), out.csv->text());
    }
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    std::cerr << fmt::format("{}: {:.2f} s\n", command, elapsed.count());
    return out.status;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return kExitConfigError;
  }
}

}  // namespace shiftlog::cli
