#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "infsamp/errors.hpp"
#include "infsamp/runner.hpp"

namespace {

using infsamp::runner::json;

struct Options {
  std::string command;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<std::string> out;
  std::optional<std::string> format;
  bool marginals_only = false;
  std::optional<std::string> gates;
};

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw infsamp::ConfigError("cannot open config file '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw infsamp::ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
}

// Command-line flags take precedence over the config file.
void apply_overrides(json& config, const Options& o) {
  if (!config.is_object()) throw infsamp::ConfigError("config: expected an object");
  if (o.seed) config["seed"] = *o.seed;
  if (o.workers) config["workers"] = *o.workers;
  if (o.out) config["out"] = *o.out;
  if (o.format) config["format"] = *o.format;
  if (o.marginals_only) config["marginals_only"] = true;
  if (o.gates) config["gates"] = *o.gates;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw infsamp::ConfigError("cannot write '" + path + "'");
  out << text;
}

int run(const Options& o) {
  json config = load_config(o.config_path);
  apply_overrides(config, o);
  const json envelope = infsamp::runner::execute(o.command, config);
  const std::string format = envelope.at("config").at("format").get<std::string>();
  const std::string out = envelope.at("config").at("out").get<std::string>();
  const std::string body = envelope.dump(2) + "\n";

  if (format == "csv") {
    const std::string csv = infsamp::runner::render_csv(envelope);
    if (out.empty()) {
      std::cout << csv;
    } else {
      write_file(out, csv);
      write_file(out + ".envelope.json", body);
    }
    return 0;
  }
  if (out.empty()) {
    std::cout << body;
  } else {
    write_file(out, body);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Influence sampling experiments for n-qubit processes"};
  app.require_subcommand(1);
  Options o;

  for (const auto& name : infsamp::runner::command_names()) {
    auto* sub = app.add_subcommand(name, "Run the " + name + " workflow");
    sub->add_option("--config", o.config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "RNG seed");
    sub->add_option("--workers", o.workers, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--out", o.out, "Output path (default: stdout)");
    sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    sub->add_flag("--marginals-only", o.marginals_only, "Keep per-qubit flip counts only");
    sub->add_option("--gates", o.gates, "Test gate set")->check(CLI::IsMember({"2", "3", "rand1", "rand2"}));
    sub->callback([&o, name] { o.command = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : infsamp::runner::kConfigError;
  }

  try {
    return run(o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return infsamp::runner::exit_code_for(std::current_exception());
  }
}
