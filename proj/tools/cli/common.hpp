#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

namespace deskcech::cli {

using json = nlohmann::ordered_json;

// Bad flags or scenario contents; exit 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Flags of one subcommand, each also settable from the scenario file under
// the flag name without dashes. Command-line values win.
class Params {
 public:
  explicit Params(CLI::App* app) : app_(app) {}

  template <class T>
  CLI::Option* add(const std::string& key, T& ref, const std::string& help) {
    auto* opt = app_->add_option("--" + key, ref, help)->capture_default_str();
    bind(key, opt, [&ref, key](const json& v) { ref = v.get<T>(); });
    return opt;
  }
  CLI::Option* flag(const std::string& key, bool& ref, const std::string& help);
  // Positional mode; scenario key "mode".
  CLI::Option* mode(std::string& ref, const std::vector<std::string>& choices);
  void bind(const std::string& key, CLI::Option* opt, std::function<void(const json&)> set);

  // Applies the file's fields that were not given on the command line.
  void apply(const json& scenario, const std::string& command) const;

 private:
  struct Binding {
    CLI::Option* opt;
    std::function<void(const json&)> set;
  };
  CLI::App* app_;
  std::map<std::string, Binding> bindings_;
};

// Per-invocation state shared by the subcommands.
struct Run {
  std::ostream& out;
  std::ostream& err;
  std::string command;
  std::string mode;
  std::uint64_t seed = 1;
  std::string out_dir;
  double tolerance = 0.0;
  json meta = json::object();
  int failed = 0;

  Run(std::ostream& o, std::ostream& e) : out(o), err(e) {}

  // One summary line on stdout.
  void check(const std::string& name, bool pass, const std::string& detail);
  // Into out_dir, or onto stdout behind a "# file" marker when no directory was given.
  void write(const std::string& file, const std::string& content);
  // Report with the metadata header first.
  void write_json(const std::string& file, const json& body);
  int status() const { return failed > 0 ? 1 : 0; }
};

struct Command {
  virtual ~Command() = default;
  virtual std::string name() const = 0;
  virtual std::string help() const = 0;
  virtual double default_tolerance() const { return 1e-9; }
  // Registers flags; `mode` is bound by commands that have modes.
  virtual void setup(Params& p, std::string& mode) = 0;
  virtual void execute(Run& run) = 0;
};

std::unique_ptr<Command> make_cover();
std::unique_ptr<Command> make_cochain();
std::unique_ptr<Command> make_chase();
std::unique_ptr<Command> make_cousin();
std::unique_ptr<Command> make_psspace();
std::unique_ptr<Command> make_growth();

// Independent stream for trial t of a run seeded with `seed`.
std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t t);

// Shortest round-trip text for a double.
std::string num(double v);
std::string join(const std::vector<std::string>& parts, const std::string& sep);

}  // namespace deskcech::cli
