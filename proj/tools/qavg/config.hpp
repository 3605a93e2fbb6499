#pragma once

// Run configuration for the qavg tool: every command has a fixed table of
// parameters, read from command-line flags and an optional flat key=value
// file. Flags override the file.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qavg/mode_grid.hpp"

namespace qavg::cli {

enum class Command {
  critical_density,
  solve_mu,
  classify,
  quasi_average,
  lemma41,
  pressure_check,
  interacting,
  spin_ed,
  limit_order,
};

std::string_view command_name(Command command);
std::optional<Command> parse_command(std::string_view name);
const std::vector<Command>& all_commands();

/// Bad invocation; the message names the offending key. Exit status 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// --help was given; carries the rendered text. Exit status 0.
class HelpRequest : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// start * ratio^m for m = 0 .. count - 1, written start:ratio:count.
struct GeometricSpec {
  double start = 0.0;
  double ratio = 0.0;
  std::size_t count = 0;

  std::vector<double> values() const;
  std::string text() const;
};

struct ParamSpec {
  std::string key;
  std::string help;
  /// Empty together with `required` means the flag must be given.
  std::string fallback;
  bool required = false;
  /// Throws UsageError on a bad value; `key` is for the message.
  std::function<void(const std::string& key, const std::string& value)> check;
};

/// Parameters accepted by a command, in help order. Every command also takes
/// `out` (output directory) and `config` (key=value file).
const std::vector<ParamSpec>& parameters(Command command);

struct RunConfig {
  Command command = Command::critical_density;
  /// Every parameter of the command, defaults filled in.
  std::map<std::string, std::string> parameters;

  const std::string& text(const std::string& key) const;
  double real(const std::string& key) const;
  std::size_t count(const std::string& key) const;
  std::uint64_t seed(const std::string& key) const;
  GeometricSpec schedule(const std::string& key) const;
  ModeIndex index(const std::string& key) const;
  std::array<double, 3> vec3(const std::string& key) const;
  std::vector<double> reals(const std::string& key) const;
  std::vector<int> ints(const std::string& key) const;
};

/// Parses `args` (without the program name): a command followed by flags.
/// Throws UsageError or HelpRequest.
RunConfig parse_config(const std::vector<std::string>& args);

/// Reads a key=value file; `#` starts a comment, blank lines are skipped.
std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path);

/// Strict parsers shared by the validators; throw UsageError naming `key`.
double parse_real(const std::string& key, const std::string& value);
GeometricSpec parse_geometric(const std::string& key, const std::string& value);

}  // namespace qavg::cli
