#include "config.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "qavg/ideal_bose.hpp"

namespace qavg::cli {

namespace {

struct CommandInfo {
  Command command;
  std::string_view name;
  std::string_view description;
};

constexpr std::array<CommandInfo, 9> kCommands{{
    {Command::critical_density, "critical-density", "Saturation density of the infinite ideal gas"},
    {Command::solve_mu, "solve-mu", "Chemical potential and lowest mode occupations at one volume"},
    {Command::classify, "classify", "Type I/II/III condensation verdict over a volume schedule"},
    {Command::quasi_average, "quasi-average",
     "Order parameter, condensate and ODLRO densities with a vanishing source"},
    {Command::lemma41, "lemma41", "Small-source law of the chemical potential"},
    {Command::pressure_check, "pressure-check",
     "Source derivative of the pressure against finite differences"},
    {Command::interacting, "interacting", "Condensation verdict for the diagonal interacting gas"},
    {Command::spin_ed, "spin-ed", "Exact diagonalization of the Heisenberg ferromagnet"},
    {Command::limit_order, "limit-order", "Field and size trends of the ferromagnet magnetization"},
}};

constexpr double kAlpha1Cubic = 1.0 / 3.0;

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(const std::string& value, char sep) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream in(value);
  while (std::getline(in, part, sep)) parts.push_back(trim(part));
  if (!value.empty() && value.back() == sep) parts.emplace_back();
  return parts;
}

[[noreturn]] void bad(const std::string& key, const std::string& value, const std::string& why) {
  throw UsageError("invalid value for --" + key + ": " + why + " (got '" + value + "')");
}

bool plain_real(std::string_view text, double& out) {
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc{} && end == text.data() + text.size();
}

long long parse_integer(const std::string& key, const std::string& value) {
  long long out = 0;
  const auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (value.empty() || ec != std::errc{} || end != value.data() + value.size()) {
    bad(key, value, "expected an integer");
  }
  return out;
}

using Check = std::function<void(const std::string&, const std::string&)>;

Check positive() {
  return [](const std::string& k, const std::string& v) {
    if (!(parse_real(k, v) > 0.0)) bad(k, v, "must be positive");
  };
}

Check nonnegative() {
  return [](const std::string& k, const std::string& v) {
    if (!(parse_real(k, v) >= 0.0)) bad(k, v, "must be non-negative");
  };
}

Check any_real() {
  return [](const std::string& k, const std::string& v) { parse_real(k, v); };
}

Check alpha1_range() {
  return [](const std::string& k, const std::string& v) {
    const double a = parse_real(k, v);
    if (!(a >= kAlpha1Cubic - 1e-12 && a < 1.0)) bad(k, v, "must lie in [1/3, 1)");
  };
}

Check count_at_least(long long lo, long long hi = 1'000'000'000) {
  return [lo, hi](const std::string& k, const std::string& v) {
    const long long n = parse_integer(k, v);
    if (n < lo || n > hi) {
      bad(k, v, "must be an integer in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
  };
}

Check growing_schedule() {
  return [](const std::string& k, const std::string& v) {
    const auto s = parse_geometric(k, v);
    if (!(s.start > 0.0) || !(s.ratio > 1.0) || s.count < 4) {
      bad(k, v, "needs start > 0, ratio > 1 and at least 4 entries");
    }
  };
}

Check shrinking_schedule() {
  return [](const std::string& k, const std::string& v) {
    const auto s = parse_geometric(k, v);
    if (!(s.start > 0.0) || !(s.ratio > 0.0 && s.ratio < 1.0) || s.count < 4) {
      bad(k, v, "needs start > 0, 0 < ratio < 1 and at least 4 entries");
    }
  };
}

Check triple_of_integers() {
  return [](const std::string& k, const std::string& v) {
    const auto parts = split(v, ',');
    if (parts.size() != 3) bad(k, v, "expected three comma-separated integers");
    for (const auto& p : parts) parse_integer(k, p);
  };
}

Check direction() {
  return [](const std::string& k, const std::string& v) {
    const auto parts = split(v, ',');
    if (parts.size() != 3) bad(k, v, "expected three comma-separated numbers");
    double norm = 0.0;
    for (const auto& p : parts) norm += std::pow(parse_real(k, p), 2);
    if (!(norm > 0.0)) bad(k, v, "direction must be non-zero");
  };
}

Check real_list(bool allow_empty) {
  return [allow_empty](const std::string& k, const std::string& v) {
    if (v.empty()) {
      if (allow_empty) return;
      bad(k, v, "expected a comma-separated list");
    }
    for (const auto& p : split(v, ',')) {
      if (!(parse_real(k, p) >= 0.0)) bad(k, v, "entries must be non-negative");
    }
  };
}

Check int_list(bool allow_empty) {
  return [allow_empty](const std::string& k, const std::string& v) {
    if (v.empty()) {
      if (allow_empty) return;
      bad(k, v, "expected a comma-separated list");
    }
    for (const auto& p : split(v, ',')) {
      if (parse_integer(k, p) < 1) bad(k, v, "entries must be positive integers");
    }
  };
}

ParamSpec required(std::string key, std::string help, Check check) {
  return {std::move(key), std::move(help), "", true, std::move(check)};
}

ParamSpec optional(std::string key, std::string help, std::string fallback, Check check) {
  return {std::move(key), std::move(help), std::move(fallback), false, std::move(check)};
}

std::vector<ParamSpec> build_parameters(Command command) {
  const auto beta = required("beta", "inverse temperature", positive());
  const auto rho = required("rho", "particle density", positive());
  const auto alpha1_cubic = optional("alpha1", "long-axis exponent of the box, in [1/3, 1)",
                                     "0.3333333333333333", alpha1_range());
  const auto alpha1 = required("alpha1", "long-axis exponent of the box, in [1/3, 1)",
                               alpha1_range());
  const auto modes =
      optional("modes", "lowest modes listed in the mode table", "10", count_at_least(1, 100000));
  const auto max_sites =
      optional("max-sites", "refuse lattices above this many sites", "12", count_at_least(1, 16));

  switch (command) {
    case Command::critical_density:
      return {beta};
    case Command::solve_mu:
      return {beta, rho, required("volume", "box volume", positive()), alpha1_cubic, modes};
    case Command::classify:
      return {alpha1, beta, rho,
              optional("volumes", "volume schedule start:ratio:count", "1e4:10:7",
                       growing_schedule()),
              modes};
    case Command::quasi_average:
      return {alpha1,
              beta,
              rho,
              optional("phi", "source phase in radians (accepts pi, pi/3, 2pi/3)", "0", any_real()),
              optional("volumes", "volume schedule start:ratio:count", "1e7:10:7",
                       growing_schedule()),
              optional("amplitudes", "source amplitude schedule start:ratio:count", "1e-2:0.5:8",
                       shrinking_schedule()),
              optional("tolerance", "relative fit residual above which a limit is inconclusive",
                       "0.01", positive()),
              optional("mode", "lattice index of the sourced mode", "0,0,0", triple_of_integers())};
    case Command::lemma41:
      return {beta,
              rho,
              alpha1_cubic,
              optional("volumes", "volume schedule start:ratio:count", "1e6:10:7",
                       growing_schedule()),
              optional("amplitudes", "source amplitude schedule start:ratio:count",
                       "1e-2:0.31622776601683794:7", shrinking_schedule()),
              optional("tolerance", "relative fit residual above which a limit is inconclusive",
                       "0.01", positive())};
    case Command::pressure_check:
      return {beta,
              alpha1_cubic,
              optional("volume", "box volume", "1e4", positive()),
              optional("points", "random (mu, source) samples", "50", count_at_least(1, 100000)),
              optional("seed", "random seed", "1", count_at_least(0, 4'000'000'000LL)),
              optional("step", "finite-difference step relative to the amplitude", "1e-4",
                       positive()),
              optional("tolerance", "relative derivative agreement", "1e-6", positive())};
    case Command::interacting:
      return {optional("coupling", "mean-field coupling a > 0", "1", positive()),
              alpha1,
              beta,
              rho,
              optional("volumes", "volume schedule start:ratio:count", "1e4:4:6",
                       growing_schedule()),
              modes};
    case Command::spin_ed:
      return {optional("sites", "chain length (ignored when --dims is given)", "2",
                       count_at_least(1, 16)),
              optional("dims", "periodic lattice extents, e.g. 2,2", "", int_list(true)),
              beta,
              optional("B", "field magnitude", "0", nonnegative()),
              optional("direction", "field direction, normalized before use", "0,0,1", direction()),
              max_sites};
    case Command::limit_order:
      return {optional("beta", "inverse temperature", "2", positive()),
              optional("fields", "field magnitudes", "0.1,0.05,0.02,0.01,0", real_list(false)),
              optional("sizes", "chain lengths", "2,4,6,8,10", int_list(false)), max_sites};
  }
  return {};
}

void check_command(const RunConfig& config) {
  switch (config.command) {
    case Command::quasi_average:
    case Command::lemma41: {
      const double rho_c = critical_density(config.real("beta"));
      if (!(config.real("rho") > rho_c)) {
        throw UsageError("invalid value for --rho: must exceed the critical density " +
                         std::to_string(rho_c) + " at this beta");
      }
      break;
    }
    case Command::spin_ed: {
      const auto dims = config.ints("dims");
      std::size_t sites = config.count("sites");
      if (!dims.empty()) {
        sites = 1;
        for (int d : dims) sites *= static_cast<std::size_t>(d);
      }
      if (sites > config.count("max-sites")) {
        throw UsageError("invalid value for --sites/--dims: " + std::to_string(sites) +
                         " sites exceed --max-sites " + config.text("max-sites"));
      }
      break;
    }
    case Command::limit_order:
      for (int n : config.ints("sizes")) {
        if (static_cast<std::size_t>(n) > config.count("max-sites")) {
          throw UsageError("invalid value for --sizes: " + std::to_string(n) +
                           " sites exceed --max-sites " + config.text("max-sites"));
        }
      }
      break;
    default:
      break;
  }
}

std::string render_help(const CLI::App& app) { return app.help(); }

}  // namespace

std::string_view command_name(Command command) {
  for (const auto& info : kCommands) {
    if (info.command == command) return info.name;
  }
  return "unknown";
}

std::optional<Command> parse_command(std::string_view name) {
  for (const auto& info : kCommands) {
    if (info.name == name) return info.command;
  }
  return std::nullopt;
}

const std::vector<Command>& all_commands() {
  static const std::vector<Command> commands = [] {
    std::vector<Command> out;
    for (const auto& info : kCommands) out.push_back(info.command);
    return out;
  }();
  return commands;
}

const std::vector<ParamSpec>& parameters(Command command) {
  static const auto table = [] {
    std::map<Command, std::vector<ParamSpec>> t;
    for (const auto& info : kCommands) {
      auto specs = build_parameters(info.command);
      specs.push_back(optional("out", "output directory", "qavg-out", [](const std::string& k,
                                                                          const std::string& v) {
        if (v.empty()) bad(k, v, "must not be empty");
      }));
      t.emplace(info.command, std::move(specs));
    }
    return t;
  }();
  return table.at(command);
}

double parse_real(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  double out = 0.0;
  if (plain_real(v, out)) {
    if (!std::isfinite(out)) bad(key, value, "must be finite");
    return out;
  }
  // a*pi/b with both factors optional
  const auto at = v.find("pi");
  if (at != std::string::npos) {
    double scale = 1.0, divisor = 1.0;
    std::string head = v.substr(0, at), tail = v.substr(at + 2);
    if (!head.empty() && head.back() == '*') head.pop_back();
    if (head == "-") {
      scale = -1.0;
    } else if (!head.empty() && !plain_real(head, scale)) {
      bad(key, value, "expected a number");
    }
    if (!tail.empty()) {
      if (tail.front() != '/' || !plain_real(std::string_view(tail).substr(1), divisor) ||
          divisor == 0.0) {
        bad(key, value, "expected a number");
      }
    }
    return scale * kPi / divisor;
  }
  bad(key, value, "expected a number");
}

GeometricSpec parse_geometric(const std::string& key, const std::string& value) {
  const auto parts = split(value, ':');
  if (parts.size() != 3) bad(key, value, "expected start:ratio:count");
  GeometricSpec s;
  s.start = parse_real(key, parts[0]);
  s.ratio = parse_real(key, parts[1]);
  const long long n = parse_integer(key, parts[2]);
  if (n < 1 || n > 64) bad(key, value, "count must lie in [1, 64]");
  s.count = static_cast<std::size_t>(n);
  return s;
}

std::vector<double> GeometricSpec::values() const {
  std::vector<double> out;
  out.reserve(count);
  for (std::size_t m = 0; m < count; ++m) out.push_back(start * std::pow(ratio, static_cast<double>(m)));
  return out;
}

std::string GeometricSpec::text() const {
  std::ostringstream out;
  out.precision(17);
  out << start << ':' << ratio << ':' << count;
  return out.str();
}

const std::string& RunConfig::text(const std::string& key) const {
  const auto it = parameters.find(key);
  if (it == parameters.end()) throw UsageError("command has no parameter --" + key);
  return it->second;
}

double RunConfig::real(const std::string& key) const { return parse_real(key, text(key)); }

std::size_t RunConfig::count(const std::string& key) const {
  return static_cast<std::size_t>(parse_integer(key, text(key)));
}

std::uint64_t RunConfig::seed(const std::string& key) const {
  return static_cast<std::uint64_t>(parse_integer(key, text(key)));
}

GeometricSpec RunConfig::schedule(const std::string& key) const {
  return parse_geometric(key, text(key));
}

ModeIndex RunConfig::index(const std::string& key) const {
  const auto parts = split(text(key), ',');
  if (parts.size() != 3) bad(key, text(key), "expected three comma-separated integers");
  ModeIndex out{};
  for (std::size_t i = 0; i < 3; ++i) out[i] = parse_integer(key, parts[i]);
  return out;
}

std::array<double, 3> RunConfig::vec3(const std::string& key) const {
  const auto parts = split(text(key), ',');
  if (parts.size() != 3) bad(key, text(key), "expected three comma-separated numbers");
  std::array<double, 3> out{};
  for (std::size_t i = 0; i < 3; ++i) out[i] = parse_real(key, parts[i]);
  return out;
}

std::vector<double> RunConfig::reals(const std::string& key) const {
  std::vector<double> out;
  if (text(key).empty()) return out;
  for (const auto& p : split(text(key), ',')) out.push_back(parse_real(key, p));
  return out;
}

std::vector<int> RunConfig::ints(const std::string& key) const {
  std::vector<int> out;
  if (text(key).empty()) return out;
  for (const auto& p : split(text(key), ',')) out.push_back(static_cast<int>(parse_integer(key, p)));
  return out;
}

std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file '" + path + "'");
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  for (int number = 1; std::getline(in, line); ++number) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string content = trim(line);
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos) {
      throw UsageError(path + ":" + std::to_string(number) + ": expected key=value");
    }
    std::string key = trim(content.substr(0, eq));
    if (key.rfind("--", 0) == 0) key.erase(0, 2);
    if (key.empty()) throw UsageError(path + ":" + std::to_string(number) + ": empty key");
    entries.emplace_back(std::move(key), trim(content.substr(eq + 1)));
  }
  return entries;
}

RunConfig parse_config(const std::vector<std::string>& args) {
  CLI::App app{"Quasi-averages, generalized condensation and ferromagnet studies", "qavg"};
  app.require_subcommand(1);
  app.footer("Run 'qavg <command> --help' for the parameters of a command.\n"
             "QAVG_THREADS caps the number of worker threads.");
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  std::map<Command, std::map<std::string, std::string>> storage;
  std::map<Command, CLI::App*> subcommands;
  std::string ignored_config;
  for (Command command : all_commands()) {
    const auto& info = *std::find_if(kCommands.begin(), kCommands.end(),
                                     [&](const CommandInfo& c) { return c.command == command; });
    CLI::App* sub = app.add_subcommand(std::string(info.name), std::string(info.description));
    sub->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    auto& values = storage[command];
    for (const auto& spec : parameters(command)) {
      values[spec.key] = spec.fallback;
      CLI::Option* opt = sub->add_option("--" + spec.key, values[spec.key], spec.help);
      if (spec.required) {
        opt->required();
      } else {
        opt->default_str(spec.fallback.empty() ? "\"\"" : spec.fallback);
      }
    }
    sub->add_option("--config", ignored_config, "key=value file; flags given here win");
    subcommands[command] = sub;
  }

  if (args.empty()) throw UsageError("missing command; run 'qavg --help'");
  const std::string& head = args.front();
  if (head == "--help" || head == "-h") throw HelpRequest(render_help(app));
  const auto command = parse_command(head);
  if (!command) throw UsageError("unknown command '" + head + "'; run 'qavg --help'");

  // Config entries go first so that later flags take precedence.
  std::vector<std::string> tokens{head};
  std::vector<std::string> rest;
  for (std::size_t i = 1; i < args.size(); ++i) {
    const std::string& a = args[i];
    std::string path;
    if (a == "--config") {
      if (i + 1 >= args.size()) throw UsageError("--config requires a file path");
      path = args[++i];
    } else if (a.rfind("--config=", 0) == 0) {
      path = a.substr(9);
    } else {
      rest.push_back(a);
      continue;
    }
    const auto& specs = parameters(*command);
    for (const auto& [key, value] : read_config_file(path)) {
      const bool known = std::any_of(specs.begin(), specs.end(),
                                     [&](const ParamSpec& s) { return s.key == key; });
      if (!known) {
        throw UsageError("unknown key '" + key + "' in config file '" + path + "' for command " +
                         head);
      }
      tokens.push_back("--" + key);
      tokens.push_back(value);
    }
  }
  tokens.insert(tokens.end(), rest.begin(), rest.end());
  std::reverse(tokens.begin(), tokens.end());

  try {
    app.parse(tokens);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequest(render_help(*subcommands.at(*command)));
  } catch (const CLI::CallForAllHelp&) {
    throw HelpRequest(render_help(app));
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  RunConfig config;
  config.command = *command;
  config.parameters = storage.at(*command);
  for (const auto& spec : parameters(*command)) {
    if (spec.check) spec.check(spec.key, config.parameters.at(spec.key));
  }
  check_command(config);
  return config;
}

}  // namespace qavg::cli
