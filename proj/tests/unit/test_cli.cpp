#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "config.hpp"
#include "report_io.hpp"

using namespace qavg::cli;

namespace {

std::string write_file(const std::string& name, const std::string& text) {
  std::ofstream(name) << text;
  return name;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("classify flags round-trip into the run configuration") {
  const auto c = parse_config(
      {"classify", "--alpha1", "0.6", "--beta", "1", "--rho", "0.31", "--volumes", "1e3:4:7"});
  CHECK(c.command == Command::classify);
  CHECK(c.real("alpha1") == 0.6);
  const auto v = c.schedule("volumes").values();
  REQUIRE(v.size() == 7);
  CHECK(v.front() == 1e3);
  CHECK(v.back() == doctest::Approx(1e3 * 4096.0));
  CHECK(c.text("out") == "qavg-out");
}

TEST_CASE("missing required parameter is a usage error naming it") {
  try {
    parse_config({"classify", "--alpha1", "0.6", "--beta", "1"});
    FAIL("expected a usage error");
  } catch (const UsageError& e) {
    CHECK(std::string(e.what()).find("rho") != std::string::npos);
  }
}

TEST_CASE("command-line flags override the config file") {
  const auto path = write_file("cli_test.cfg", "# defaults\nbeta = 2\nrho=0.2  # inline\n\n");
  const auto c = parse_config({"solve-mu", "--config", path, "--volume", "1e4", "--beta", "3"});
  CHECK(c.real("beta") == 3.0);
  CHECK(c.real("rho") == 0.2);
  const auto d = parse_config({"solve-mu", "--volume", "1e4", "--config=" + path});
  CHECK(d.real("beta") == 2.0);
}

TEST_CASE("unknown keys are rejected in files and on the command line") {
  const auto path = write_file("cli_bad.cfg", "beta=1\ntemperature=3\n");
  CHECK_THROWS_WITH_AS(parse_config({"critical-density", "--config", path}),
                       doctest::Contains("temperature"), UsageError);
  CHECK_THROWS_WITH_AS(parse_config({"critical-density", "--beta", "1", "--gamma", "2"}),
                       doctest::Contains("gamma"), UsageError);
  CHECK_THROWS_AS(parse_config({"no-such-command"}), UsageError);
}

TEST_CASE("values are validated before any computation") {
  CHECK_THROWS_WITH_AS(parse_config({"critical-density", "--beta", "-1"}),
                       doctest::Contains("beta"), UsageError);
  CHECK_THROWS_WITH_AS(parse_config({"classify", "--alpha1", "0.2", "--beta", "1", "--rho", "1"}),
                       doctest::Contains("alpha1"), UsageError);
  CHECK_THROWS_WITH_AS(
      parse_config({"classify", "--alpha1", "0.6", "--beta", "1", "--rho", "1", "--volumes", "1e3:0.5:7"}),
      doctest::Contains("volumes"), UsageError);
  CHECK_THROWS_WITH_AS(parse_config({"quasi-average", "--alpha1", "0.6", "--beta", "1", "--rho", "0.01"}),
                       doctest::Contains("rho"), UsageError);
  CHECK_THROWS_WITH_AS(parse_config({"spin-ed", "--sites", "14", "--beta", "1"}),
                       doctest::Contains("max-sites"), UsageError);
}

TEST_CASE("angles accept multiples of pi") {
  CHECK(parse_real("phi", "pi/3") == doctest::Approx(qavg::kPi / 3));
  CHECK(parse_real("phi", "2pi/3") == doctest::Approx(2 * qavg::kPi / 3));
  CHECK(parse_real("phi", "-pi") == doctest::Approx(-qavg::kPi));
  CHECK_THROWS_AS(parse_real("phi", "pie"), UsageError);
}

TEST_CASE("exit statuses separate usage, runtime and success") {
  std::ostringstream out, err;
  CHECK(main_entry({"critical-density"}, out, err) == 2);
  CHECK(main_entry({"critical-density", "--help"}, out, err) == 0);
  CHECK(out.str().find("--beta") != std::string::npos);
  CHECK(main_entry({"critical-density", "--beta", "1", "--out", "cli_out"}, out, err) == 0);
  // The coarse schedule leaves the band limit 7% short, so no type fits.
  CHECK(main_entry({"classify", "--alpha1", "0.6", "--beta", "1", "--rho", "0.31", "--volumes",
                    "1e3:4:7", "--out", "cli_out"},
                   out, err) == 1);
  const auto failed = Json::parse(slurp("cli_out/classify.json"));
  CHECK(failed["status"] == "partial");
  CHECK(failed["result"]["verdict"] == "NONE");
  CHECK(failed.contains("error"));
}

TEST_CASE("reports carry parameters, settings and frozen CSV headers") {
  std::ostringstream out, err;
  REQUIRE(main_entry({"solve-mu", "--beta", "1", "--rho", "0.2", "--volume", "1e4", "--out",
                      "cli_out"},
                     out, err) == 0);
  const auto doc = Json::parse(slurp("cli_out/solve-mu.json"));
  CHECK(doc["command"] == "solve-mu");
  CHECK(doc["status"] == "ok");
  CHECK(doc["parameters"]["rho"] == "0.2");
  CHECK(doc["settings"].contains("root_tolerance"));
  const auto csv = slurp("cli_out/solve-mu_modes.csv");
  CHECK(csv.rfind("nx,ny,nz,energy,occupation_density\r\n", 0) == 0);
  CHECK(out.str().find("PASS") != std::string::npos);
}

TEST_CASE("spin summary: two sites at zero field") {
  std::ostringstream out, err;
  REQUIRE(main_entry({"spin-ed", "--sites", "2", "--beta", "1", "--B", "0", "--out", "cli_out"},
                     out, err) == 0);
  const auto doc = Json::parse(slurp("cli_out/spin-ed.json"));
  for (const auto& m : doc["result"]["magnetization"]) CHECK(m.get<double>() == 0.0);
  CHECK(slurp("cli_out/spin-ed_table.csv").rfind("N,beta,B,mx,my,mz,energy_per_site\r\n", 0) == 0);
}

TEST_CASE("CSV quoting and number formatting") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1e-300) == "1e-300");
  CsvTable t({"a,b", "c"});
  t.add_row({1.5, -2.0});
  CHECK(t.render() == "\"a,b\",c\r\n1.5,-2\r\n");
  CHECK_THROWS(t.add_row({1.0}));
}

TEST_CASE("short boxes: the unsourced zero mode carries the excess") {
  std::ostringstream out, err;
  REQUIRE(main_entry({"quasi-average", "--alpha1", "0.4", "--beta", "1", "--rho", "0.2", "--out",
                      "cli_out"},
                     out, err) == 0);
  const auto doc = Json::parse(slurp("cli_out/quasi-average.json"));
  CHECK(doc["status"] == "ok");
  for (const auto& c : doc["checks"]) {
    CAPTURE(c["label"].get<std::string>());
    CHECK(c["passed"] == true);
  }
}
