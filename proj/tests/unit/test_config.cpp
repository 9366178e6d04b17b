#include <filesystem>
#include <fstream>
#include <sstream>

#include "cwstein/commands.hpp"
#include "cwstein/config.hpp"
#include "cwstein/numerics.hpp"
#include "doctest.h"

using namespace cwstein;
namespace fs = std::filesystem;

namespace {
std::string error_of(const std::string& text, const std::string& hint = "") {
  try {
    parse_config_text(text, hint);
  } catch (const InvalidArgument& e) {
    return e.what();
  }
  return "";
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("cwstein_cfg_" + name);
  fs::remove_all(p);
  return p;
}
}  // namespace

TEST_CASE("minimal config gets defaults") {
  const ExperimentConfig c = parse_config_text(R"({"command":"ghs-check","measure":{"kind":"bernoulli"}})");
  CHECK(c.command == "ghs-check");
  CHECK(c.effective.at("s_max").get<double>() == 10.0);
  CHECK(c.effective.at("grid").get<int>() == 4096);
  CHECK(c.effective.at("seed").get<int>() == 1);
  CHECK(c.effective.at("workers").get<int>() == 1);
}

TEST_CASE("misspelled measure kind names the field and the choices") {
  const std::string e = error_of(R"({"command":"ghs-check","measure":{"kind":"bernouli"}})");
  CHECK(e.find("/measure/kind") != std::string::npos);
  CHECK(e.find("bernoulli") != std::string::npos);
  CHECK(e.find("three_state") != std::string::npos);
}

TEST_CASE("syntax errors carry line and column") {
  const std::string e = error_of("{\n  \"command\": \"exact\",\n  \"beta\": ,\n}");
  CHECK(e.find("<config>:3:") != std::string::npos);
}

TEST_CASE("schema errors are all reported") {
  const std::string e = error_of(R"({"command":"exact","measure":{"kind":"bernoulli"},"beta":-1,"n_grid":[],"bogus":1})");
  CHECK(e.find("/beta") != std::string::npos);
  CHECK(e.find("/n_grid") != std::string::npos);
  CHECK(e.find("/bogus") != std::string::npos);
  CHECK(error_of(R"({"command":"nope"})").find("/command") != std::string::npos);
}

TEST_CASE("subcommand must match the config") {
  CHECK(error_of(R"({"command":"ghs-check","measure":{"kind":"bernoulli"}})", "exact").find("subcommand") !=
        std::string::npos);
  const ExperimentConfig c =
      parse_config_text(R"({"measure":{"kind":"bernoulli"}})", "ghs-check");
  CHECK(c.command == "ghs-check");
}

TEST_CASE("flags override config fields") {
  Overrides o;
  o.seed = 99;
  o.workers = 3;
  o.out = "elsewhere";
  const ExperimentConfig c =
      parse_config_text(R"({"command":"ghs-check","measure":{"kind":"bernoulli"},"seed":5})", "", o);
  CHECK(c.effective.at("seed").get<int>() == 99);
  CHECK(c.effective.at("workers").get<int>() == 3);
  CHECK(c.effective.at("out").get<std::string>() == "elsewhere");
}

TEST_CASE("rates recipe for the critical point parses") {
  const ExperimentConfig c = parse_config_text(R"({
    "command": "rates", "measure": {"kind": "bernoulli"}, "beta": 1.0,
    "n_grid": [4096, 8192, 16384, 32768], "method": "exact"})");
  CHECK(c.effective.at("metric") == "kolmogorov");
  CHECK(c.effective.at("target_mode") == "auto");
  CHECK(c.effective.at("mc_samples").get<int>() == 100000);
}

TEST_CASE("schema lists every command") {
  const Json& s = config_schema();
  for (const auto& name : command_names()) CHECK(s.dump().find(name) != std::string::npos);
}

TEST_CASE("analyze-measure on the three-state measure") {
  const fs::path out = scratch("analyze");
  Overrides o;
  o.out = out.string();
  const ExperimentConfig c =
      parse_config_text(R"({"command":"analyze-measure","measure":{"kind":"three_state"},"grid":1024})", "", o);
  std::ostringstream log;
  CHECK(execute(c, log) == kExitOk);
  const Json r = Json::parse(slurp(out / "result.json"));
  CHECK(r.at("beta_c").get<double>() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(r.at("ghs").at("holds").get<bool>());
  const Json m = Json::parse(slurp(out / "manifest.json"));
  CHECK(m.at("exit_code") == 0);
  CHECK(m.at("effective_config") == c.effective);
  CHECK(fs::exists(out / "config.json"));
  fs::remove_all(out);
}

TEST_CASE("exact over budget writes no fixture") {
  const fs::path out = scratch("budget");
  Overrides o;
  o.out = out.string();
  const ExperimentConfig c = parse_config_text(
      R"({"command":"exact","measure":{"kind":"three_state"},"beta":1.0,"n_grid":[16, 100000]})", "", o);
  std::ostringstream log;
  CHECK(execute(c, log) == kExitBudget);
  CHECK_FALSE(fs::exists(out / "fixtures"));
  CHECK(Json::parse(slurp(out / "manifest.json")).at("exit_code") == 3);
  fs::remove_all(out);
}

TEST_CASE("identical configs give byte-identical artifacts") {
  const std::string text =
      R"({"command":"simulate","measure":{"kind":"bernoulli"},"beta":0.5,"n":32,"samples":400,"chains":4,
          "bound_form":"normal_fixed_variance","constants":{"d1":0.627,"d2":1,"d3":1,"d4":3}})";
  std::string first;
  for (int workers : {1, 2}) {
    const fs::path out = scratch("det" + std::to_string(workers));
    Overrides o;
    o.out = out.string();
    o.workers = workers;
    std::ostringstream log;
    REQUIRE(execute(parse_config_text(text, "", o), log) == kExitOk);
    const std::string r = slurp(out / "result.json");
    CHECK_FALSE(r.empty());
    if (first.empty()) first = r;
    else CHECK(r == first);
    fs::remove_all(out);
  }
  for (const char* name : {"rates.csv", "rates.svg", "result.json"}) {
    std::string ref;
    for (int rep = 0; rep < 2; ++rep) {
      const fs::path out = scratch("rates" + std::to_string(rep));
      Overrides o;
      o.out = out.string();
      std::ostringstream log;
      REQUIRE(execute(parse_config_text(
                          R"({"command":"rates","measure":{"kind":"bernoulli"},"beta":0.5,"n_grid":[64,128,256,512]})",
                          "", o),
                      log) == kExitOk);
      const std::string s = slurp(out / name);
      if (rep == 0) ref = s;
      else CHECK(s == ref);
      fs::remove_all(out);
    }
  }
}
