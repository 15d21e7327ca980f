#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>

#include "doctest.h"
#include "oracles.hpp"
#include "spinbound/app.hpp"
#include "spinbound/error.hpp"

using namespace spinbound;

namespace {

const char* kCircle = R"({"model":{"type":"rashba","alpha":2.0},
  "measure":{"type":"curve","curve":{"type":"circle","center":[0,0],"radius":1.0},"weight":-1.0},
  "certify":{"N":4,"a_schedule":[0.4,0.2,0.1,0.05]}})";

std::string quick_certify(const std::string& measure, const std::string& form = "dropped") {
  return R"({"model":{"type":"rashba","alpha":2.0},"measure":)" + measure +
         R"(,"certify":{"N":1,"a_schedule":[0.4,0.2],"potential_form":")" + form + R"("}})";
}

const char* kWell = R"({"type":"density","density":"gaussian_well","depth":2.0,"width":1.0,
  "center":[0,0],"box":{"lo":[-9,-9],"hi":[9,9]}})";

int run_binary(const std::string& args) {
  const int status = std::system((std::string(SPINBOUND_EXE) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string write_temp(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / ("spinbound_test_" + name);
  std::ofstream(path) << text;
  return path.string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("config examples") {
  const auto cfg = parse_config(kCircle);
  REQUIRE(cfg.model.has_value());
  CHECK(cfg.model->type == "rashba");
  CHECK(cfg.model->alpha == 2.0);
  CHECK(cfg.certify.n == 4);
  CHECK(cfg.certify.a_schedule == std::vector<double>{0.4, 0.2, 0.1, 0.05});
  CHECK(cfg.certify.potential_form == "exact");
  CHECK(cfg.seed == 0);

  CHECK_THROWS_AS(parse_config(R"({"model":{"type":"rashba"}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"certify":{"a_schedule":[3.0]}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"certify":{"a_schedule":[0.1, 0.2]}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"certify":{"a_schedule":[]}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"model":{"type":"rashba","alpha":2,"beta":1}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"colour":1})"), ConfigError);
  CHECK_THROWS_AS(parse_config("{not json"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"measure":{"type":"curve","curve":{"type":"segment","from":[0,0],"to":[0,0]},"weight":1}})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"fourier":{"grid":"1:0:0.1"}})"), ConfigError);
}

TEST_CASE("validation lists every problem") {
  try {
    parse_config(R"({"model":{"type":"rashba"},"certify":{"N":0,"a_schedule":[3.0]},"oracle":{"L":-1}})");
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("missing alpha") != std::string::npos);
    CHECK(msg.find("certify.N") != std::string::npos);
    CHECK(msg.find("a outside (0, 2]") != std::string::npos);
    CHECK(msg.find("oracle.L") != std::string::npos);
  }
}

TEST_CASE("config round trip") {
  const std::string text = R"({"model":{"type":"custom","terms":[{"coef":[0.3,-0.2],"power":1,"winding":1},
      {"coef":0.1,"power":0.5,"winding":-2}],"a_growth":0.4,"r_growth":3},
    "measure":{"type":"sum","terms":[
      {"type":"curve","curve":{"type":"sampled","nodes":[[0,0],[1,0.5],[2,0.1]],"closed":false},"weight":-0.7},
      {"type":"density","density":"grid","nx":2,"ny":3,"values":[0,-1,-2,-3,-4,-0.1],"box":{"lo":[0,0],"hi":[1,2]}},
      {"type":"zero"}]},
    "certify":{"N":3,"a_schedule":[0.3,0.1],"point_strategy":"farthest_point","potential_form":"dropped"},
    "oracle":{"L":9.5,"cutoffs":[2,3.5],"edge_tol":1e-5},
    "scan":{"angles":[0.1,1.3],"r_max":40,"samples":800},
    "fourier":{"grid":"0:3:0.5","angle":0.25},
    "output":{"report":"r.json","timing":true},
    "seed":17})";
  const auto a = parse_config(text);
  const auto b = parse_config(serialize_config(a));
  CHECK(a == b);
  CHECK(serialize_config(a) == serialize_config(b));
  CHECK(parse_config(serialize_config(parse_config(kCircle))) == parse_config(kCircle));
}

TEST_CASE("built measures and models follow the config") {
  auto cfg = parse_config(R"({"model":{"type":"custom","terms":[{"coef":[0,1],"power":1,"winding":1}]},
    "measure":{"type":"density","density":"grid","nx":2,"ny":2,"values":[-1,-1,-1,-1],"box":{"lo":[0,0],"hi":[2,1]}}})");
  const auto nu = build_measure(*cfg.measure);
  CHECK(std::abs(total_mass(nu) + 2.0) < 1e-12);
  CHECK(nu.nonpositive());
  const auto model = build_model(*cfg.model);
  CHECK(std::abs(coupling_value(model, Vec2(0.0, 2.0)) - cplx(-2.0, 0.0)) < 1e-14);
  const auto well = build_measure(parse_config(std::string(R"({"measure":)") + kWell + "}").measure.value());
  CHECK(std::abs(total_mass(well) + 4.0 * kPi) < 1e-8);
}

TEST_CASE("floats keep 17 significant digits") {
  const std::string s = write_json(nlohmann::json{{"x", 0.1}, {"y", 1.0}, {"n", 3}});
  CHECK(s.find("0.10000000000000001") != std::string::npos);
  CHECK(s.find("1.0") != std::string::npos);
  CHECK(s.find("\"n\": 3") != std::string::npos);
  CHECK(format_csv_number(0.1) == "0.1");
}

TEST_CASE("fourier table on the unit circle") {
  auto cfg = parse_config(kCircle);
  cfg.fourier.grid = "0:2:1";
  const auto out = run(Command::Fourier, cfg);
  const auto& rows = out.report["fourier"]["values"];
  REQUIRE(rows.size() == 3);
  for (int i = 0; i < 3; ++i)
    CHECK(std::abs(rows[i]["re"].get<double>() + oracle::bessel_j0_series(i)) < 1e-10);
  CHECK(std::abs(rows[1]["re"].get<double>() + 0.76520) < 1e-5);
  CHECK(std::abs(rows[2]["re"].get<double>() + 0.22389) < 1e-5);
  CHECK(out.tables.at("fourier").rfind("p,px,py,re,im,abs\n", 0) == 0);
  CHECK(out.exit_code == kExitSuccess);
}

TEST_CASE("reports are deterministic and carry the schema tag") {
  auto cfg = parse_config(quick_certify(kWell));
  const auto a = write_json(run(Command::Certify, cfg).report);
  const auto b = write_json(run(Command::Certify, cfg).report);
  CHECK(a == b);
  const auto report = nlohmann::json::parse(a);
  CHECK(report["schema"] == kReportSchema);
  CHECK(report["certificate"]["certified"] == true);
  CHECK_FALSE(report.contains("timing"));
  cfg.output.timing = true;
  CHECK(run(Command::Certify, cfg).report.contains("timing"));
}

TEST_CASE("missing sections are configuration errors at run time") {
  CHECK_THROWS_AS(run(Command::Certify, parse_config(R"({"measure":{"type":"zero"}})")), ConfigError);
  CHECK_THROWS_AS(run(Command::Fourier, parse_config(R"({"model":{"type":"rashba","alpha":1}})")), ConfigError);
}

TEST_CASE("exit-code contract of the binary") {
  const auto zero = write_temp("zero.json", quick_certify(R"({"type":"zero"})"));
  const auto well = write_temp("well.json", quick_certify(kWell));
  const auto bad = write_temp("bad.json", R"({"certify":{"a_schedule":[3.0]}})");
  // a density reaching the origin needs more exact-form nodes than the cap allows
  const auto heavy = write_temp("heavy.json", quick_certify(kWell, "exact"));
  const auto report = (std::filesystem::temp_directory_path() / "spinbound_test_report.json").string();

  CHECK(run_binary("certify -c " + well + " -o " + report) == kExitSuccess);
  CHECK(nlohmann::json::parse(slurp(report))["certificate"]["certified_count"] == 1);
  CHECK(run_binary("certify -c " + zero + " -o " + report) == kExitNotCertified);
  CHECK(run_binary("certify -c " + bad) == kExitConfig);
  CHECK(run_binary("certify -c /nonexistent/config.json") == kExitConfig);
  CHECK(run_binary("certify") == kExitConfig);
  CHECK(run_binary("launch -c " + well) == kExitConfig);
  CHECK(run_binary("certify -c " + heavy) == kExitNumerical);
  const auto csv = (std::filesystem::temp_directory_path() / "spinbound_test_nuhat.csv").string();
  CHECK(run_binary("fourier -c " + well + " --grid 0:1:0.5 --angle 0 -o " + csv) == kExitSuccess);
  CHECK(slurp(csv).rfind("p,px,py,re,im,abs\n", 0) == 0);
  CHECK(run_binary("fourier -c " + well + " --grid 1:0:0.5") == kExitConfig);
}
