#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "spinbound/certificate.hpp"
#include "spinbound/measure.hpp"
#include "spinbound/model.hpp"
#include "spinbound/oracle.hpp"

namespace spinbound {

using Pair = std::array<double, 2>;

/// One term coef |p|^power e^{i winding theta} of a custom coupling.
struct CouplingTerm {
  Pair coef{0.0, 0.0};  // real, imaginary
  double power = 1.0;
  int winding = 0;
  bool operator==(const CouplingTerm&) const = default;
};

struct ModelConfig {
  std::string type;  // rashba | dresselhaus | custom
  double alpha = 0.0;
  std::vector<CouplingTerm> terms;
  double a_growth = 0.5;
  double r_growth = 1.0;
  bool operator==(const ModelConfig&) const = default;
};

struct CurveConfig {
  std::string type;  // circle | segment | sampled
  Pair center{0.0, 0.0};
  double radius = 0.0;
  Pair from{0.0, 0.0}, to{0.0, 0.0};
  std::vector<Pair> nodes;
  bool closed = false;
  bool operator==(const CurveConfig&) const = default;
};

struct MeasureConfig {
  std::string type;  // zero | curve | density | sum
  CurveConfig curve;
  double weight = 0.0;
  std::string density;  // gaussian_well | grid
  double depth = 0.0, width = 1.0;
  Pair center{0.0, 0.0};
  Pair box_lo{0.0, 0.0}, box_hi{0.0, 0.0};
  std::size_t nx = 0, ny = 0;
  std::vector<double> values;  // row-major, y slowest
  std::vector<MeasureConfig> terms;
  bool operator==(const MeasureConfig&) const = default;
};

struct CertifyConfig {
  std::size_t n = 4;
  std::vector<double> a_schedule{0.4, 0.2, 0.1, 0.05, 0.025};
  std::string point_strategy = "equispaced";
  std::string potential_form = "exact";
  std::size_t search_budget = 200;
  double tol_def = 1e-8;
  double sharpness = 8.0;
  double min_distance = 0.5;
  bool operator==(const CertifyConfig&) const = default;
};

struct OracleConfig {
  double half_side = 12.0;
  std::vector<double> cutoffs{5.0, 6.0};
  std::optional<double> edge_tol;
  std::size_t max_modes = 4000;
  bool operator==(const OracleConfig&) const = default;
};

struct ScanConfig {
  std::vector<double> angles{0.0};
  double r_max = 60.0;
  std::size_t samples = 2400;
  bool operator==(const ScanConfig&) const = default;
};

struct FourierConfig {
  std::string grid = "0:10:0.1";
  double angle = 0.0;
  bool operator==(const FourierConfig&) const = default;
};

struct OutputConfig {
  std::string report;
  std::string eigenvalues;
  std::string profile;
  std::string fourier;
  bool timing = false;
  bool operator==(const OutputConfig&) const = default;
};

struct RunConfig {
  std::optional<ModelConfig> model;
  std::optional<MeasureConfig> measure;
  CertifyConfig certify;
  OracleConfig oracle;
  ScanConfig scan;
  FourierConfig fourier;
  OutputConfig output;
  std::uint64_t seed = 0;
  bool operator==(const RunConfig&) const = default;
};

/// Validated configuration; throws ConfigError listing every problem found.
RunConfig parse_config(const std::string& text);
/// JSON text with every field explicit.
std::string serialize_config(const RunConfig& config);
nlohmann::json config_to_json(const RunConfig& config);

/// JSON text with floats at 17 significant digits and sorted keys.
std::string write_json(const nlohmann::json& value, int indent = 2);

CouplingSpec build_model(const ModelConfig& config);
RadonMeasureSpec build_measure(const MeasureConfig& config);

/// "lo:hi:step" -> lo, lo + step, ... <= hi.
std::vector<double> parse_grid(const std::string& text);

}  // namespace spinbound
