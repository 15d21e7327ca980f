#include "spinbound/app.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <sstream>

#include "spinbound/error.hpp"

namespace spinbound {

using nlohmann::json;

namespace {

json vec_json(const Vec2& v) { return json::array({v.x(), v.y()}); }

json matrix_json(const CMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(json::array({m(i, k).real(), m(i, k).imag()}));
    rows.push_back(row);
  }
  return rows;
}

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

const ModelConfig& need_model(const RunConfig& cfg) {
  if (!cfg.model) throw ConfigError("this command needs a model section");
  return *cfg.model;
}

const MeasureConfig& need_measure(const RunConfig& cfg) {
  if (!cfg.measure) throw ConfigError("this command needs a measure section");
  return *cfg.measure;
}

json threshold_json(const ThresholdData& thr) {
  json j;
  j["kappa"] = thr.kappa;
  if (const auto* c = std::get_if<CircleSet>(&thr.minset)) {
    j["minset"] = {{"type", "circle"}, {"center", vec_json(c->center)}, {"radius", c->radius}};
  } else {
    const auto& pc = std::get<PointCloud>(thr.minset);
    json pts = json::array();
    for (const auto& p : pc.points) pts.push_back(vec_json(p));
    j["minset"] = {{"type", "points"}, {"points", pts}, {"tolerance", pc.tolerance}};
  }
  json qc = json::array();
  for (const auto& q : thr.quad_constants) qc.push_back({{"p0", vec_json(q.p0)}, {"c", q.c}});
  j["quad_constants"] = qc;
  return j;
}

CertifyOptions certify_options(const RunConfig& cfg) {
  CertifyOptions o;
  o.n = cfg.certify.n;
  o.a_schedule = cfg.certify.a_schedule;
  o.strategy = cfg.certify.point_strategy == "farthest_point" ? PointStrategy::FarthestPoint
                                                              : PointStrategy::Equispaced;
  o.form = cfg.certify.potential_form == "dropped" ? PotentialForm::Dropped : PotentialForm::Exact;
  o.search_budget = cfg.certify.search_budget;
  o.seed = cfg.seed;
  o.tol_def = cfg.certify.tol_def;
  o.exact.sharpness = cfg.certify.sharpness;
  o.exact.min_distance = cfg.certify.min_distance;
  return o;
}

json certificate_json(const CertificateResult& r, const CertifyOptions& o) {
  json j;
  j["N"] = r.n;
  j["potential_form"] = to_string(o.form);
  j["point_strategy"] = to_string(o.strategy);
  json pts = json::array();
  for (const auto& p : r.points) pts.push_back(vec_json(p));
  j["points"] = pts;
  j["precheck"] = {{"lambda_max", r.precheck.lambda_max}, {"negative_definite", r.precheck.negative_definite}};
  if (r.search) {
    json sp = json::array();
    for (const auto& p : r.search->points) sp.push_back(vec_json(p));
    j["search"] = {{"success", r.search->success},
                   {"lambda_max", r.search->lambda_max},
                   {"evaluations", r.search->evaluations},
                   {"points", sp}};
  } else {
    j["search"] = nullptr;
  }
  j["a_star"] = opt_json(r.a_star);
  j["lambda_max_Q"] = r.lambda_max_q;
  j["certified"] = r.certified;
  j["certified_count"] = r.certified_count;
  json diag = json::array();
  for (const auto& d : r.diagnostics)
    diag.push_back({{"a", d.a},
                    {"lambda_max_Q", d.lambda_max_q},
                    {"lambda_max_T", d.lambda_max_t},
                    {"lambda_max_W", d.lambda_max_w},
                    {"kinetic_diag_max", d.kinetic_diag_max},
                    {"kinetic_bound", d.kinetic_bound},
                    {"form_gap", opt_json(d.form_gap)},
                    {"negative_definite", d.negative_definite}});
  j["diagnostics"] = diag;
  j["matrices"] = {{"a", r.matrices_a}, {"T", matrix_json(r.kinetic)}, {"W", matrix_json(r.potential)}, {"Q", matrix_json(r.q)}};
  return j;
}

struct OracleRun {
  json report;
  std::string csv;
  SweepResult sweep;
};

OracleRun run_oracle(const RunConfig& cfg, const CouplingSpec& model, const ThresholdData& thr,
                     const RadonMeasureSpec& nu) {
  BoxSpec base;
  base.max_modes = cfg.oracle.max_modes;
  if (cfg.oracle.edge_tol) base.edge_tol = *cfg.oracle.edge_tol;
  OracleRun out;
  out.sweep = convergence_sweep(model, thr, nu, cfg.oracle.half_side, cfg.oracle.cutoffs, base);
  json runs = json::array();
  std::ostringstream csv;
  csv << "cutoff,index,eigenvalue,below\n";
  for (std::size_t i = 0; i < out.sweep.runs.size(); ++i) {
    const auto& r = out.sweep.runs[i];
    const double K = out.sweep.cutoffs[i];
    double worst = 0.0;
    for (const auto& p : r.pairing) worst = std::max(worst, p.gap);
    std::vector<double> below(r.eigenvalues.begin(), r.eigenvalues.begin() + static_cast<long>(r.count_below));
    runs.push_back({{"cutoff", K},
                    {"mode_count", r.mode_count},
                    {"count_below", r.count_below},
                    {"marginal", r.marginal},
                    {"threshold", r.threshold},
                    {"all_paired", r.all_paired()},
                    {"max_pair_gap", worst},
                    {"eigenvalues_below", below}});
    for (std::size_t k = 0; k < r.eigenvalues.size(); ++k)
      csv << format_csv_number(K) << "," << k << "," << format_csv_number(r.eigenvalues[k]) << ","
          << (k < r.count_below ? 1 : 0) << "\n";
  }
  out.report = {{"L", cfg.oracle.half_side},
                {"runs", runs},
                {"count_changes", out.sweep.count_changes},
                {"nondecreasing", out.sweep.nondecreasing},
                {"stable", out.sweep.stable}};
  out.csv = csv.str();
  return out;
}

std::pair<json, std::string> run_scan(const RunConfig& cfg, const RadonMeasureSpec& nu) {
  json profiles = json::array();
  std::ostringstream csv;
  csv << "angle,r,magnitude,fit\n";
  for (double angle : cfg.scan.angles) {
    const auto p = decay_scan(nu, angle, cfg.scan.r_max, cfg.scan.samples);
    profiles.push_back({{"angle", angle},
                        {"fitted_slope", p.fitted_slope},
                        {"fitted_intercept", p.fitted_intercept},
                        {"tail_level", p.tail_level},
                        {"tail_start", p.tail_start},
                        {"classification", to_string(p.classification)}});
    for (std::size_t i = 0; i < p.radii.size(); ++i) {
      const double r = p.radii[i];
      const double fit = std::exp(p.fitted_intercept + p.fitted_slope * std::log(r));
      csv << format_csv_number(angle) << "," << format_csv_number(r) << "," << format_csv_number(p.magnitudes[i])
          << "," << format_csv_number(fit) << "\n";
    }
  }
  return {profiles, csv.str()};
}

std::pair<json, std::string> run_fourier(const RunConfig& cfg, const RadonMeasureSpec& nu) {
  const auto grid = parse_grid(cfg.fourier.grid);
  const Vec2 dir(std::cos(cfg.fourier.angle), std::sin(cfg.fourier.angle));
  json rows = json::array();
  std::ostringstream csv;
  csv << "p,px,py,re,im,abs\n";
  for (double s : grid) {
    const Vec2 p = s * dir;
    const cplx v = fourier(nu, p);
    rows.push_back({{"p", s}, {"re", v.real()}, {"im", v.imag()}});
    csv << format_csv_number(s) << "," << format_csv_number(p.x()) << "," << format_csv_number(p.y()) << ","
        << format_csv_number(v.real()) << "," << format_csv_number(v.imag()) << ","
        << format_csv_number(std::abs(v)) << "\n";
  }
  return {json{{"angle", cfg.fourier.angle}, {"grid", cfg.fourier.grid}, {"values", rows}}, csv.str()};
}

}  // namespace

std::optional<Command> parse_command(const std::string& name) {
  if (name == "certify") return Command::Certify;
  if (name == "oracle") return Command::Oracle;
  if (name == "scan-decay") return Command::ScanDecay;
  if (name == "fourier") return Command::Fourier;
  if (name == "report") return Command::Report;
  return std::nullopt;
}

std::string to_string(Command c) {
  switch (c) {
    case Command::Certify: return "certify";
    case Command::Oracle: return "oracle";
    case Command::ScanDecay: return "scan-decay";
    case Command::Fourier: return "fourier";
    case Command::Report: return "report";
  }
  return "unknown";
}

std::string format_csv_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

RunOutcome run(Command command, const RunConfig& cfg) {
  using clock = std::chrono::steady_clock;
  RunOutcome out;
  json timing = json::object();
  auto timed = [&](const char* name, auto&& body) {
    const auto t0 = clock::now();
    body();
    timing[name] = std::chrono::duration<double>(clock::now() - t0).count();
  };

  out.report["schema"] = kReportSchema;
  out.report["command"] = to_string(command);
  out.report["config"] = config_to_json(cfg);

  const bool wants_model = command == Command::Certify || command == Command::Oracle || command == Command::Report;
  const RadonMeasureSpec nu = build_measure(need_measure(cfg));
  std::optional<CouplingSpec> model;
  ThresholdData thr;
  if (wants_model) {
    model = build_model(need_model(cfg));
    timed("threshold", [&] { thr = threshold(*model); });
    out.report["threshold"] = threshold_json(thr);
  }

  std::optional<CertificateResult> cert;
  if (command == Command::Certify || command == Command::Report) {
    const auto opts = certify_options(cfg);
    timed("certify", [&] { cert = certify(*model, thr, nu, opts); });
    out.report["certificate"] = certificate_json(*cert, opts);
    out.exit_code = cert->certified ? kExitSuccess : kExitNotCertified;
  }
  std::optional<OracleRun> oracle;
  if (command == Command::Oracle || command == Command::Report) {
    timed("oracle", [&] { oracle = run_oracle(cfg, *model, thr, nu); });
    out.report["oracle"] = oracle->report;
    out.tables["eigenvalues"] = oracle->csv;
    if (command == Command::Oracle) out.exit_code = oracle->sweep.stable ? kExitSuccess : kExitNotCertified;
  }
  if (command == Command::ScanDecay || command == Command::Report) {
    timed("scan", [&] {
      auto [j, csv] = run_scan(cfg, nu);
      out.report["decay"] = j;
      out.tables["profile"] = csv;
    });
  }
  if (command == Command::Fourier || command == Command::Report) {
    timed("fourier", [&] {
      auto [j, csv] = run_fourier(cfg, nu);
      out.report["fourier"] = j;
      out.tables["fourier"] = csv;
    });
  }
  if (command == Command::Report) {
    const std::size_t oracle_count = oracle->sweep.runs.back().count_below;
    const bool consistent = cert->certified_count <= oracle_count;
    out.report["soundness"] = {{"certified_count", cert->certified_count},
                               {"oracle_count", oracle_count},
                               {"oracle_stable", oracle->sweep.stable},
                               {"consistent", consistent}};
    if (!(cert->certified && oracle->sweep.stable && consistent)) out.exit_code = kExitNotCertified;
  }
  if (cfg.output.timing) out.report["timing"] = timing;
  return out;
}

}  // namespace spinbound
