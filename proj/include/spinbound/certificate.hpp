#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "spinbound/fhat.hpp"
#include "spinbound/measure.hpp"
#include "spinbound/model.hpp"
#include "spinbound/types.hpp"

namespace spinbound {

/// Trial spinors Psi_j with momentum profile u_-(p) fhat_a(|p - p_j|).
struct TrialBasis {
  PointList points;
  double a = 0.4;
  std::shared_ptr<const FhatProfile> profile;
};

/// Validates that points lie on the minimum set and are pairwise separated by > 1e-6.
TrialBasis make_trial_basis(const CouplingSpec& model, const ThresholdData& thr, PointList points,
                            double a);

enum class PointStrategy { Equispaced, FarthestPoint };
enum class PotentialForm { Exact, Dropped };

std::string to_string(PointStrategy s);
std::string to_string(PotentialForm f);

PointList select_points(const MinSet& minset, std::size_t n, PointStrategy strategy);

struct Definiteness {
  double lambda_max = 0.0;
  bool negative_definite = false;
};

/// negative_definite iff lambda_max < -tol_rel * max(1, |M|_F).
Definiteness definiteness(const CMatrix& m, double tol_rel = 1e-8);

struct DefiniteSearch {
  PointList points;
  double lambda_max = 0.0;
  bool success = false;
  std::size_t evaluations = 0;
};

/// Searches the minimum set for points whose transform matrix is negative definite: starts
/// from the equispaced / farthest-point choice, then coordinate moves and random restarts.
DefiniteSearch find_definite_points(const RadonMeasureSpec& nu, const MinSet& minset,
                                    std::size_t n, std::size_t budget, std::uint64_t seed = 1);

/// T_jk = \int (lambda_-(p) - kappa) fhat(|p - p_j|) fhat(|p - p_k|) dp.
CMatrix kinetic_matrix(const CouplingSpec& model, const ThresholdData& thr,
                       const TrialBasis& basis);

/// W_jk = \int exp(-i <p_j - p_k, x>) |f_a(x)|^2 nu(dx).
CMatrix potential_matrix_dropped(const RadonMeasureSpec& nu, const TrialBasis& basis);

struct ExactFormSettings {
  /// The momentum cutoff width w satisfies w * dist(support, 0) >= sharpness.
  double sharpness = 8.0;
  /// Distances to the origin below this are clamped (accuracy degrades there).
  double min_distance = 0.5;
  std::size_t cap = kNodeCap;
};

/// W_jk = \int <Psi_j(x), Psi_k(x)> nu(dx) with the full band spinor u_-(p).
CMatrix potential_matrix_exact(const CouplingSpec& model, const RadonMeasureSpec& nu,
                               const TrialBasis& basis, const ExactFormSettings& settings = {});

struct WidthDiagnostics {
  double a = 0.0;
  double lambda_max_q = 0.0;
  double lambda_max_t = 0.0;
  double lambda_max_w = 0.0;
  double kinetic_diag_max = 0.0;
  /// max_j (pi/2) c(p_j) a
  double kinetic_bound = 0.0;
  /// max_jk |W_exact - W_dropped| (exact form only)
  std::optional<double> form_gap;
  bool negative_definite = false;
};

struct CertifyOptions {
  std::size_t n = 1;
  std::vector<double> a_schedule{0.4, 0.2, 0.1, 0.05, 0.025};
  PointStrategy strategy = PointStrategy::Equispaced;
  PotentialForm form = PotentialForm::Exact;
  std::size_t search_budget = 200;
  std::uint64_t seed = 1;
  double tol_def = 1e-8;
  ExactFormSettings exact;
};

struct CertificateResult {
  std::size_t n = 0;
  PointList points;
  Definiteness precheck;
  std::optional<DefiniteSearch> search;
  std::optional<double> a_star;
  double lambda_max_q = 0.0;
  bool certified = false;
  std::size_t certified_count = 0;
  std::vector<WidthDiagnostics> diagnostics;
  /// Matrices at a_star, or at the width with the smallest lambda_max(Q).
  double matrices_a = 0.0;
  CMatrix kinetic, potential, q;
};

CertificateResult certify(const CouplingSpec& model, const ThresholdData& thr,
                          const RadonMeasureSpec& nu, const CertifyOptions& options);

}  // namespace spinbound
