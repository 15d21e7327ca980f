#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "spinbound/measure.hpp"
#include "spinbound/model.hpp"
#include "spinbound/types.hpp"

namespace spinbound {

/// Periodic box (-L, L)^2 with plane-wave modes k in (pi/L) Z^2, |k| <= K.
struct BoxSpec {
  double half_side = 12.0;
  double cutoff = 6.0;
  /// Eigenvalues in [kappa - edge_tol, kappa) are marginal and not counted; negative means
  /// the default 1e-4 |kappa|.
  double edge_tol = -1.0;
  std::size_t max_modes = 4000;
};

PointList box_modes(const BoxSpec& box);

/// Galerkin matrix of H0 + nu on the modes, index 2 m + s for mode m and spin s.
CMatrix assemble(const CouplingSpec& model, const RadonMeasureSpec& nu, const BoxSpec& box);

struct KramersPair {
  std::size_t index;
  std::optional<std::size_t> partner;
  double gap;  // relative gap to the partner, or to the nearest neighbour when unpaired
};

struct SpectrumResult {
  std::vector<double> eigenvalues;  // ascending
  std::size_t count_below = 0;
  std::size_t marginal = 0;
  std::size_t mode_count = 0;
  double threshold = 0.0;  // kappa - edge_tol
  std::vector<KramersPair> pairing;

  bool all_paired() const;
};

/// Dense Hermitian eigenvalues, the count below kappa - edge_tol and greedy Kramers pairing
/// (relative gap < pair_tol) of the counted eigenvalues.
SpectrumResult eigen_count_below(const ThresholdData& thr, const CMatrix& matrix, const BoxSpec& box,
                                 double pair_tol = 1e-6);

struct SweepResult {
  std::vector<double> cutoffs;
  std::vector<SpectrumResult> runs;
  std::vector<long> count_changes;  // count(K_{i+1}) - count(K_i)
  bool nondecreasing = true;
  bool stable = false;  // equal counts at the two largest cutoffs
};

SweepResult convergence_sweep(const CouplingSpec& model, const ThresholdData& thr,
                              const RadonMeasureSpec& nu, double half_side,
                              const std::vector<double>& cutoffs, const BoxSpec& base = {});

}  // namespace spinbound
