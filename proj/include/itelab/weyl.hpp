#pragma once

// Lower-bound report for the transmission counting function: N_T against
// sigma (N - N_n) - n^-(alpha) and the volume term.

#include <cmath>
#include <numbers>
#include <vector>

#include "itelab/branch.hpp"
#include "itelab/ite.hpp"
#include "itelab/medium.hpp"
#include "itelab/spectra.hpp"

namespace itelab {

/// omega_d / (2 pi)^d with omega_d the volume of the unit ball.
inline double weyl_constant(int dimension) {
  using std::numbers::pi;
  return dimension == 2 ? 1.0 / (4.0 * pi) : (4.0 / 3.0 * pi) / (8.0 * pi * pi * pi);
}

struct WeylRow {
  double lambda = 0.0;
  long NT = 0;
  long N = 0;
  long Nn = 0;
  long sigma_diff = 0;     // sigma (N - N_n)
  long nminus_alpha = 0;
  double main_term = 0.0;  // weyl_constant * gamma * lambda^(d/2)
  bool inequality = false; // N_T >= sigma (N - N_n) - n^-(alpha)
  bool shared = false;     // a shared pole lies in (alpha, lambda]
};

struct WeylReport {
  double alpha = 0.0;
  double gamma = 0.0;
  int sigma = 1;
  std::vector<WeylRow> rows;
  LocateAllResult located;
};

inline WeylReport weyl_report(const RadialMedium& m, const std::vector<double>& checkpoints,
                              double alpha, const LocateOptions& opt = {}) {
  WeylReport rep;
  rep.alpha = alpha;
  rep.gamma = gamma(m);
  rep.sigma = sigma(m);
  double top = alpha;
  for (double l : checkpoints) top = std::max(top, l);
  if (top > alpha) rep.located = locate_all_detailed(m, alpha, top, opt);
  const long na = negative_count(m, alpha, opt.dtn);
  for (double l : checkpoints) {
    WeylRow row;
    row.lambda = l;
    row.nminus_alpha = na;
    row.main_term = weyl_constant(m.dimension()) * rep.gamma * std::pow(l, 0.5 * m.dimension());
    if (l > alpha) {
      const double safe = safe_checkpoint(rep.located, l);
      row.NT = count_NT(rep.located.records, alpha, safe);
      row.N = count_N(m, safe, opt.dtn.ode);
      row.Nn = count_Nn(m, safe, opt.dtn.ode);
      for (const auto& r : rep.located.records)
        if (r.kind == IteKind::singular && r.lambda > alpha && r.lambda <= safe) row.shared = true;
    }
    row.sigma_diff = rep.sigma * (row.N - row.Nn);
    row.inequality = row.NT >= row.sigma_diff - row.nminus_alpha;
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace itelab
