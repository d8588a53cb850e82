#pragma once

// Per-mode eigenvalue branches mu_k(lambda) of sigma D (F - F_n) D, their
// negative count, and the bookkeeping that ties poles and zero crossings of
// the branches to the Dirichlet counting functions.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "itelab/dtn.hpp"
#include "itelab/error.hpp"
#include "itelab/ite.hpp"
#include "itelab/medium.hpp"
#include "itelab/mode.hpp"
#include "itelab/spectra.hpp"

namespace itelab {

enum class BranchStatus { regular, pole };

struct BranchSample {
  double lambda = 0.0;
  ModeIndex mode{};
  double mu = 0.0;
  BranchStatus status = BranchStatus::regular;
};

/// Exponent of (1 + kappa) in the branch weight: 1 for class B1, 3/2 for B2.
inline double weight_exponent(const BoundaryInfo& info) {
  return info.cls == BoundaryClass::b2 ? 1.5 : 1.0;
}

inline BranchSample mu(const RadialMedium& m, const ModeIndex& mode, double lambda,
                       const DtnOptions& opt = {}) {
  const auto info = validate(m);
  const int s = sigma(m);
  const auto d = dtn_diff<double>(m, mode, lambda, opt);
  BranchSample out;
  out.lambda = lambda;
  out.mode = mode;
  const double weight =
      std::pow(1.0 + mode.laplace_beltrami(m.outer_radius()), weight_exponent(info));
  out.mu = -s * weight * d.value;
  out.status = d.near_pole ? BranchStatus::pole : BranchStatus::regular;
  return out;
}

/// n^-(lambda): multiplicity-weighted number of modes with mu < 0. The mode
/// sum stops once k is past the Dirichlet cutoff and `truncation_margin`
/// consecutive modes are nonnegative; `min_k` forces a longer scan.
inline long negative_count(const RadialMedium& m, double lambda, const DtnOptions& opt = {},
                           int min_k = 0) {
  const int cutoff = std::max(mode_cutoff(m, lambda), min_k);
  const int cap = 4 * cutoff + 200;
  long total = 0;
  int positive_run = 0;
  for (int k = 0;; ++k) {
    if (k > cap)
      throw Error(ErrorCode::truncation_unsafe,
                  "branches still negative at k=" + std::to_string(cap));
    const ModeIndex mode{m.dimension(), k};
    const auto b = mu(m, mode, lambda, opt);
    if (b.mu < 0.0) {
      total += mode.multiplicity();
      positive_run = 0;
    } else {
      ++positive_run;
    }
    if (k >= cutoff && positive_run >= truncation_margin) break;
  }
  return total;
}

struct PoleEvent {
  double lambda = 0.0;
  ModeIndex mode{};
  int m_n = 0;        // multiplicity carried by the refracted pole (0 if absent)
  int m_0 = 0;        // same for the free pole
  long measured = 0;  // n^-(lambda0 + delta) - n^-(lambda0 - delta)
  long expected = 0;  // sigma (m_n - m_0)
  bool shared = false;
  bool holds = false;  // equality, or |measured - expected| <= multiplicity when shared
};

namespace detail {

struct Event {
  double lambda;
  int k;
  int kind;  // 0 free pole, 1 refracted pole, 2 shared pole, 3 root
};

inline std::vector<Event> collect_events(const LocateAllResult& all) {
  std::vector<Event> ev;
  for (const auto& s : all.scans) {
    for (double p : s.free_poles) ev.push_back({p, s.mode.k, 0});
    for (double p : s.refracted_poles) ev.push_back({p, s.mode.k, 1});
    for (const auto& r : s.records)
      if (r.kind == IteKind::regular) ev.push_back({r.lambda, s.mode.k, 3});
  }
  std::sort(ev.begin(), ev.end(), [](const Event& a, const Event& b) { return a.lambda < b.lambda; });
  return ev;
}

}  // namespace detail

/// One event per per-mode pole in [lo, hi], with the jump of n^- measured
/// over [lambda0 - delta, lambda0 + delta], delta = 1e-4 x local event gap.
inline std::vector<PoleEvent> jump_ledger(const RadialMedium& m, const LocateAllResult& all,
                                          double lo, double hi, const DtnOptions& opt = {}) {
  const int s = sigma(m);
  const auto events = detail::collect_events(all);
  std::vector<PoleEvent> out;
  for (const auto& scan : all.scans) {
    std::vector<std::pair<double, int>> poles;  // lambda, kind
    for (double p : scan.free_poles) poles.push_back({p, 0});
    for (double p : scan.refracted_poles) poles.push_back({p, 1});
    std::sort(poles.begin(), poles.end());
    for (std::size_t i = 0; i < poles.size(); ++i) {
      const double p = poles[i].first;
      if (p < lo || p > hi) continue;
      PoleEvent e;
      e.lambda = p;
      e.mode = scan.mode;
      const int mult = scan.mode.multiplicity();
      bool shared = false;
      for (double sp : scan.shared_poles)
        if (std::abs(sp - p) <= 1e-8 * std::max(1.0, p)) shared = true;
      if (shared) {
        // Report the shared pole once, from its free member.
        if (poles[i].second == 1) continue;
        e.m_0 = mult;
        e.m_n = mult;
        e.shared = true;
      } else if (poles[i].second == 0) {
        e.m_0 = mult;
      } else {
        e.m_n = mult;
      }
      e.expected = static_cast<long>(s) * (e.m_n - e.m_0);

      // Local gap to the nearest other event of any mode.
      double gap = std::numeric_limits<double>::infinity();
      for (const auto& ev : events) {
        if (ev.k == scan.mode.k && std::abs(ev.lambda - p) <= 1e-8 * std::max(1.0, p) &&
            ev.kind != 3)
          continue;
        gap = std::min(gap, std::abs(ev.lambda - p));
      }
      if (!std::isfinite(gap)) gap = std::max(1.0, p);
      const double delta = 1e-4 * gap;
      if (delta <= 1e-12 * std::max(1.0, p))
        throw Error(ErrorCode::window_too_wide,
                    "another event sits within the jump window at lambda=" + std::to_string(p));
      e.measured = negative_count(m, p + delta, opt) - negative_count(m, p - delta, opt);
      e.holds = e.shared ? std::abs(e.measured - e.expected) <= mult : e.measured == e.expected;
      out.push_back(e);
    }
  }
  std::sort(out.begin(), out.end(),
            [](const PoleEvent& a, const PoleEvent& b) { return a.lambda < b.lambda; });
  return out;
}

/// +1 when the branch enters mu < 0 at a regular root, -1 when it leaves,
/// 0 for a tangential touch.
inline int crossing_direction(const RadialMedium& m, const IteRecord& rec, double eps,
                              const DtnOptions& opt = {}) {
  const double below = mu(m, rec.mode, rec.lambda - eps, opt).mu;
  const double above = mu(m, rec.mode, rec.lambda + eps, opt).mu;
  if (below > 0 && above < 0) return 1;
  if (below < 0 && above > 0) return -1;
  return 0;
}

struct Checkpoint {
  double lambda = 0.0;
  long N = 0, Nn = 0, NT = 0;
  long nminus = 0, nminus_alpha = 0;
  long n1 = 0;  // sigma (N_n - N)
  long n2 = 0;  // signed zero crossings on (alpha, lambda]
  long residual = 0;  // n^-(lambda) - n^-(alpha) + sigma (N - N_n) - n2
  bool shared = false;
  long slack = 0;     // R(lambda) + n2 - lhs, inequality form (shared poles)
  bool holds = false;
  bool nt_ge_n2 = false;
  bool main_inequality = false;  // N_T >= sigma (N - N_n) - n^-(alpha)
};

struct CountingLedger {
  double alpha = 0.0;
  std::vector<Checkpoint> checkpoints;
  std::vector<PoleEvent> pole_events;
};

/// Signed crossing contributions of every regular record, computed once.
inline std::vector<int> crossing_directions(const RadialMedium& m, const LocateAllResult& all,
                                            const DtnOptions& opt = {}) {
  const auto events = detail::collect_events(all);
  std::vector<int> dirs;
  dirs.reserve(all.records.size());
  for (const auto& r : all.records) {
    if (r.kind != IteKind::regular) {
      dirs.push_back(0);
      continue;
    }
    double gap = std::max(1.0, r.lambda);
    for (const auto& ev : events)
      if (ev.k == r.mode.k && ev.lambda != r.lambda) gap = std::min(gap, std::abs(ev.lambda - r.lambda));
    dirs.push_back(crossing_direction(m, r, std::min(1e-6 * std::max(1.0, r.lambda), 1e-3 * gap), opt));
  }
  return dirs;
}

/// Evaluates the counting identity at lambda from a located record set that
/// covers (alpha, lambda].
inline Checkpoint identity_check(const RadialMedium& m, const LocateAllResult& all,
                                 const std::vector<int>& directions, double lambda, double alpha,
                                 long nminus_alpha, const DtnOptions& opt = {}) {
  const int s = sigma(m);
  Checkpoint c;
  c.lambda = lambda;
  c.N = count_N(m, lambda, opt.ode);
  c.Nn = count_Nn(m, lambda, opt.ode);
  c.nminus = lambda == alpha ? nminus_alpha : negative_count(m, lambda, opt);
  c.nminus_alpha = nminus_alpha;
  c.n1 = s * (c.Nn - c.N);
  long shared_dim = 0;
  for (std::size_t i = 0; i < all.records.size(); ++i) {
    const auto& r = all.records[i];
    if (r.lambda <= alpha || r.lambda > lambda) continue;
    c.NT += r.multiplicity;
    if (r.kind == IteKind::singular) {
      c.shared = true;
      shared_dim += r.multiplicity;
    } else {
      c.n2 += static_cast<long>(directions[i]) * r.multiplicity;
    }
  }
  const long lhs = c.nminus - c.nminus_alpha + s * (c.N - c.Nn);
  c.residual = lhs - c.n2;
  c.slack = shared_dim + c.n2 - lhs;
  c.holds = c.shared ? c.slack >= 0 : c.residual == 0;
  c.nt_ge_n2 = c.NT >= c.n2;
  c.main_inequality = c.NT >= s * (c.N - c.Nn) - c.nminus_alpha;
  return c;
}

/// Moves lambda off any located event by a small step so that counts and
/// signs are well defined there.
inline double safe_checkpoint(const LocateAllResult& all, double lambda) {
  const double tol = 1e-7 * std::max(1.0, lambda);
  for (int attempt = 0; attempt < 50; ++attempt) {
    bool clash = false;
    for (const auto& ev : detail::collect_events(all))
      if (std::abs(ev.lambda - lambda) < tol) clash = true;
    if (!clash) return lambda;
    lambda += 10.0 * tol;
  }
  return lambda;
}

/// Full ledger on (alpha, lambda_max] at the given checkpoints.
inline CountingLedger build_ledger(const RadialMedium& m, double alpha,
                                   const std::vector<double>& checkpoints,
                                   const LocateOptions& opt = {}, bool with_jumps = true) {
  CountingLedger ledger;
  ledger.alpha = alpha;
  const double top = checkpoints.empty() ? alpha : *std::max_element(checkpoints.begin(), checkpoints.end());
  if (!(top > alpha)) return ledger;
  const auto all = locate_all_detailed(m, alpha, top, opt);
  const auto dirs = crossing_directions(m, all, opt.dtn);
  const long na = negative_count(m, alpha, opt.dtn);
  for (double l : checkpoints) {
    const double safe = l <= alpha ? alpha : safe_checkpoint(all, l);
    ledger.checkpoints.push_back(identity_check(m, all, dirs, safe, alpha, na, opt.dtn));
  }
  if (with_jumps) ledger.pole_events = jump_ledger(m, all, alpha, top, opt.dtn);
  return ledger;
}

}  // namespace itelab
