#pragma once

// Transmission eigenvalues as zeros of the per-mode difference
// d(lambda) = f_n(lambda) - f(lambda), plus shared poles of f and f_n
// (singular eigenvalues).

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "itelab/dtn.hpp"
#include "itelab/error.hpp"
#include "itelab/medium.hpp"
#include "itelab/mode.hpp"
#include "itelab/spectra.hpp"

namespace itelab {

enum class IteKind { regular, singular };

inline const char* kind_name(IteKind k) { return k == IteKind::regular ? "regular" : "singular"; }

struct IteRecord {
  double lambda = 0.0;
  ModeIndex mode{};
  int multiplicity = 1;
  IteKind kind = IteKind::regular;
  double residual = 0.0;  // |d| at the root, or the pole coincidence gap
};

struct LocateOptions {
  double max_step = 0.05;           // h_scan cap
  double gap_fraction = 0.1;        // h_scan <= gap_fraction * pole gap
  double root_tol = 1e-10;          // relative bracket width
  double coincidence_tol = 1e-8;    // shared-pole tolerance, relative to max(1, lambda)
  int subdivision_retries = 2;
  DtnOptions dtn{};
};

/// Everything one mode contributes on [a, b]: both pole ladders, regular
/// roots of d and shared poles.
struct ModeScan {
  ModeIndex mode{};
  double a = 0.0, b = 0.0;
  std::vector<double> free_poles;
  std::vector<double> refracted_poles;
  std::vector<double> shared_poles;
  std::vector<IteRecord> records;  // sorted by lambda
};

namespace detail {

inline bool is_trivial_medium(const RadialMedium& m) {
  return m.is_constant() && m.constant_value() == 1.0 && !m.has_obstacle();
}

inline double diff_value(const RadialMedium& m, const ModeIndex& mode, double lambda,
                         const DtnOptions& opt) {
  return dtn_diff<double>(m, mode, lambda, opt).value;
}

// Sign of the pole-free cross function d * u * u_n (positive scalings).
inline int cross_sign(const RadialMedium& m, const ModeIndex& mode, double lambda,
                      const ode::Options& opt) {
  const auto p = ode::solve_pair<double>(m, mode, lambda, opt);
  return p.cross > 0 ? 1 : (p.cross < 0 ? -1 : 0);
}

// Bisection on a sign function; returns the midpoint of the final bracket.
template <class SignFn>
double bisect(SignFn&& sign, double lo, double hi, int slo, double rel_tol) {
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (hi - lo <= rel_tol * std::abs(mid)) break;
    const int s = sign(mid);
    if (s == 0) return mid;
    if (s == slo) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

inline std::vector<double> merge_sorted(std::vector<double> a, const std::vector<double>& b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  return a;
}

// Roots of d on the pole-free open interval (lo, hi) with grid step h.
inline std::vector<double> scan_interval(const RadialMedium& m, const ModeIndex& mode, double lo,
                                         double hi, bool lo_is_pole, bool hi_is_pole, double h,
                                         const LocateOptions& opt) {
  std::vector<double> roots;
  const double len = hi - lo;
  if (!(len > 0.0)) return roots;
  const double guard_lo = lo_is_pole ? std::min(1e-7 * std::max(1.0, lo), 1e-3 * len) : 0.0;
  const double guard_hi = hi_is_pole ? std::min(1e-7 * std::max(1.0, hi), 1e-3 * len) : 0.0;
  const double start = lo + guard_lo, stop = hi - guard_hi;
  const int cells = std::max(1, static_cast<int>(std::ceil((stop - start) / h)));
  std::vector<double> xs(cells + 1);
  for (int j = 0; j <= cells; ++j) xs[j] = j == cells ? stop : start + (stop - start) * j / cells;

  auto sgn = [&](double x) {
    const double v = diff_value(m, mode, x, opt.dtn);
    return v > 0 ? 1 : (v < 0 ? -1 : 0);
  };
  int s_prev = sgn(xs[0]);
  if (s_prev == 0 && !lo_is_pole) roots.push_back(xs[0]);
  for (int j = 1; j <= cells; ++j) {
    const int s = sgn(xs[j]);
    if (s == 0) {
      roots.push_back(xs[j]);
    } else if (s_prev != 0 && s != s_prev) {
      double r = bisect(sgn, xs[j - 1], xs[j], s_prev, opt.root_tol * 1e-3);
      const bool near_pole = (lo_is_pole && r - lo < 1e-6 * std::max(1.0, lo)) ||
                             (hi_is_pole && hi - r < 1e-6 * std::max(1.0, hi));
      if (near_pole) {
        // d is large next to a pole; refine on the pole-free cross function.
        auto cs = [&](double x) { return cross_sign(m, mode, x, opt.dtn.ode); };
        r = bisect(cs, xs[j - 1], xs[j], cs(xs[j - 1]), opt.root_tol * 1e-3);
      }
      roots.push_back(r);
    }
    s_prev = s;
  }
  return roots;
}

inline double min_spacing(const std::vector<double>& xs) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < xs.size(); ++i) best = std::min(best, xs[i] - xs[i - 1]);
  return best;
}

}  // namespace detail

/// Pole-partitioned scan of one mode on [a, b].
inline ModeScan scan_mode(const RadialMedium& m, const ModeIndex& mode, double a, double b,
                          const LocateOptions& opt = {}) {
  if (detail::is_trivial_medium(m))
    throw Error(ErrorCode::degenerate_medium, "n == 1 without obstacle: d vanishes identically");
  if (!(a > 0.0 && b > a)) throw Error(ErrorCode::config_error, "need 0 < a < b");

  ModeScan out;
  out.mode = mode;
  out.a = a;
  out.b = b;
  for (const auto& p : dirichlet_poles(m, Equation::free, mode, a, b, false, opt.root_tol, opt.dtn))
    out.free_poles.push_back(p.lambda);
  for (const auto& p :
       dirichlet_poles(m, Equation::refracted, mode, a, b, false, opt.root_tol, opt.dtn))
    out.refracted_poles.push_back(p.lambda);

  // Shared poles become singular records and a single cut.
  std::vector<double> cuts;
  {
    std::size_t j = 0;
    for (double pf : out.free_poles) {
      while (j < out.refracted_poles.size() &&
             out.refracted_poles[j] < pf - opt.coincidence_tol * std::max(1.0, pf))
        ++j;
      if (j < out.refracted_poles.size() &&
          std::abs(out.refracted_poles[j] - pf) <= opt.coincidence_tol * std::max(1.0, pf)) {
        out.shared_poles.push_back(0.5 * (pf + out.refracted_poles[j]));
        IteRecord rec;
        rec.lambda = out.shared_poles.back();
        rec.mode = mode;
        rec.multiplicity = mode.multiplicity();
        rec.kind = IteKind::singular;
        rec.residual = std::abs(out.refracted_poles[j] - pf);
        out.records.push_back(rec);
      }
    }
    std::vector<double> all = detail::merge_sorted(out.free_poles, out.refracted_poles);
    for (double p : all) {
      if (!cuts.empty() && std::abs(p - cuts.back()) <= opt.coincidence_tol * std::max(1.0, p))
        continue;
      cuts.push_back(p);
    }
  }

  std::vector<double> edges{a};
  std::vector<bool> edge_is_pole{false};
  for (double p : cuts) {
    if (p <= a || p >= b) continue;
    edges.push_back(p);
    edge_is_pole.push_back(true);
  }
  edges.push_back(b);
  edge_is_pole.push_back(false);

  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const double lo = edges[i], hi = edges[i + 1];
    // gap: local inter-pole distance around this sub-interval.
    double gap = hi - lo;
    if (i > 0) gap = std::min(gap, lo - edges[i - 1]);
    if (i + 2 < edges.size()) gap = std::min(gap, edges[i + 2] - hi);
    double h = std::min(opt.max_step, opt.gap_fraction * gap);
    auto roots = detail::scan_interval(m, mode, lo, hi, edge_is_pole[i], edge_is_pole[i + 1], h, opt);
    int retry = 0;
    while (roots.size() > 1 && detail::min_spacing(roots) < 2.0 * h) {
      if (retry++ >= opt.subdivision_retries)
        throw Error(ErrorCode::grid_too_coarse,
                    "roots closer than twice the scan step in mode k=" + std::to_string(mode.k) +
                        " near lambda=" + std::to_string(lo));
      h *= 0.25;
      roots = detail::scan_interval(m, mode, lo, hi, edge_is_pole[i], edge_is_pole[i + 1], h, opt);
    }
    for (double r : roots) {
      IteRecord rec;
      rec.lambda = r;
      rec.mode = mode;
      rec.multiplicity = mode.multiplicity();
      rec.kind = IteKind::regular;
      rec.residual = std::abs(detail::diff_value(m, mode, r, opt.dtn));
      out.records.push_back(rec);
    }
  }
  std::sort(out.records.begin(), out.records.end(),
            [](const IteRecord& x, const IteRecord& y) { return x.lambda < y.lambda; });
  return out;
}

inline std::vector<IteRecord> locate_mode(const RadialMedium& m, const ModeIndex& mode, double a,
                                          double b, const LocateOptions& opt = {}) {
  return scan_mode(m, mode, a, b, opt).records;
}

/// Modes beyond ceil(R sqrt(max(n, 1) lambda)) carry no Dirichlet
/// eigenvalue below lambda in either problem.
inline int mode_cutoff(const RadialMedium& m, double lambda) {
  const double nmax = std::max(1.0, m.max_n());
  return static_cast<int>(std::ceil(m.outer_radius() * std::sqrt(nmax * std::max(lambda, 0.0))));
}

struct LocateAllResult {
  std::vector<IteRecord> records;  // sorted by (lambda, k)
  std::vector<ModeScan> scans;     // one per mode, k = 0..k_last
  int k_max = 0;                   // last mode expected to contribute
};

/// All eigenvalues on [a, b] over modes k <= k_max(b), with the last
/// `truncation_margin` modes required to be empty.
inline LocateAllResult locate_all_detailed(const RadialMedium& m, double a, double b,
                                           const LocateOptions& opt = {}, int k_max = -1,
                                           int max_raises = 4) {
  LocateAllResult out;
  out.k_max = k_max >= 0 ? k_max : mode_cutoff(m, b);
  int k = 0;
  for (int raise = 0;; ++raise) {
    const int last = out.k_max + truncation_margin;
    bool tail_clean = true;
    for (; k <= last; ++k) {
      out.scans.push_back(scan_mode(m, {m.dimension(), k}, a, b, opt));
      if (k > out.k_max && !out.scans.back().records.empty()) tail_clean = false;
    }
    if (tail_clean) break;
    if (raise >= max_raises)
      throw Error(ErrorCode::truncation_unsafe,
                  "eigenvalues persist in the last modes up to k=" + std::to_string(last));
    // Push the cutoff past the last populated mode and check a fresh tail.
    int last_populated = out.k_max;
    for (const auto& s : out.scans)
      if (!s.records.empty()) last_populated = std::max(last_populated, s.mode.k);
    out.k_max = last_populated;
  }
  for (const auto& s : out.scans)
    out.records.insert(out.records.end(), s.records.begin(), s.records.end());
  std::sort(out.records.begin(), out.records.end(), [](const IteRecord& x, const IteRecord& y) {
    return x.lambda != y.lambda ? x.lambda < y.lambda : x.mode.k < y.mode.k;
  });
  return out;
}

inline std::vector<IteRecord> locate_all(const RadialMedium& m, double a, double b,
                                         const LocateOptions& opt = {}) {
  return locate_all_detailed(m, a, b, opt).records;
}

/// Sum of multiplicities of records in (alpha, lambda].
inline long count_NT(const std::vector<IteRecord>& records, double alpha, double lambda) {
  long total = 0;
  for (const auto& r : records)
    if (r.lambda > alpha && r.lambda <= lambda) total += r.multiplicity;
  return total;
}

inline long count_NT(const RadialMedium& m, double lambda, double alpha,
                     const LocateOptions& opt = {}) {
  if (!(lambda > alpha)) return 0;
  return count_NT(locate_all(m, alpha, lambda, opt), alpha, lambda);
}

/// 0.9 x the smallest ground Dirichlet eigenvalue of the two problems
/// (attained in mode 0).
inline double choose_alpha(const RadialMedium& m) {
  const ModeIndex zero{m.dimension(), 0};
  return 0.9 * std::min(ground_eigenvalue(m, Equation::free, zero),
                        ground_eigenvalue(m, Equation::refracted, zero));
}

}  // namespace itelab
