#include "stretchlat/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <tuple>

#include "stretchlat/detail/scaled.hpp"
#include "stretchlat/measure.hpp"

namespace stretchlat {

using detail::make_scaled;
using detail::ScaledDomain;
using detail::sd_contains;

namespace {

StretchFactor stretch_of(double a) { return StretchFactor::from_diag_unchecked({a, 1.0 / a}); }

// Membership of k in t*diag(a,1/a)*Omega, routed through the shared predicate
// so the sweep sees exactly the same boundary as count(). One domain is built
// up front and re-aimed per query; rescale_scaled rounds radii identically to
// a fresh make_scaled.
struct Predicate2D {
  mutable ScaledDomain S;
  double t;
  mutable int64_t evals = 0;

  Predicate2D(const BodySpec& body, double t_in)
      : S(make_scaled(body, std::vector<double>{1.0, 1.0}, t_in)), t(t_in) {}

  bool inside(double a, int64_t k1, int64_t k2) const {
    ++evals;
    const double diag[2] = {a, 1.0 / a};
    detail::rescale_scaled(S, std::span<const double>(diag, 2), t);
    const int64_t k[2] = {k1, k2};
    return sd_contains(S, std::span<const int64_t>(k, 2));
  }

  double sum(double a, int64_t k1, int64_t k2) const {
    ++evals;
    const double diag[2] = {a, 1.0 / a};
    detail::rescale_scaled(S, std::span<const double>(diag, 2), t);
    const int64_t k[2] = {k1, k2};
    return detail::membership_sum(S, std::span<const int64_t>(k, 2));
  }
};

struct Event {
  double a;
  int delta;  // +1 enter, -1 leave
};

// Adjacent-double bisection: pred(lo) != pred(hi); returns the double on the
// `want_hi_side` side of the located flip.
template <class Pred>
double bisect_flip(double lo, double hi, bool want_hi_side, const Pred& pred) {
  while (std::nextafter(lo, std::numeric_limits<double>::infinity()) < hi) {
    const double mid = std::midpoint(lo, hi);
    if (mid <= lo || mid >= hi) break;
    if (pred(mid) == want_hi_side)
      hi = mid;
    else
      lo = mid;
  }
  return want_hi_side ? hi : lo;
}

// Float minimizer of the membership sum near the analytic minimizer.
double golden_min(const Predicate2D& P, int64_t k1, int64_t k2, double lo, double hi) {
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
  double fc = P.sum(c, k1, k2), fd = P.sum(d, k1, k2);
  for (int iter = 0; iter < 120 && (hi - lo) > 1e-16 * std::fabs(lo); ++iter) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - gr * (hi - lo);
      fc = P.sum(c, k1, k2);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + gr * (hi - lo);
      fd = P.sum(d, k1, k2);
    }
  }
  return 0.5 * (lo + hi);
}

struct SweepResult {
  int64_t base = 0;  // count at a = 1/K
  std::vector<Event> events;
  bool complete = true;
};

// Membership switches of every candidate lattice point over a in [1/K, K].
// The membership sum of a fixed point is decreasing-then-increasing in a, so
// each point is inside on one interval and contributes at most one enter and
// one leave; tangencies degenerate to a single double.
SweepResult collect_events(const BodySpec& body, double t, double K, bool positive_only,
                           const Predicate2D& P, int64_t budget) {
  SweepResult R;
  const double aLo = 1.0 / K, aHi = K;
  const double p1 = body.p[0], p2 = body.p[1];
  const double b1 = body.b[0], b2 = body.b[1];
  const int64_t m1 = static_cast<int64_t>(std::floor(K * t * b1)) + 1;
  const int64_t m2 = static_cast<int64_t>(std::floor(K * t * b2)) + 1;
  const int64_t k_lo = positive_only ? 1 : 0;

  for (int64_t k1 = k_lo; k1 <= m1; ++k1) {
    for (int64_t k2 = k_lo; k2 <= m2; ++k2) {
      if (P.evals > budget) {
        R.complete = false;
        return R;
      }
      if (k1 == 0 && k2 == 0) {
        ++R.base;  // the origin never leaves
        continue;
      }
      // Analytic minimizer of g(a) = (k1/(t a b1))^{p1} + (k2 a/(t b2))^{p2}.
      double a_min;
      if (k1 == 0)
        a_min = aLo;
      else if (k2 == 0)
        a_min = aHi;
      else {
        const double alpha = std::pow(static_cast<double>(k1) / (t * b1), p1);
        const double beta = std::pow(static_cast<double>(k2) / (t * b2), p2);
        a_min = std::pow(alpha * p1 / (beta * p2), 1.0 / (p1 + p2));
        a_min = std::clamp(a_min, aLo, aHi);
      }

      const double s_min = P.sum(a_min, k1, k2);
      if (s_min > 1.0 + detail::kBoundaryBand) continue;  // outside for every a in the box

      double a_in = a_min;
      bool in_min = s_min < 1.0 - detail::kBoundaryBand;
      if (!in_min) {
        // Near-tangent: polish the float minimum, then let the exact arbiter
        // decide whether the point is ever inside.
        const double w = std::max(1e-5 * a_min, 1e-14);
        a_in = golden_min(P, k1, k2, std::max(aLo, a_min - w), std::min(aHi, a_min + w));
        in_min = P.inside(a_in, k1, k2);
        for (int step = 1; step <= 4 && !in_min; ++step) {
          const double up = std::nextafter(a_in, aHi);
          const double dn = std::nextafter(a_in, aLo);
          if (P.inside(up, k1, k2)) {
            a_in = up;
            in_min = true;
          } else if (P.inside(dn, k1, k2)) {
            a_in = dn;
            in_min = true;
          }
        }
      }
      const bool in_lo = P.inside(aLo, k1, k2);
      const bool in_hi = P.inside(aHi, k1, k2);
      if (!in_min && !in_lo && !in_hi) continue;

      if (in_lo)
        ++R.base;
      else {
        const double anchor = in_min ? a_in : aHi;
        const double enter =
            bisect_flip(aLo, anchor, true, [&](double x) { return P.inside(x, k1, k2); });
        R.events.push_back(Event{enter, +1});
      }
      if (!in_hi) {
        const double anchor = in_min ? a_in : aLo;
        const double leave =
            bisect_flip(anchor, aHi, false, [&](double x) { return P.inside(x, k1, k2); });
        R.events.push_back(Event{leave, -1});
      }
    }
  }
  return R;
}

struct Cell {
  double lo = 0.0, hi = 0.0;
  bool closed_lo = true, closed_hi = true;  // whether the endpoint is attained
  int64_t value = 0;

  bool contains(double a) const {
    return (closed_lo ? a >= lo : a > lo) && (closed_hi ? a <= hi : a < hi);
  }
  double attained_lo() const { return closed_lo ? lo : std::nextafter(lo, hi); }
  double attained_hi() const { return closed_hi ? hi : std::nextafter(hi, lo); }
};

std::vector<Cell> sweep_cells(const SweepResult& R, double K) {
  std::vector<Event> ev = R.events;
  std::sort(ev.begin(), ev.end(), [](const Event& x, const Event& y) {
    if (x.a != y.a) return x.a < y.a;
    return x.delta > y.delta;
  });
  std::vector<Cell> cells;
  double left = 1.0 / K;
  int64_t value = R.base;
  size_t i = 0;
  while (i < ev.size()) {
    const double a = ev[i].a;
    int64_t enters = 0, leaves = 0;
    for (; i < ev.size() && ev[i].a == a; ++i)
      (ev[i].delta > 0 ? enters : leaves) += 1;
    if (a > left) cells.push_back(Cell{left, a, cells.empty(), false, value});
    cells.push_back(Cell{a, a, true, true, value + enters});
    value += enters - leaves;
    left = a;
  }
  cells.push_back(Cell{left, K, cells.empty(), true, value});
  return cells;
}

struct Exact2DOutcome {
  int64_t best = 0;
  std::vector<double> reps;
  bool complete = true;
  int64_t evals = 0;
};

Exact2DOutcome exact2d_best(const BodySpec& body, double t, const OptimizeConfig& cfg) {
  const double K = cfg.box_bound;
  const bool positive = cfg.mode == OptimizeMode::MaxPositive;
  const LatticeSet set = positive ? LatticeSet::Positive : LatticeSet::Nonnegative;
  Predicate2D P(body, t);
  SweepResult R = collect_events(body, t, K, positive, P, cfg.budget);
  Exact2DOutcome out;
  out.complete = R.complete;
  out.evals = P.evals;
  if (!R.complete) {  // best effort: report the unstretched point
    out.reps = {1.0};
    out.best = count(CountRequest{body, stretch_of(1.0), t, set}).count;
    ++out.evals;
    return out;
  }

  std::vector<Cell> cells = sweep_cells(R, K);

  for (int attempt = 0; attempt < 8; ++attempt) {
    int64_t best = cells[0].value;
    for (const Cell& c : cells)
      best = positive ? std::max(best, c.value) : std::min(best, c.value);

    // Representatives: for every maximal run of optimal cells, both attained
    // endpoints plus the midpoint of the widest cell in the run.
    std::vector<double> reps;
    size_t i = 0;
    while (i < cells.size()) {
      if (cells[i].value != best) {
        ++i;
        continue;
      }
      size_t j = i;
      while (j + 1 < cells.size() && cells[j + 1].value == best) ++j;
      reps.push_back(cells[i].attained_lo());
      reps.push_back(cells[j].attained_hi());
      double width = -1.0, mid = reps.back();
      for (size_t q = i; q <= j; ++q)
        if (cells[q].hi - cells[q].lo > width) {
          width = cells[q].hi - cells[q].lo;
          mid = 0.5 * (cells[q].lo + cells[q].hi);
        }
      reps.push_back(mid);
      i = j + 1;
    }
    std::sort(reps.begin(), reps.end());
    reps.erase(std::unique(reps.begin(), reps.end()), reps.end());

    // Re-verify every representative with a fresh count; on a mismatch fix
    // the offending cell and re-select.
    bool consistent = true;
    for (double a : reps) {
      const int64_t fresh = count(CountRequest{body, stretch_of(a), t, set}).count;
      ++out.evals;
      if (fresh == best) continue;
      consistent = false;
      for (Cell& c : cells)
        if (c.contains(a) && c.value == best) {
          c.value = fresh;
          break;
        }
    }
    if (consistent) {
      out.best = best;
      out.reps = std::move(reps);
      return out;
    }
  }
  throw NumericalError("exact 2d sweep failed to re-verify its optima");
}

// ------------------------------------------------------------------- grid

struct GridOutcome {
  int64_t best = 0;
  std::vector<std::vector<double>> optima;  // log-coordinates of the first d-1 axes
  bool complete = true;
  int64_t evals = 0;
  double finest_step = 0.0;
};

GridOutcome grid_best(const BodySpec& body, double t, const OptimizeConfig& cfg,
                      const StretchFactor& B) {
  const int d = body.dim;
  const int dims = d - 1;
  const double smax = std::log(cfg.box_bound);
  const bool maximize = cfg.mode == OptimizeMode::MaxPositive;
  const LatticeSet set = maximize ? LatticeSet::Positive : LatticeSet::Nonnegative;

  GridOutcome out;
  struct Node {
    std::vector<double> s;
    int64_t value;
  };
  std::vector<Node> kept;
  std::map<std::vector<int64_t>, char> seen;  // quantized keys at the current step

  auto feasible = [&](const std::vector<double>& s) {
    double sum = 0.0;
    for (double v : s) {
      if (std::fabs(v) > smax + 1e-12) return false;
      sum += v;
    }
    return std::fabs(sum) <= smax + 1e-12;  // the derived last axis stays in the box
  };
  auto eval = [&](const std::vector<double>& s) {
    std::vector<double> a(static_cast<size_t>(d));
    double prod = 1.0;
    for (int i = 0; i < dims; ++i) {
      a[static_cast<size_t>(i)] = std::exp(s[static_cast<size_t>(i)]);
      prod *= a[static_cast<size_t>(i)];
    }
    a[static_cast<size_t>(d - 1)] = 1.0 / prod;
    ++out.evals;
    return count(CountRequest{body, StretchFactor::from_diag_unchecked(std::move(a)), t, set})
        .count;
  };
  auto quantize = [&](const std::vector<double>& s, double step) {
    std::vector<int64_t> key(s.size());
    for (size_t i = 0; i < s.size(); ++i) key[i] = std::llround((s[i] + smax) / step);
    return key;
  };
  auto prune = [&]() {
    int64_t best = kept[0].value;
    for (const Node& nd : kept)
      best = maximize ? std::max(best, nd.value) : std::min(best, nd.value);
    std::vector<Node> next;
    for (const Node& nd : kept)
      if (maximize ? nd.value >= best - cfg.halo : nd.value <= best + cfg.halo)
        next.push_back(nd);
    std::stable_sort(next.begin(), next.end(), [&](const Node& x, const Node& y) {
      if (x.value != y.value) return maximize ? x.value > y.value : x.value < y.value;
      return x.s < y.s;
    });
    if (static_cast<int64_t>(next.size()) > cfg.max_candidates)
      next.resize(static_cast<size_t>(cfg.max_candidates));
    kept = std::move(next);
    return best;
  };

  double step = cfg.initial_step;
  {
    // Level 0: the full lattice over the box, boundary included, plus the
    // identity and the balanced factor (both are always candidates).
    std::vector<double> coords;
    for (double s = -smax; s < smax - 1e-12; s += step) coords.push_back(s);
    coords.push_back(smax);
    std::vector<std::vector<double>> extra;
    extra.emplace_back(static_cast<size_t>(dims), 0.0);
    std::vector<double> sb(static_cast<size_t>(dims));
    for (int i = 0; i < dims; ++i) sb[static_cast<size_t>(i)] = std::log(B.diag[static_cast<size_t>(i)]);
    extra.push_back(std::move(sb));

    std::vector<size_t> idx(static_cast<size_t>(dims), 0);
    while (true) {
      std::vector<double> s(static_cast<size_t>(dims));
      for (int i = 0; i < dims; ++i)
        s[static_cast<size_t>(i)] = coords[idx[static_cast<size_t>(i)]];
      if (feasible(s)) {
        if (out.evals >= cfg.budget) {
          out.complete = false;
          break;
        }
        const int64_t v = eval(s);
        kept.push_back(Node{std::move(s), v});
      }
      int axis = 0;
      while (axis < dims && idx[static_cast<size_t>(axis)] + 1 == coords.size()) {
        idx[static_cast<size_t>(axis)] = 0;
        ++axis;
      }
      if (axis == dims) break;
      ++idx[static_cast<size_t>(axis)];
    }
    for (auto& s : extra) {
      if (!feasible(s)) continue;
      bool dup = false;
      for (const Node& nd : kept)
        if (nd.s == s) {
          dup = true;
          break;
        }
      if (dup || out.evals >= cfg.budget) continue;
      const int64_t v = eval(s);
      kept.push_back(Node{std::move(s), v});
    }
  }
  if (kept.empty()) throw NumericalError("grid search evaluated no feasible nodes");
  int64_t best = prune();
  out.finest_step = step;

  for (int level = 1; level <= cfg.grid_levels && out.complete; ++level) {
    step *= 0.5;
    if (step < 1e-3 / t) break;  // below the plateau scale of the count
    seen.clear();
    for (const Node& nd : kept) seen[quantize(nd.s, step)] = 1;
    std::vector<Node> fresh;
    for (const Node& parent : kept) {
      std::vector<int> offs(static_cast<size_t>(dims), -1);
      while (true) {
        std::vector<double> s = parent.s;
        for (int i = 0; i < dims; ++i)
          s[static_cast<size_t>(i)] += step * offs[static_cast<size_t>(i)];
        if (feasible(s)) {
          auto key = quantize(s, step);
          if (seen.emplace(std::move(key), 1).second) {
            if (out.evals >= cfg.budget) {
              out.complete = false;
              break;
            }
            const int64_t v = eval(s);
            fresh.push_back(Node{std::move(s), v});
          }
        }
        int axis = 0;
        while (axis < dims && offs[static_cast<size_t>(axis)] == 1) {
          offs[static_cast<size_t>(axis)] = -1;
          ++axis;
        }
        if (axis == dims) break;
        ++offs[static_cast<size_t>(axis)];
      }
      if (!out.complete) break;
    }
    kept.insert(kept.end(), fresh.begin(), fresh.end());
    best = prune();
    out.finest_step = step;
  }

  out.best = best;
  for (const Node& nd : kept)
    if (nd.value == best) out.optima.push_back(nd.s);
  std::sort(out.optima.begin(), out.optima.end());
  return out;
}

}  // namespace

double default_box_bound(const BodySpec& body) {
  const SectionMeasures sm = section_measures(body);
  double logsum = 0.0, smin = sm.sections[0];
  for (double s : sm.sections) {
    logsum += std::log(s);
    smin = std::min(smin, s);
  }
  const double geomean = std::exp(logsum / body.dim);
  return 4.0 * body.dim * geomean / smin;
}

OptimumReport optimize(const BodySpec& body, double t, const OptimizeConfig& cfg_in) {
  body.validate();
  if (body.dim < 2) throw InputError("optimize: d >= 2 required");
  if (!(std::isfinite(t) && t > 0.0)) throw InputError("optimize: t must be positive");
  OptimizeConfig cfg = cfg_in;
  if (cfg.box_bound <= 0.0) cfg.box_bound = default_box_bound(body);
  if (!(cfg.box_bound > 1.0)) throw InputError("optimize: box bound must exceed 1");
  if (cfg.budget < 1) throw InputError("optimize: empty evaluation budget");
  const StretchFactor B = balanced_factor(body);

  OptimumReport rep;
  const bool maximize = cfg.mode == OptimizeMode::MaxPositive;
  const LatticeSet set = maximize ? LatticeSet::Positive : LatticeSet::Nonnegative;

  if (cfg.strategy == OptimizeStrategy::Exact2D) {
    if (body.dim != 2) throw InputError("optimize: Exact2D requires d = 2");
    if (body.family != BodyFamily::Superellipsoid)
      throw InputError("optimize: Exact2D requires a superellipsoid body");
    const Exact2DOutcome out = exact2d_best(body, t, cfg);
    rep.value = out.best;
    rep.evaluations = out.evals;
    rep.complete = out.complete;
    for (double a : out.reps) {
      rep.optima.push_back(stretch_of(a));
      const double edge = std::min(a - 1.0 / cfg.box_bound, cfg.box_bound - a);
      if (edge <= 1e-12 * cfg.box_bound) rep.box_touched = true;
    }
  } else {
    const GridOutcome out = grid_best(body, t, cfg, B);
    rep.value = out.best;
    rep.evaluations = out.evals;
    rep.complete = out.complete;
    const double smax = std::log(cfg.box_bound);
    for (const auto& s : out.optima) {
      std::vector<double> a(static_cast<size_t>(body.dim));
      double prod = 1.0, ssum = 0.0;
      for (int i = 0; i < body.dim - 1; ++i) {
        a[static_cast<size_t>(i)] = std::exp(s[static_cast<size_t>(i)]);
        prod *= a[static_cast<size_t>(i)];
        ssum += s[static_cast<size_t>(i)];
        if (smax - std::fabs(s[static_cast<size_t>(i)]) < 0.5 * out.finest_step)
          rep.box_touched = true;
      }
      a[static_cast<size_t>(body.dim - 1)] = 1.0 / prod;
      if (smax - std::fabs(ssum) < 0.5 * out.finest_step) rep.box_touched = true;
      rep.optima.push_back(StretchFactor::from_diag_unchecked(std::move(a)));
    }
    if (rep.complete) {  // fresh recount of the winners
      for (const StretchFactor& A : rep.optima) {
        if (count(CountRequest{body, A, t, set}).count != rep.value)
          throw NumericalError("grid optimum failed re-verification");
        ++rep.evaluations;
      }
    }
  }

  for (const StretchFactor& A : rep.optima) {
    rep.a_star_max = std::max(rep.a_star_max, A.a_star);
    double dev = 0.0;
    for (int i = 0; i < body.dim; ++i)
      dev = std::max(dev,
                     std::fabs(A.diag[static_cast<size_t>(i)] - B.diag[static_cast<size_t>(i)]));
    rep.sup_deviation = std::max(rep.sup_deviation, dev);
  }
  if (!rep.complete) throw BudgetExhausted(std::move(rep));
  return rep;
}

std::vector<double> critical_values_2d(const BodySpec& body, double t, double K) {
  body.validate();
  if (body.dim != 2) throw InputError("critical values: d = 2 only");
  if (body.family != BodyFamily::Superellipsoid)
    throw InputError("critical values: superellipsoid bodies only");
  if (!(K > 1.0) || !(std::isfinite(t) && t > 0.0))
    throw InputError("critical values: need K > 1 and t > 0");
  Predicate2D P(body, t);
  const SweepResult R = collect_events(body, t, K, false, P, 1LL << 40);
  if (!R.complete) throw CapacityError("critical values: event budget exceeded");
  std::vector<double> vals;
  vals.reserve(R.events.size());
  for (const Event& e : R.events) vals.push_back(e.a);
  std::sort(vals.begin(), vals.end());
  std::vector<double> out;
  for (double v : vals)
    if (out.empty() || v - out.back() > 1e-13 * (1.0 + std::fabs(v))) out.push_back(v);
  return out;
}

double deviation_from_balanced(const OptimumReport& report, const StretchFactor& B) {
  double dev = 0.0;
  for (const StretchFactor& A : report.optima) {
    if (A.dim() != B.dim()) throw InputError("deviation: dimension mismatch");
    for (int i = 0; i < A.dim(); ++i)
      dev = std::max(dev,
                     std::fabs(A.diag[static_cast<size_t>(i)] - B.diag[static_cast<size_t>(i)]));
  }
  return dev;
}

}  // namespace stretchlat
