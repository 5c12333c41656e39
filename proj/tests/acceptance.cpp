// Acceptance gate: ten self-contained checks, one [PASS]/[FAIL] line each.
// Exit status is the number of failed checks.
#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "stretchlat/body.hpp"
#include "stretchlat/count.hpp"
#include "stretchlat/csv.hpp"
#include "stretchlat/experiments.hpp"
#include "stretchlat/exponents.hpp"
#include "stretchlat/measure.hpp"
#include "stretchlat/optimize.hpp"

using namespace stretchlat;
using Clock = std::chrono::steady_clock;

namespace {

constexpr uint64_t kSeed = 20260815;
constexpr double kPi = std::numbers::pi;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    pass = false;
    if (!detail.empty()) detail += "; ";
    detail += why;
  }
};

int g_failures = 0;

void report(int criterion, const Outcome& out, double elapsed) {
  std::printf("[%s] criterion %d: %s (%.1f s)\n", out.pass ? "PASS" : "FAIL", criterion,
              out.detail.c_str(), elapsed);
  std::fflush(stdout);
  if (!out.pass) ++g_failures;
}

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

// ----------------------------------------------------------- criteria 1/3/4

struct RandomRequest {
  BodySpec body;
  StretchFactor stretch;
  double t = 0.0;
};

// 500 seeded requests: d in {2,3}, p_i in {2,4,6}, det-1 stretches with every
// entry in [1/3, 3], t <= 30 (d = 3 stays small enough to brute-force).
std::vector<RandomRequest> make_requests() {
  std::mt19937_64 rng(kSeed);
  std::uniform_real_distribution<double> ad(1.0 / 3.0, 3.0);
  std::uniform_real_distribution<double> td2(0.5, 30.0), td3(0.5, 8.0);
  const double pchoice[3] = {2.0, 4.0, 6.0};

  std::vector<RandomRequest> reqs;
  reqs.reserve(500);
  for (int i = 0; i < 500; ++i) {
    const int d = (i % 3 == 2) ? 3 : 2;
    std::vector<double> p(static_cast<size_t>(d));
    for (double& pk : p) pk = pchoice[rng() % 3];
    std::vector<double> a(static_cast<size_t>(d));
    for (;;) {
      double prod = 1.0;
      for (int k = 0; k + 1 < d; ++k) {
        a[static_cast<size_t>(k)] = ad(rng);
        prod *= a[static_cast<size_t>(k)];
      }
      a[static_cast<size_t>(d - 1)] = 1.0 / prod;
      if (a[static_cast<size_t>(d - 1)] >= 1.0 / 3.0 && a[static_cast<size_t>(d - 1)] <= 3.0)
        break;
    }
    RandomRequest r;
    r.body = BodySpec::superellipsoid(p, std::vector<double>(static_cast<size_t>(d), 1.0));
    r.stretch = StretchFactor::from_diag(a);
    r.t = (d == 2) ? td2(rng) : td3(rng);
    reqs.push_back(std::move(r));
  }
  return reqs;
}

constexpr LatticeSet kSets[4] = {LatticeSet::Full, LatticeSet::Positive,
                                 LatticeSet::Nonnegative, LatticeSet::SectionsUnion};

const char* set_name(LatticeSet s) {
  switch (s) {
    case LatticeSet::Full: return "full";
    case LatticeSet::Positive: return "positive";
    case LatticeSet::Nonnegative: return "nonnegative";
    default: return "sections-union";
  }
}

// Counts of all four lattice sets for every request, as a deterministic CSV.
CsvTable request_table(const std::vector<RandomRequest>& reqs,
                       std::vector<std::array<int64_t, 4>>* counts_out) {
  CsvTable table;
  table.header = {"request", "d", "p", "a", "t", "set", "count"};
  int id = 0;
  for (const RandomRequest& r : reqs) {
    std::array<int64_t, 4> c{};
    for (int s = 0; s < 4; ++s) {
      c[static_cast<size_t>(s)] = count(CountRequest{r.body, r.stretch, r.t, kSets[s]}).count;
      table.rows.push_back({std::to_string(id), std::to_string(r.body.dim), join17(r.body.p),
                            join17(r.stretch.diag), fmt17(r.t), set_name(kSets[s]),
                            std::to_string(c[static_cast<size_t>(s)])});
    }
    if (counts_out) counts_out->push_back(c);
    ++id;
  }
  return table;
}

// ------------------------------------------------------------- criterion 8

struct BalancingRun {
  CsvTable csv;
  std::vector<double> t, deviation;
  double a_star_max = 0.0;
  bool all_complete = true;
};

BalancingRun balancing_run() {
  BalancingRun run;
  run.csv.header = {"t", "sup_deviation", "value", "a1", "a2", "a_star_max", "complete"};
  OptimizeConfig cfg;
  cfg.strategy = OptimizeStrategy::Exact2D;
  cfg.box_bound = 4.0;
  const BodySpec disk = BodySpec::superellipsoid({2, 2}, {1, 1});
  for (int i = 1; i <= 10; ++i) {
    const double t = 50.0 * i;
    const OptimumReport rep = optimize(disk, t, cfg);
    run.t.push_back(t);
    run.deviation.push_back(rep.sup_deviation);
    run.a_star_max = std::max(run.a_star_max, rep.a_star_max);
    run.all_complete = run.all_complete && rep.complete;
    const Vec& a = rep.optima.front().diag;
    run.csv.rows.push_back({fmt17(t), fmt17(rep.sup_deviation), std::to_string(rep.value),
                            fmt17(a[0]), fmt17(a[1]), fmt17(rep.a_star_max),
                            rep.complete ? "1" : "0"});
  }
  return run;
}

// ------------------------------------------------------------- criterion 9

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> g;
  for (int i = 0; i < n; ++i)
    g.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
  return g;
}

// Log-spaced integer dilations. Counting remainders oscillate, and a
// real-valued dilation can land arbitrarily close to a zero of the remainder,
// putting an unbounded negative outlier into the log-log fit; integer
// dilations keep the statistic on the classical lattice-count footing.
std::vector<double> int_log_grid(double lo, double hi, int n) {
  std::vector<double> g;
  for (double t : log_grid(lo, hi, n)) {
    const double r = std::round(t);
    if (g.empty() || r > g.back()) g.push_back(r);
  }
  return g;
}

struct RemainderSpec {
  const char* label;
  double max_slope;
  ExperimentConfig cfg;
};

std::vector<RemainderSpec> remainder_specs() {
  std::vector<RemainderSpec> specs(3);
  specs[0].label = "disk full";
  specs[0].max_slope = 0.767;
  specs[0].cfg.kind = ExperimentKind::RemainderFull;
  specs[0].cfg.body = BodySpec::superellipsoid({2, 2}, {1, 1});
  specs[0].cfg.t_grid = int_log_grid(50.0, 2000.0, 16);

  specs[1].label = "p=4 positive";
  specs[1].max_slope = 0.85;
  specs[1].cfg.kind = ExperimentKind::RemainderPositive;
  specs[1].cfg.body = BodySpec::superellipsoid({4, 4}, {1, 1});
  specs[1].cfg.t_grid = int_log_grid(50.0, 2000.0, 16);

  specs[2].label = "sphere full";
  specs[2].max_slope = 1.6;
  specs[2].cfg.kind = ExperimentKind::RemainderFull;
  specs[2].cfg.body = BodySpec::superellipsoid({2, 2, 2}, {1, 1, 1});
  specs[2].cfg.t_grid = log_grid(10.0, 60.0, 16);

  for (RemainderSpec& s : specs) s.cfg.name = s.label;
  return specs;
}

// Everything criterion 10 must reproduce byte-for-byte.
std::string determinism_bundle() {
  std::string s = request_table(make_requests(), nullptr).to_string();
  s += balancing_run().csv.to_string();
  for (const RemainderSpec& spec : remainder_specs())
    s += remainder_experiment(spec.cfg).csv.to_string();
  return s;
}

// -------------------------------------------------------- criteria 6 and 7

std::vector<BodySpec> triaxial_bodies() {
  std::vector<BodySpec> bodies;
  for (double p1 : {2.0, 4.0, 6.0})
    for (double p2 : {2.0, 4.0, 6.0})
      for (double p3 : {2.0, 4.0, 6.0})
        bodies.push_back(BodySpec::superellipsoid({p1, p2, p3}, {1, 1, 1}));
  return bodies;
}

}  // namespace

int main() {
  std::vector<RandomRequest> requests;
  std::vector<std::array<int64_t, 4>> counts;

  // 1. count == count_bruteforce on 500 randomized requests, all four sets.
  {
    const auto start = Clock::now();
    Outcome out;
    requests = make_requests();
    request_table(requests, &counts);
    int64_t mismatches = 0;
    for (size_t i = 0; i < requests.size(); ++i) {
      const RandomRequest& r = requests[i];
      for (int s = 0; s < 4; ++s) {
        const int64_t brute =
            count_bruteforce(CountRequest{r.body, r.stretch, r.t, kSets[s]}).count;
        if (brute != counts[i][static_cast<size_t>(s)]) ++mismatches;
      }
    }
    const double elapsed = seconds_since(start);
    if (mismatches != 0) out.fail(std::to_string(mismatches) + " brute-force mismatches");
    if (elapsed > 120.0) out.fail("exceeded the 2 min budget");
    if (out.pass)
      out.detail = "500 randomized requests x 4 lattice sets match brute force exactly";
    report(1, out, elapsed);
  }

  // 2. Disk checkpoints t = 1..10: brute force re-derivation, then the pins.
  {
    const auto start = Clock::now();
    Outcome out;
    const int64_t pinned[10] = {5, 13, 29, 49, 81, 113, 149, 197, 253, 317};
    const BodySpec disk = BodySpec::superellipsoid({2, 2}, {1, 1});
    const StretchFactor I = StretchFactor::identity(2);
    for (int t = 1; t <= 10; ++t) {
      const CountRequest r{disk, I, static_cast<double>(t), LatticeSet::Full};
      const int64_t fast = count(r).count;
      const int64_t brute = count_bruteforce(r).count;
      if (fast != brute) out.fail("t=" + std::to_string(t) + ": count != brute");
      if (fast != pinned[t - 1]) out.fail("t=" + std::to_string(t) + ": count != pinned");
    }
    if (out.pass) out.detail = "disk counts t = 1..10 equal brute force and the pinned values";
    report(2, out, seconds_since(start));
  }

  // 3. Full = 2^d Positive + SectionsUnion; Nonnegative by inclusion over
  //    zero-axis subsets. Exact on every criterion-1 request.
  {
    const auto start = Clock::now();
    Outcome out;
    int64_t bad = 0;
    for (size_t i = 0; i < requests.size(); ++i) {
      const RandomRequest& r = requests[i];
      const int d = r.body.dim;
      const auto& c = counts[i];
      if (c[0] != (int64_t{1} << d) * c[1] + c[3]) ++bad;
      int64_t subsets = 0;
      for (int mask = 0; mask < (1 << d); ++mask) {
        std::vector<int> zero_axes;
        for (int k = 0; k < d; ++k)
          if (mask & (1 << k)) zero_axes.push_back(k);
        subsets += count_axis_subsets(r.body, r.stretch, r.t, zero_axes);
      }
      if (c[2] != subsets) ++bad;
    }
    if (bad != 0) out.fail(std::to_string(bad) + " identity violations");
    if (out.pass) out.detail = "both counting identities hold exactly on all 500 requests";
    report(3, out, seconds_since(start));
  }

  // 4. Bound direction: Positive <= 2^{-d} V t^d <= Nonnegative whenever
  //    t / a_* >= 1, plus a positive normalized gap on the disk.
  {
    const auto start = Clock::now();
    Outcome out;
    int64_t violations = 0, applicable = 0;
    for (size_t i = 0; i < requests.size(); ++i) {
      const RandomRequest& r = requests[i];
      const double a_star =
          *std::max_element(r.stretch.diag.begin(), r.stretch.diag.end());
      if (r.t / a_star < 1.0) continue;
      ++applicable;
      const double main =
          std::ldexp(volume(r.body), -r.body.dim) * std::pow(r.t, r.body.dim);
      if (static_cast<double>(counts[i][1]) > main) ++violations;
      if (static_cast<double>(counts[i][2]) < main) ++violations;
    }
    if (violations != 0) out.fail(std::to_string(violations) + " bound violations");

    const BodySpec disk = BodySpec::superellipsoid({2, 2}, {1, 1});
    const StretchFactor I = StretchFactor::identity(2);
    double min_gap = std::numeric_limits<double>::infinity();
    for (int t = 20; t <= 200; ++t) {
      const int64_t pos =
          count(CountRequest{disk, I, static_cast<double>(t), LatticeSet::Positive}).count;
      const double gap = (0.25 * kPi * t * t - static_cast<double>(pos)) / t;
      min_gap = std::min(min_gap, gap);
    }
    if (!(min_gap > 0.0)) out.fail("disk normalized gap min " + num(min_gap) + " <= 0");
    const double elapsed = seconds_since(start);
    if (elapsed > 60.0) out.fail("exceeded the 1 min budget");
    if (out.pass)
      out.detail = "bounds hold on " + std::to_string(applicable) +
                   " applicable requests; disk normalized gap min over t in [20,200] = " +
                   num(min_gap) + " > 0";
    report(4, out, elapsed);
  }

  // 5. Exponent tables of the four reference bodies, tolerance 1e-9.
  {
    const auto start = Clock::now();
    Outcome out;
    struct Row {
      const char* label;
      BodySpec body;
      double nu, mu, gamma;
    };
    const std::vector<Row> rows = {
        {"disk", BodySpec::superellipsoid({2, 2}, {1, 1}), 0.5, 0.5, 1.0 / 6.0},
        {"p=4 superellipse", BodySpec::superellipsoid({4, 4}, {1, 1}), 0.25, 0.5, 0.125},
        {"sphere", BodySpec::superellipsoid({2, 2, 2}, {1, 1, 1}), 1.0, 1.0, 0.25},
        {"p=4 ball", BodySpec::superellipsoid({4, 4, 4}, {1, 1, 1}), 0.5, 0.75, 1.0 / 6.0},
    };
    for (const Row& row : rows) {
      const ExponentReport rep = exponent_report(row.body);
      if (std::fabs(rep.nu - row.nu) > 1e-9 || std::fabs(rep.mu - row.mu) > 1e-9 ||
          std::fabs(rep.gamma - row.gamma) > 1e-9)
        out.fail(std::string(row.label) + ": got (" + num(rep.nu) + ", " + num(rep.mu) + ", " +
                 num(rep.gamma) + ")");
    }
    if (out.pass)
      out.detail = "nu, mu, gamma match the hand-derived tables for all four bodies (1e-9)";
    report(5, out, seconds_since(start));
  }

  // 6. Analytic vs numeric multitype on sampled boundary points of all 27
  //    p in {2,4,6}^3 superellipsoids.
  const std::vector<BodySpec> bodies = triaxial_bodies();
  {
    const auto start = Clock::now();
    Outcome out;
    std::mt19937_64 rng(kSeed + 6);
    std::normal_distribution<double> gauss(0.0, 1.0);
    int points = 0, disagreements = 0;
    for (const BodySpec& body : bodies) {
      std::vector<std::vector<double>> dirs = {
          {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 1}};
      for (int extra = 0; extra < 2; ++extra) {
        std::vector<double> v(3);
        for (double& c : v) c = gauss(rng);
        if (std::hypot(v[0], v[1], v[2]) < 1e-3) v = {1, 2, 3};
        dirs.push_back(std::move(v));
      }
      for (const std::vector<double>& v : dirs) {
        const BoundaryPoint P = boundary_point_from_direction(body, v, -1);
        const MultitypeReport ana = multitype_at(body, P, MultitypeStrategy::Analytic);
        const MultitypeReport nume = multitype_at(body, P, MultitypeStrategy::Numeric);
        ++points;
        if (ana.multitype != nume.multitype) ++disagreements;
      }
    }
    const double elapsed = seconds_since(start);
    if (points < 100) out.fail("only " + std::to_string(points) + " points sampled");
    if (disagreements != 0) out.fail(std::to_string(disagreements) + " disagreements");
    if (elapsed > 120.0) out.fail("exceeded the 2 min budget");
    if (out.pass)
      out.detail = "analytic and numeric multitypes agree on " + std::to_string(points) +
                   " boundary points of 27 bodies";
    report(6, out, elapsed);
  }

  // 7. Section interlacing at sampled section points of the same bodies.
  {
    const auto start = Clock::now();
    Outcome out;
    std::mt19937_64 rng(kSeed + 7);
    std::normal_distribution<double> gauss(0.0, 1.0);
    int checks = 0, violations = 0;
    for (const BodySpec& body : bodies) {
      for (int j = 0; j < 3; ++j) {
        std::vector<std::vector<double>> dirs;
        for (int k = 0; k < 3; ++k) {
          if (k == j) continue;
          std::vector<double> axis(3, 0.0);
          axis[static_cast<size_t>(k)] = 1.0;
          dirs.push_back(std::move(axis));
        }
        std::vector<double> diag(3, 1.0), rand(3);
        diag[static_cast<size_t>(j)] = 0.0;
        for (int k = 0; k < 3; ++k) rand[static_cast<size_t>(k)] = (k == j) ? 0.0 : gauss(rng);
        if (std::fabs(rand[(j + 1) % 3]) + std::fabs(rand[(j + 2) % 3]) < 1e-3)
          rand[(j + 1) % 3] = 1.0;
        dirs.push_back(std::move(diag));
        dirs.push_back(std::move(rand));
        for (const std::vector<double>& v : dirs) {
          const BoundaryPoint P = boundary_point_from_direction(body, v, j);
          const SectionMultitypeCheck chk = section_multitype_check(body, j, P);
          ++checks;
          if (!chk.holds) ++violations;
        }
      }
    }
    if (violations != 0) out.fail(std::to_string(violations) + " interlacing violations");
    if (out.pass)
      out.detail = "section multitype interlaces the full multitype at all " +
                   std::to_string(checks) + " sampled section points";
    report(7, out, seconds_since(start));
  }

  // 8. Asymptotic balancing on the disk: deviations shrink, scaled deviations
  //    stay bounded, optima stay inside the box.
  BalancingRun balancing;
  {
    const auto start = Clock::now();
    Outcome out;
    balancing = balancing_run();
    double max_scaled = 0.0, mean_lo = 0.0, mean_hi = 0.0;
    int n_lo = 0, n_hi = 0;
    for (size_t i = 0; i < balancing.t.size(); ++i) {
      max_scaled =
          std::max(max_scaled, balancing.deviation[i] * std::pow(balancing.t[i], 1.0 / 6.0));
      if (balancing.t[i] <= 100.0) {
        mean_lo += balancing.deviation[i];
        ++n_lo;
      }
      if (balancing.t[i] >= 400.0) {
        mean_hi += balancing.deviation[i];
        ++n_hi;
      }
    }
    mean_lo /= n_lo;
    mean_hi /= n_hi;
    if (!balancing.all_complete) out.fail("an optimization hit its budget");
    if (!std::isfinite(max_scaled)) out.fail("scaled deviation not finite");
    if (!(mean_hi < mean_lo))
      out.fail("mean deviation did not shrink: " + num(mean_hi) + " !< " + num(mean_lo));
    if (balancing.a_star_max > 4.0 + 1e-12)
      out.fail("optimum outside the box: a_* = " + num(balancing.a_star_max));
    const double elapsed = seconds_since(start);
    if (elapsed > 300.0) out.fail("exceeded the 5 min budget");
    if (out.pass)
      out.detail = "max sup_deviation * t^{1/6} = " + num(max_scaled) +
                   "; mean deviation " + num(mean_lo) + " (t <= 100) -> " + num(mean_hi) +
                   " (t >= 400); a_* <= 4";
    report(8, out, elapsed);
  }

  // 9. Two-term asymptotics: fitted remainder slopes stay under the pinned
  //    exponents.
  std::vector<RateFit> remainder_fits;
  {
    const auto start = Clock::now();
    Outcome out;
    std::string summary;
    for (const RemainderSpec& spec : remainder_specs()) {
      const RateFit fit = remainder_experiment(spec.cfg);
      remainder_fits.push_back(fit);
      if (!fit.slope_defined) {
        out.fail(std::string(spec.label) + ": slope undefined");
        continue;
      }
      if (!summary.empty()) summary += ", ";
      summary += std::string(spec.label) + " " + num(fit.fitted_slope) + " <= " +
                 num(spec.max_slope);
      if (fit.fitted_slope > spec.max_slope)
        out.fail(std::string(spec.label) + ": slope " + num(fit.fitted_slope) + " > " +
                 num(spec.max_slope));
    }
    const double elapsed = seconds_since(start);
    if (elapsed > 600.0) out.fail("exceeded the 10 min budget");
    if (out.pass) out.detail = "fitted slopes: " + summary;
    report(9, out, elapsed);
  }

  // 10. Byte-identical CSVs for criteria 1, 8, 9 across thread counts.
  {
    const auto start = Clock::now();
    Outcome out;
#ifdef _OPENMP
    const int restore = omp_get_max_threads();
    const int high = std::max(4, restore);
    omp_set_num_threads(1);
    const std::string serial = determinism_bundle();
    omp_set_num_threads(high);
    const std::string parallel = determinism_bundle();
    omp_set_num_threads(restore);
    if (serial != parallel) out.fail("CSV bytes differ between 1 and " +
                                     std::to_string(high) + " threads");
    if (out.pass)
      out.detail = "criteria 1, 8, 9 CSVs are byte-identical with 1 and " +
                   std::to_string(high) + " threads";
#else
    out.detail = "built without OpenMP; single-threaded by construction";
#endif
    report(10, out, seconds_since(start));
  }

  return g_failures;
}
