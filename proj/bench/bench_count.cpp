// Benchmark of the lattice point counters: the OpenMP-parallel kernel
// against the serial reference, with the brute-force enumerator as a
// correctness cross-check wherever its bounding box stays tractable.
//
// All three implementations must agree exactly; a mismatch fails the run.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <stretchlat/count.hpp>

namespace {

using stretchlat::BodySpec;
using stretchlat::CountRequest;
using stretchlat::CountResult;
using stretchlat::LatticeSet;
using stretchlat::StretchFactor;

struct Case {
  std::string name;
  CountRequest req;
  bool brute;  // bounding box small enough for the brute-force enumerator
};

const char* set_name(LatticeSet set) {
  switch (set) {
    case LatticeSet::Full: return "full";
    case LatticeSet::Positive: return "positive";
    case LatticeSet::Nonnegative: return "nonnegative";
    case LatticeSet::SectionsUnion: return "sections";
  }
  return "?";
}

template <class F>
double timed_ms(F&& f, CountResult& out) {
  const auto t0 = std::chrono::steady_clock::now();
  out = f();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP enabled, max threads = %d\n\n", omp_get_max_threads());
#else
  std::printf("OpenMP disabled; parallel kernel runs serially\n\n");
#endif

  const std::vector<Case> cases = {
      {"disk t=1500",
       {BodySpec::superellipsoid({2, 2}, {1, 1}), StretchFactor::identity(2), 1500.0,
        LatticeSet::Full},
       true},
      {"sphere t=120",
       {BodySpec::superellipsoid({2, 2, 2}, {1, 1, 1}), StretchFactor::identity(3), 120.0,
        LatticeSet::Full},
       true},
      {"p=(4,4) t=1000",
       {BodySpec::superellipsoid({4, 4}, {1, 1}), StretchFactor::identity(2), 1000.0,
        LatticeSet::Positive},
       true},
      {"ellipse b=(3,1/3) t=900",
       {BodySpec::superellipsoid({2, 2}, {3.0, 1.0 / 3.0}), StretchFactor::identity(2), 900.0,
        LatticeSet::Full},
       true},
      {"p=(4,4,2) stretched t=70",
       {BodySpec::superellipsoid({4, 4, 2}, {1, 1, 1}),
        StretchFactor::from_diag({1.25, 1.0, 0.8}), 70.0, LatticeSet::Nonnegative},
       true},
      {"disk t=3e6",
       {BodySpec::superellipsoid({2, 2}, {1, 1}), StretchFactor::identity(2), 3.0e6,
        LatticeSet::Full},
       false},
      {"sphere t=2000",
       {BodySpec::superellipsoid({2, 2, 2}, {1, 1, 1}), StretchFactor::identity(3), 2000.0,
        LatticeSet::Full},
       false},
  };

  // Warm up the parallel region once so thread spawn cost stays out of the table.
  {
    CountResult w;
    timed_ms([&] { return stretchlat::count(cases.front().req); }, w);
  }

  std::printf("%-26s %-12s %14s %12s %12s %9s %12s\n", "case", "set", "count", "parallel ms",
              "serial ms", "speedup", "brute ms");
  int failures = 0;
  for (const Case& c : cases) {
    CountResult par, ser, bru;
    const double ms_par = timed_ms([&] { return stretchlat::count(c.req); }, par);
    const double ms_ser = timed_ms([&] { return stretchlat::count_serial(c.req); }, ser);
    double ms_bru = -1.0;
    if (c.brute) ms_bru = timed_ms([&] { return stretchlat::count_bruteforce(c.req); }, bru);

    bool ok = par.count == ser.count && par.slices_visited == ser.slices_visited &&
              par.boundary_corrections == ser.boundary_corrections;
    if (c.brute) ok = ok && par.count == bru.count;
    if (!ok) {
      ++failures;
      std::printf("%-26s %-12s MISMATCH parallel=%lld serial=%lld brute=%lld\n", c.name.c_str(),
                  set_name(c.req.set), static_cast<long long>(par.count),
                  static_cast<long long>(ser.count),
                  static_cast<long long>(c.brute ? bru.count : -1));
      continue;
    }
    char brute_col[32];
    if (c.brute)
      std::snprintf(brute_col, sizeof brute_col, "%12.1f", ms_bru);
    else
      std::snprintf(brute_col, sizeof brute_col, "%12s", "-");
    std::printf("%-26s %-12s %14lld %12.1f %12.1f %8.2fx %s\n", c.name.c_str(),
                set_name(c.req.set), static_cast<long long>(par.count), ms_par, ms_ser,
                ms_ser / ms_par, brute_col);
  }

  if (failures) {
    std::printf("\n%d case(s) disagreed between implementations\n", failures);
    return 1;
  }
  std::printf("\nall implementations agree on every case\n");
  return 0;
}
