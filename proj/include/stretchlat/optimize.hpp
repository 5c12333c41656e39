#pragma once
#include <cstdint>
#include <vector>

#include "stretchlat/body.hpp"
#include "stretchlat/count.hpp"
#include "stretchlat/errors.hpp"
#include "stretchlat/stretch.hpp"

namespace stretchlat {

enum class OptimizeMode { MaxPositive, MinNonnegative };
enum class OptimizeStrategy { Exact2D, Grid };

struct OptimizeConfig {
  OptimizeMode mode = OptimizeMode::MaxPositive;
  OptimizeStrategy strategy = OptimizeStrategy::Exact2D;
  double box_bound = 0.0;     // search a_i in [1/K, K]; <= 0 selects the default
                              // K = 4 d (prod |Omega_j|)^{1/d} / min |Omega_j|
  int grid_levels = 12;       // Grid: refinement halvings after level 0
  double initial_step = 0.05; // Grid: level-0 step in log space
  int64_t budget = 100000000; // evaluation budget (counts + events)
  int64_t halo = 2;           // Grid: keep candidates within halo of the incumbent
  int64_t max_candidates = 256;
};

struct OptimumReport {
  int64_t value = 0;
  std::vector<StretchFactor> optima;  // representatives of the argmax/argmin set
  double sup_deviation = 0.0;         // max over optima of max_j |a_j - B_jj|
  double a_star_max = 0.0;
  int64_t evaluations = 0;
  bool complete = true;               // false iff the budget ran out
  bool box_touched = false;           // an optimum sits on the box boundary
};

// Thrown when the evaluation budget runs out; carries the best result found.
struct BudgetExhausted : CapacityError {
  OptimumReport partial;
  explicit BudgetExhausted(OptimumReport best)
      : CapacityError("optimize: evaluation budget exhausted"), partial(std::move(best)) {}
};

// Optimize the Positive count (max) or Nonnegative count (min) over
// volume-preserving diagonal stretches inside the box. Exact2D (d = 2 only)
// sweeps every membership switch of every lattice point and is exact on the
// box; Grid is the multiresolution refinement fallback for any d.
OptimumReport optimize(const BodySpec& body, double t, const OptimizeConfig& cfg);

// All a in [1/K, K] at which some lattice point enters or leaves
// t*diag(a,1/a)*Omega, deduplicated and sorted. d = 2 only.
std::vector<double> critical_values_2d(const BodySpec& body, double t, double K);

// Recomputed sup-deviation of the report's optima from a reference stretch.
double deviation_from_balanced(const OptimumReport& report, const StretchFactor& B);

}  // namespace stretchlat
