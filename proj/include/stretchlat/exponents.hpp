#pragma once
#include <cstdint>
#include <utility>
#include <vector>

#include "stretchlat/body.hpp"

namespace stretchlat {

enum class MultitypeStrategy {
  Auto,      // Analytic when available (superellipsoid), Numeric otherwise
  Analytic,  // exponent/zero-pattern rule, superellipsoid only
  Numeric,   // probe the derivative flag of the boundary graph
  Both,      // run both, require agreement (AnalysisError on mismatch)
};

// One step of the descending flag: after order `order`, the directions on
// which all derivatives up to `order` vanish span `basis` (frame coordinates,
// orthonormal). The last step has an empty basis.
struct FlagStep {
  int order = 0;
  std::vector<Vec> basis;
};

struct MultitypeReport {
  BoundaryPoint point;
  std::vector<int> multitype;  // a_1 <= ... <= a_{d-1}, even, >= 2
  std::vector<FlagStep> flag;
  double nu = 0.0;             // sum_i 1/a_i
  double nu_tail = 0.0;        // sum_{i>=2} 1/a_i (0 when d = 2)
  MultitypeStrategy strategy = MultitypeStrategy::Numeric;
};

MultitypeReport multitype_at(const BodySpec& body, const BoundaryPoint& P,
                             MultitypeStrategy strategy = MultitypeStrategy::Auto);

// (nu(P), nu_tail(P)) without the full report.
std::pair<double, double> nu_at(const BodySpec& body, const BoundaryPoint& P,
                                MultitypeStrategy strategy = MultitypeStrategy::Auto);

struct SamplingConfig {
  int angular_samples = 10000;
  MultitypeStrategy strategy = MultitypeStrategy::Auto;
  uint64_t seed = 2026;
};

struct ExponentReport {
  double nu = 0.0;     // min_P nu(P)
  double mu = 0.0;     // 1/2 + min_P nu_tail(P)
  double gamma = 0.0;  // min{ nu/2, mu/(2(d - mu)) }
  BoundaryPoint nu_minimizer;
  BoundaryPoint mu_minimizer;
  int sample_count = 0;
};

// Minimizes nu and nu_tail over all coordinate-subspace directions plus a
// deterministic quasi-uniform angular sample of the given size.
ExponentReport exponent_report(const BodySpec& body, const SamplingConfig& cfg = {});

struct SectionMultitypeCheck {
  std::vector<int> section_multitype;  // of Omega_j at P, length d-2
  std::vector<int> full_multitype;     // of Omega at P, length d-1
  bool holds = false;                  // section[i] <= full[i+1] for all i
};

// P must lie on the section {x_j = 0} (0-based j); d >= 3.
SectionMultitypeCheck section_multitype_check(const BodySpec& body, int j,
                                              const BoundaryPoint& P,
                                              MultitypeStrategy strategy = MultitypeStrategy::Auto);

}  // namespace stretchlat
