#pragma once
#include <cstdint>
#include <vector>

#include "stretchlat/body.hpp"
#include "stretchlat/stretch.hpp"

namespace stretchlat {

// Which lattice points of t*A*Omega are counted:
//   Full          all of Z^d
//   Positive      k_i >= 1 for every i
//   Nonnegative   k_i >= 0 for every i
//   SectionsUnion points with at least one vanishing coordinate
enum class LatticeSet { Full, Positive, Nonnegative, SectionsUnion };

struct CountRequest {
  BodySpec body;
  StretchFactor stretch;
  double t = 1.0;
  LatticeSet set = LatticeSet::Full;
};

struct CountResult {
  int64_t count = 0;
  int64_t slices_visited = 0;        // 1-d slices examined (brute force: points tested)
  int64_t boundary_corrections = 0;  // +-1 adjustments of the float slice width
};

// Exact count by recursive slicing; the innermost axis is solved in closed
// form and corrected by the membership predicate. OpenMP-parallel over the
// outermost prefix axis; result is independent of the thread count.
CountResult count(const CountRequest& req);

// Same slicing, no parallel region. Kept as the reference implementation.
CountResult count_serial(const CountRequest& req);

// Enumerates the full bounding box, testing the membership predicate on
// every point. Throws CapacityError above ~1e8 points.
CountResult count_bruteforce(const CountRequest& req);

// Count of { k : k_j = 0 for j in zero_axes, k_j >= 1 otherwise } inside
// t*A*Omega; zero_axes are 0-based and may be empty (plain Positive count).
int64_t count_axis_subsets(const BodySpec& body, const StretchFactor& A, double t,
                           const std::vector<int>& zero_axes);

}  // namespace stretchlat
