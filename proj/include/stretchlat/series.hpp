#pragma once
#include <span>
#include <vector>

#include "stretchlat/body.hpp"

namespace stretchlat::detail {

// Dense truncated power series in one variable, coefficients c[0..order].
class Series {
 public:
  explicit Series(int order) : c_(static_cast<size_t>(order) + 1, 0.0) {}
  int order() const { return static_cast<int>(c_.size()) - 1; }
  double operator[](int k) const { return c_[static_cast<size_t>(k)]; }
  double& operator[](int k) { return c_[static_cast<size_t>(k)]; }

  Series mul(const Series& o) const;   // truncated product, same order
  Series ipow(int n) const;            // integer power by repeated squaring

 private:
  std::vector<double> c_;
};

// Taylor coefficients phi_0..phi_K of the boundary graph s -> Phi(s X) at P:
// solves sum_i ((P_i + s X_i - phi(s) n_i)/b_i)^{p_i} = 1 order by order.
// X is an ambient tangent direction at P. Requires even integer exponents;
// the only error source is rounding, there is no truncation error.
std::vector<double> graph_taylor(const BodySpec& body, const BoundaryPoint& P,
                                 std::span<const double> X, int K);

}  // namespace stretchlat::detail
