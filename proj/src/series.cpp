#include "stretchlat/series.hpp"

#include <cmath>

namespace stretchlat::detail {

Series Series::mul(const Series& o) const {
  Series r(order());
  for (int i = 0; i <= order(); ++i) {
    const double ci = c_[static_cast<size_t>(i)];
    if (ci == 0.0) continue;
    for (int j = 0; i + j <= order(); ++j) r[i + j] += ci * o[j];
  }
  return r;
}

Series Series::ipow(int n) const {
  Series r(order());
  r[0] = 1.0;
  Series base = *this;
  while (n > 0) {
    if (n & 1) r = r.mul(base);
    n >>= 1;
    if (n) base = base.mul(base);
  }
  return r;
}

std::vector<double> graph_taylor(const BodySpec& body, const BoundaryPoint& P,
                                 std::span<const double> X, int K) {
  if (!(body.family == BodyFamily::Superellipsoid && body.exponents_even_int()))
    throw InputError("graph_taylor: needs a superellipsoid with even integer exponents");
  if (K < 1) throw InputError("graph_taylor: order must be >= 1");
  const int d = body.dim;

  // (grad F)(P) . n  with  F = sum_i (y_i/b_i)^{p_i}
  double gn = 0.0;
  for (int i = 0; i < d; ++i) {
    const double bi = body.b[static_cast<size_t>(i)];
    const double ui = std::fabs(P.point[static_cast<size_t>(i)]) / bi;
    if (ui == 0.0) continue;
    const double pi = body.p[static_cast<size_t>(i)];
    gn += (pi / bi) * std::pow(ui, pi - 1.0) *
          (P.point[static_cast<size_t>(i)] > 0.0 ? 1.0 : -1.0) * P.normal[static_cast<size_t>(i)];
  }
  if (!(gn > 1e-12)) throw NumericalError("graph_taylor: normal derivative vanished");

  // Solve [s^k] F(P + sX - phi(s) n) = 0 for phi_k, ascending k. With phi_k
  // temporarily 0 the s^k coefficient is g_k - phi_k * gn.
  std::vector<double> phi(static_cast<size_t>(K) + 1, 0.0);
  for (int k = 2; k <= K; ++k) {
    Series g(k);
    g[0] = -1.0;
    for (int i = 0; i < d; ++i) {
      const double bi = body.b[static_cast<size_t>(i)];
      Series y(k);
      y[0] = P.point[static_cast<size_t>(i)] / bi;
      y[1] = X[static_cast<size_t>(i)] / bi;
      for (int m = 2; m < k; ++m)
        y[m] = -phi[static_cast<size_t>(m)] * P.normal[static_cast<size_t>(i)] / bi;
      const Series term = y.ipow(static_cast<int>(std::llround(body.p[static_cast<size_t>(i)])));
      for (int m = 0; m <= k; ++m) g[m] += term[m];
    }
    phi[static_cast<size_t>(k)] = g[k] / gn;
  }
  return phi;
}

}  // namespace stretchlat::detail
