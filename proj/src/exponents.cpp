#include "stretchlat/exponents.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>

#include "stretchlat/detail/scaled.hpp"
#include "stretchlat/measure.hpp"
#include "stretchlat/series.hpp"

namespace stretchlat {

using detail::DerivativeBackend;

namespace {

// Relative zero threshold for flag subspaces. Series derivatives are exact up
// to rounding (~1e-14 relative even after the polarization cancellations), so
// a tight threshold still resolves the tiny-but-genuine curvatures of points
// close to a degenerate set (~|x_i|^{p-2} for a nearly vanishing coordinate).
// Finite differences carry real noise and need the loose one.
double rel_tau(DerivativeBackend backend) {
  return backend == DerivativeBackend::TaylorSeries ? 1e-10 : 1e-7;
}

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

// Absolute noise floor for the m-th path derivative, by backend.
double deriv_floor(int m, DerivativeBackend backend) {
  if (backend == DerivativeBackend::TaylorSeries) return 1e-9 * factorial(m);
  // Richardson central differences: the floor grows quickly with the order.
  return 1e-3 * std::pow(30.0, 0.5 * (m - 2));
}

struct StagePair {
  double odd = 0.0;   // q_{m-1}
  double even = 0.0;  // q_m
};

// x given in frame coordinates (not necessarily unit).
StagePair stage_pair(const BodySpec& body, const BoundaryPoint& P, const Vec& x, int m,
                     DerivativeBackend backend) {
  StagePair out;
  if (backend == DerivativeBackend::TaylorSeries) {
    const int d = body.dim;
    double xr = 0.0;
    for (double c : x) xr += c * c;
    xr = std::sqrt(xr);
    if (xr == 0.0) return out;
    Vec X(static_cast<size_t>(d), 0.0);
    for (int j = 0; j < d - 1; ++j)
      for (int i = 0; i < d; ++i)
        X[static_cast<size_t>(i)] += (x[static_cast<size_t>(j)] / xr) *
                                     P.frame[static_cast<size_t>(j)][static_cast<size_t>(i)];
    const std::vector<double> c = detail::graph_taylor(body, P, X, m);
    out.even = c[static_cast<size_t>(m)] * factorial(m) * detail::ipow(xr, m);
    if (m >= 3)
      out.odd = c[static_cast<size_t>(m - 1)] * factorial(m - 1) * detail::ipow(xr, m - 1);
    return out;
  }
  out.even = detail::graph_derivative_via(body, P, x, m, backend);
  if (m >= 3) out.odd = detail::graph_derivative_via(body, P, x, m - 1, backend);
  return out;
}

// Probe directions on the unit sphere of an r-dimensional space.
std::vector<Vec> probe_directions(int r, int n, uint64_t seed) {
  std::vector<Vec> probes;
  if (r == 1) {
    probes.push_back(Vec{1.0});
    return probes;
  }
  if (r == 2) {
    const double pi = 2.0 * std::asin(1.0);
    for (int i = 0; i < n; ++i) {
      const double th = pi * (i + 0.5) / n;  // half circle: q_m is even
      probes.push_back(Vec{std::cos(th), std::sin(th)});
    }
  } else {
    for (int i = 0; i < r; ++i) {
      Vec e(static_cast<size_t>(r), 0.0);
      e[static_cast<size_t>(i)] = 1.0;
      probes.push_back(std::move(e));
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    while (static_cast<int>(probes.size()) < n) {
      Vec v(static_cast<size_t>(r));
      double nn = 0.0;
      for (double& c : v) {
        c = gauss(rng);
        nn += c * c;
      }
      nn = std::sqrt(nn);
      if (nn < 1e-6) continue;
      for (double& c : v) c /= nn;
      probes.push_back(std::move(v));
    }
  }
  return probes;
}

Vec to_frame_coords(const std::vector<Vec>& basis, const Vec& z) {
  const size_t r0 = basis.empty() ? 0 : basis[0].size();
  Vec x(r0, 0.0);
  for (size_t j = 0; j < basis.size(); ++j)
    for (size_t i = 0; i < r0; ++i) x[i] += z[j] * basis[j][i];
  return x;
}

double unit_normalize(Vec& v) {
  double n = 0.0;
  for (double c : v) n += c * c;
  n = std::sqrt(n);
  if (n > 0)
    for (double& c : v) c /= n;
  return n;
}

// Golden-section minimization of |q_m| over the angle between two directions
// of a 2-dimensional subspace (basis in frame coordinates).
Vec polish_zero_direction_2d(const BodySpec& body, const BoundaryPoint& P, const Vec& b0,
                             const Vec& b1, double th0, double half_width, int m,
                             DerivativeBackend backend) {
  auto eval = [&](double th) {
    Vec x(b0.size());
    for (size_t i = 0; i < b0.size(); ++i) x[i] = std::cos(th) * b0[i] + std::sin(th) * b1[i];
    return std::fabs(stage_pair(body, P, x, m, backend).even);
  };
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = th0 - half_width, b = th0 + half_width;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = eval(c), fd = eval(d);
  for (int iter = 0; iter < 80 && (b - a) > 1e-14; ++iter) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = eval(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = eval(d);
    }
  }
  const double th = 0.5 * (a + b);
  Vec x(b0.size());
  for (size_t i = 0; i < b0.size(); ++i) x[i] = std::cos(th) * b0[i] + std::sin(th) * b1[i];
  return x;
}

// Orthonormal basis (frame coordinates) of the span of the given directions,
// rank decided at 1e-3 of the leading singular value.
std::vector<Vec> span_basis(const std::vector<Vec>& dirs, size_t ambient) {
  if (dirs.empty()) return {};
  Eigen::MatrixXd M(static_cast<Eigen::Index>(ambient), static_cast<Eigen::Index>(dirs.size()));
  for (size_t j = 0; j < dirs.size(); ++j)
    for (size_t i = 0; i < ambient; ++i)
      M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = dirs[j][i];
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  std::vector<Vec> basis;
  for (Eigen::Index r = 0; r < sv.size(); ++r) {
    if (sv(r) < 1e-3 * sv(0)) break;
    Vec u(ambient);
    for (size_t i = 0; i < ambient; ++i) u[i] = svd.matrixU()(static_cast<Eigen::Index>(i), r);
    basis.push_back(std::move(u));
  }
  return basis;
}

void verify_vanishing(const BodySpec& body, const BoundaryPoint& P, const std::vector<Vec>& basis,
                      int m, DerivativeBackend backend, double tol, uint64_t seed) {
  if (basis.empty()) return;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int trial = 0; trial < 8; ++trial) {
    Vec z(basis.size());
    for (double& c : z) c = gauss(rng);
    Vec x = to_frame_coords(basis, z);
    if (unit_normalize(x) < 1e-9) continue;
    const double q = stage_pair(body, P, x, m, backend).even;
    if (std::fabs(q) > tol)
      throw AnalysisError("multitype: candidate zero subspace fails verification at order " +
                          std::to_string(m));
  }
}

MultitypeReport finish_report(const BodySpec&, const BoundaryPoint& P, std::vector<int> multitype,
                              std::vector<FlagStep> flag, MultitypeStrategy strategy) {
  MultitypeReport rep;
  rep.point = P;
  rep.multitype = std::move(multitype);
  rep.flag = std::move(flag);
  rep.strategy = strategy;
  const int want = static_cast<int>(P.point.size()) - 1;
  if (static_cast<int>(rep.multitype.size()) != want)
    throw AnalysisError("multitype: expected d-1 entries");
  for (size_t i = 0; i < rep.multitype.size(); ++i) {
    if (rep.multitype[i] < 2 || rep.multitype[i] % 2 != 0)
      throw AnalysisError("multitype: entries must be even and >= 2");
    if (i > 0 && rep.multitype[i] < rep.multitype[i - 1])
      throw AnalysisError("multitype: entries must be ascending");
    rep.nu += 1.0 / rep.multitype[i];
    if (i >= 1) rep.nu_tail += 1.0 / rep.multitype[i];
  }
  return rep;
}

MultitypeReport multitype_numeric(const BodySpec& body, const BoundaryPoint& P) {
  const int d = body.dim;
  const int r0 = d - 1;
  const DerivativeBackend backend =
      (body.family == BodyFamily::Superellipsoid && body.exponents_even_int())
          ? DerivativeBackend::TaylorSeries
          : DerivativeBackend::FiniteDifference;
  int max_order = body.max_derivative_order;
  if (body.family == BodyFamily::Superellipsoid) {
    double pmax = 2.0;
    for (double pi : body.p) pmax = std::max(pmax, pi);
    max_order = static_cast<int>(std::llround(pmax));
  }
  const int probe_budget = (backend == DerivativeBackend::TaylorSeries) ? 256 : 96;

  std::vector<Vec> S;  // current flag subspace, orthonormal, frame coordinates
  for (int i = 0; i < r0; ++i) {
    Vec e(static_cast<size_t>(r0), 0.0);
    e[static_cast<size_t>(i)] = 1.0;
    S.push_back(std::move(e));
  }
  std::vector<int> multitype;
  std::vector<FlagStep> flag;

  for (int m = 2; !S.empty(); m += 2) {
    if (m > max_order)
      throw AnalysisError("multitype: flag not exhausted by the certified order " +
                          std::to_string(max_order) + " (finite type violated?)");
    const int r = static_cast<int>(S.size());
    std::vector<Vec> zero_dirs;  // frame coordinates

    if (m == 2) {
      // Hessian of the graph by polarization, then an exact eigensplit.
      Eigen::MatrixXd H(r0, r0);
      std::vector<double> diag(static_cast<size_t>(r0));
      for (int i = 0; i < r0; ++i) {
        Vec x(static_cast<size_t>(r0), 0.0);
        x[static_cast<size_t>(i)] = 1.0;
        diag[static_cast<size_t>(i)] = stage_pair(body, P, x, 2, backend).even;
        H(i, i) = diag[static_cast<size_t>(i)];
      }
      for (int i = 0; i < r0; ++i)
        for (int j = i + 1; j < r0; ++j) {
          Vec x(static_cast<size_t>(r0), 0.0);
          x[static_cast<size_t>(i)] = 1.0;
          x[static_cast<size_t>(j)] = 1.0;
          const double qij = stage_pair(body, P, x, 2, backend).even;
          H(i, j) = H(j, i) =
              0.5 * (qij - diag[static_cast<size_t>(i)] - diag[static_cast<size_t>(j)]);
        }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(H);
      const double lmax = std::max(std::fabs(eig.eigenvalues()(0)),
                                   std::fabs(eig.eigenvalues()(r0 - 1)));
      const double tol = std::max(rel_tau(backend) * lmax, deriv_floor(2, backend));
      int zero_count = 0;
      for (int i = 0; i < r0; ++i) {
        const double lam = eig.eigenvalues()(i);
        if (lam < -4.0 * tol)
          throw AnalysisError("multitype: negative curvature direction (body not convex?)");
        if (std::fabs(lam) <= tol) {
          Vec v(static_cast<size_t>(r0));
          for (int q = 0; q < r0; ++q) v[static_cast<size_t>(q)] = eig.eigenvectors()(q, i);
          zero_dirs.push_back(std::move(v));
          ++zero_count;
        }
      }
      (void)zero_count;
      std::vector<Vec> Z = span_basis(zero_dirs, static_cast<size_t>(r0));
      verify_vanishing(body, P, Z, 2, backend, 4.0 * tol, 0x5eedULL + 2);
      const int drop = r - static_cast<int>(Z.size());
      if (drop > 0) {
        for (int c = 0; c < drop; ++c) multitype.push_back(2);
        flag.push_back(FlagStep{2, Z});
      }
      S = std::move(Z);
      continue;
    }

    // Stage m >= 4: probe the unit sphere of S.
    const std::vector<Vec> probes = probe_directions(r, probe_budget, 0x5eedULL * 31 + m);
    std::vector<double> q(probes.size()), odd(probes.size());
    double qmax = 0.0, oddmax = 0.0, qmin = 0.0;
    for (size_t i = 0; i < probes.size(); ++i) {
      Vec x = to_frame_coords(S, probes[i]);
      const StagePair sp = stage_pair(body, P, x, m, backend);
      q[i] = sp.even;
      odd[i] = sp.odd;
      qmax = std::max(qmax, std::fabs(q[i]));
      oddmax = std::max(oddmax, std::fabs(odd[i]));
      qmin = std::min(qmin, q[i]);
    }
    const double floor_m = deriv_floor(m, backend);
    if (oddmax > std::max(4.0 * deriv_floor(m - 1, backend), 1e-5 * qmax))
      throw AnalysisError("multitype: odd-order derivative does not vanish on the flag "
                          "subspace (symmetry violated?)");
    if (qmax <= floor_m) continue;  // flat through order m, S unchanged
    const double tol = std::max(rel_tau(backend) * qmax, floor_m);
    if (qmin < -4.0 * tol)
      throw AnalysisError("multitype: negative leading derivative (body not convex?)");

    if (r == 2) {
      // The probes sample theta on a uniform [0, pi) grid and the even form is
      // pi-periodic there, so a zero line falling between probes can read far
      // above the certification tolerance (the form vanishes to even order
      // along the circle). Seed the polish from loose local minima of |q| and
      // let the polished value decide.
      const size_t n = probes.size();
      const double seed_tol = std::max(tol, 1e-3 * qmax);
      const double pi = 2.0 * std::asin(1.0);
      for (size_t i = 0; i < n; ++i) {
        const double qi = std::fabs(q[i]);
        if (qi > seed_tol) continue;
        if (qi > std::fabs(q[(i + n - 1) % n]) || qi > std::fabs(q[(i + 1) % n])) continue;
        const double th = pi * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
        Vec x =
            polish_zero_direction_2d(body, P, S[0], S[1], th, pi / static_cast<double>(n), m, backend);
        if (std::fabs(stage_pair(body, P, x, m, backend).even) <= tol) zero_dirs.push_back(x);
      }
    } else {
      // r == 1: the lone probe either survives to a higher order or it does
      // not. r >= 3: dense probes within tolerance carry the span.
      for (size_t i = 0; i < probes.size(); ++i) {
        if (std::fabs(q[i]) > tol) continue;
        zero_dirs.push_back(to_frame_coords(S, probes[i]));
      }
    }
    for (auto& v : zero_dirs) unit_normalize(v);
    std::vector<Vec> Z = span_basis(zero_dirs, static_cast<size_t>(r0));
    if (static_cast<int>(Z.size()) >= r)
      throw AnalysisError("multitype: flag failed to descend at order " + std::to_string(m));
    verify_vanishing(body, P, Z, m, backend, 4.0 * tol, 0x5eedULL + static_cast<uint64_t>(m));
    const int drop = r - static_cast<int>(Z.size());
    for (int c = 0; c < drop; ++c) multitype.push_back(m);
    flag.push_back(FlagStep{m, Z});
    S = std::move(Z);
  }
  return finish_report(body, P, std::move(multitype), std::move(flag),
                       MultitypeStrategy::Numeric);
}

MultitypeReport multitype_analytic(const BodySpec& body, const BoundaryPoint& P) {
  if (!(body.family == BodyFamily::Superellipsoid && body.exponents_even_int()))
    throw InputError("analytic multitype needs a superellipsoid with even integer exponents");
  const int d = body.dim;
  double pmax_coord = 0.0;
  for (double c : P.point) pmax_coord = std::max(pmax_coord, std::fabs(c));
  std::vector<int> zeros, nonzeros;
  for (int i = 0; i < d; ++i) {
    if (std::fabs(P.point[static_cast<size_t>(i)]) <= 1e-12 * pmax_coord)
      zeros.push_back(i);
    else
      nonzeros.push_back(i);
  }

  // Tangent directions along vanished coordinates feel the |x_i|^{p_i} term
  // alone (order p_i); every other tangent direction meets the quadratic
  // bending of the active coordinates (order 2).
  std::vector<int> multitype;
  for (size_t c = 1; c < nonzeros.size(); ++c) multitype.push_back(2);
  for (int i : zeros)
    multitype.push_back(static_cast<int>(std::llround(body.p[static_cast<size_t>(i)])));
  std::sort(multitype.begin(), multitype.end());

  std::vector<FlagStep> flag;
  std::vector<int> orders(multitype);
  orders.erase(std::unique(orders.begin(), orders.end()), orders.end());
  for (int m : orders) {
    std::vector<Vec> basis;
    for (int i : zeros) {
      if (body.p[static_cast<size_t>(i)] <= static_cast<double>(m)) continue;
      // frame coordinates of the ambient axis e_i
      Vec x(static_cast<size_t>(d - 1));
      for (int j = 0; j < d - 1; ++j)
        x[static_cast<size_t>(j)] = P.frame[static_cast<size_t>(j)][static_cast<size_t>(i)];
      basis.push_back(std::move(x));
    }
    flag.push_back(FlagStep{m, std::move(basis)});
  }
  return finish_report(body, P, std::move(multitype), std::move(flag),
                       MultitypeStrategy::Analytic);
}

void require_matching(const MultitypeReport& a, const MultitypeReport& n) {
  if (a.multitype != n.multitype)
    throw AnalysisError("multitype: analytic and numeric strategies disagree");
}

}  // namespace

MultitypeReport multitype_at(const BodySpec& body, const BoundaryPoint& P,
                             MultitypeStrategy strategy) {
  body.validate();
  if (body.dim < 2) throw InputError("multitype needs d >= 2");
  if (std::fabs(gauge(body, P.point) - 1.0) > 1e-9)
    throw InputError("multitype: point is not on the boundary");
  const bool analytic_ok =
      body.family == BodyFamily::Superellipsoid && body.exponents_even_int();
  switch (strategy) {
    case MultitypeStrategy::Analytic:
      return multitype_analytic(body, P);
    case MultitypeStrategy::Numeric:
      return multitype_numeric(body, P);
    case MultitypeStrategy::Both: {
      if (!analytic_ok) return multitype_numeric(body, P);
      MultitypeReport a = multitype_analytic(body, P);
      const MultitypeReport n = multitype_numeric(body, P);
      require_matching(a, n);
      a.strategy = MultitypeStrategy::Both;
      return a;
    }
    case MultitypeStrategy::Auto:
    default:
      return analytic_ok ? multitype_analytic(body, P) : multitype_numeric(body, P);
  }
}

std::pair<double, double> nu_at(const BodySpec& body, const BoundaryPoint& P,
                                MultitypeStrategy strategy) {
  const MultitypeReport rep = multitype_at(body, P, strategy);
  return {rep.nu, rep.nu_tail};
}

ExponentReport exponent_report(const BodySpec& body, const SamplingConfig& cfg) {
  body.validate();
  const int d = body.dim;
  if (d < 2) throw InputError("exponent report needs d >= 2");
  if (cfg.angular_samples < 0) throw InputError("exponent report: negative sample count");

  std::vector<Vec> dirs;
  // Every pattern of vanishing coordinates: these are exactly the points
  // where the multitype can jump.
  if (d <= 12) {
    for (unsigned mask = 1; mask < (1u << d); ++mask) {
      Vec v(static_cast<size_t>(d), 0.0);
      const double c = 1.0 / std::sqrt(static_cast<double>(__builtin_popcount(mask)));
      for (int i = 0; i < d; ++i)
        if (mask & (1u << i)) v[static_cast<size_t>(i)] = c;
      dirs.push_back(std::move(v));
    }
  }
  // Quasi-uniform interior sample of the positive orthant directions.
  const double half_pi = 2.0 * std::asin(0.5 * std::sqrt(2.0));
  if (d == 2) {
    for (int i = 0; i < cfg.angular_samples; ++i) {
      const double th = half_pi * (i + 0.5) / cfg.angular_samples;
      dirs.push_back(Vec{std::cos(th), std::sin(th)});
    }
  } else if (d == 3) {
    const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int i = 0; i < cfg.angular_samples; ++i) {
      const double z = (i + 0.5) / cfg.angular_samples;
      const double st = std::sqrt(std::max(0.0, 1.0 - z * z));
      double fr = std::fmod((i + 0.5) * golden, 1.0);
      const double ph = half_pi * fr;
      dirs.push_back(Vec{st * std::cos(ph), st * std::sin(ph), z});
    }
  } else {
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int i = 0; i < cfg.angular_samples; ++i) {
      Vec v(static_cast<size_t>(d));
      double nn = 0.0;
      for (double& c : v) {
        c = std::fabs(gauss(rng)) + 1e-3;
        nn += c * c;
      }
      nn = std::sqrt(nn);
      for (double& c : v) c /= nn;
      dirs.push_back(std::move(v));
    }
  }

  const int n = static_cast<int>(dirs.size());
  std::vector<double> nu(static_cast<size_t>(n)), nu_tail(static_cast<size_t>(n));
  std::vector<char> failed(static_cast<size_t>(n), 0);
  std::string first_error;

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 16)
#endif
  for (int i = 0; i < n; ++i) {
    try {
      const BoundaryPoint bp = boundary_point_from_direction(body, dirs[static_cast<size_t>(i)]);
      const auto [v, vt] = nu_at(body, bp, cfg.strategy);
      nu[static_cast<size_t>(i)] = v;
      nu_tail[static_cast<size_t>(i)] = vt;
    } catch (const std::exception& e) {
      failed[static_cast<size_t>(i)] = 1;
#ifdef _OPENMP
#pragma omp critical
#endif
      if (first_error.empty()) first_error = e.what();
    }
  }
  for (int i = 0; i < n; ++i)
    if (failed[static_cast<size_t>(i)])
      throw AnalysisError("exponent report: sample " + std::to_string(i) + " failed: " +
                          first_error);

  int arg_nu = 0, arg_tail = 0;
  for (int i = 1; i < n; ++i) {
    if (nu[static_cast<size_t>(i)] < nu[static_cast<size_t>(arg_nu)] - 1e-15) arg_nu = i;
    if (nu_tail[static_cast<size_t>(i)] < nu_tail[static_cast<size_t>(arg_tail)] - 1e-15)
      arg_tail = i;
  }

  ExponentReport rep;
  rep.nu = nu[static_cast<size_t>(arg_nu)];
  rep.mu = 0.5 + nu_tail[static_cast<size_t>(arg_tail)];
  rep.gamma = std::min(0.5 * rep.nu, rep.mu / (2.0 * (d - rep.mu)));
  rep.nu_minimizer = boundary_point_from_direction(body, dirs[static_cast<size_t>(arg_nu)]);
  rep.mu_minimizer = boundary_point_from_direction(body, dirs[static_cast<size_t>(arg_tail)]);
  rep.sample_count = n;
  return rep;
}

SectionMultitypeCheck section_multitype_check(const BodySpec& body, int j,
                                              const BoundaryPoint& P,
                                              MultitypeStrategy strategy) {
  body.validate();
  const int d = body.dim;
  if (d < 3) throw InputError("section multitype check needs d >= 3");
  if (j < 0 || j >= d) throw InputError("section axis out of range");
  if (std::fabs(P.point[static_cast<size_t>(j)]) > 1e-9)
    throw InputError("section multitype check: point is not on the section");

  const MultitypeReport full = multitype_at(body, P, strategy);

  const BodySpec sec = section_body(body, j);
  Vec image;
  for (int i = 0; i < d; ++i)
    if (i != j) image.push_back(P.point[static_cast<size_t>(i)]);
  const BoundaryPoint sp = boundary_point_from_direction(sec, image);
  const MultitypeReport secrep = multitype_at(sec, sp, strategy);

  SectionMultitypeCheck out;
  out.section_multitype = secrep.multitype;
  out.full_multitype = full.multitype;
  out.holds = true;
  for (size_t i = 0; i < out.section_multitype.size(); ++i)
    if (out.section_multitype[i] > out.full_multitype[i + 1]) out.holds = false;
  return out;
}

}  // namespace stretchlat
