#include "ptc/solver.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace ptc {

namespace {

bool all_finite(const Vec& v) { return v.allFinite(); }

std::optional<Vec> try_eval(const ResidualFn& f, const Vec& x, std::size_t& evals) {
  ++evals;
  try {
    Vec r = f(x);
    if (r.size() != x.size() || !all_finite(r)) return std::nullopt;
    return r;
  } catch (const NumericalError&) {
    return std::nullopt;
  }
}

// Dogleg step for min |F + J p| subject to |D p| <= radius.
Vec dogleg(const Mat& J, const Vec& F, const Vec& D, real radius) {
  Vec gn = J.colPivHouseholderQr().solve(-F);
  if (all_finite(gn) && (D.cwiseProduct(gn)).norm() <= radius) return gn;

  const Vec g = J.transpose() * F;
  const Vec gs = g.cwiseQuotient(D);  // scaled gradient
  const Vec dir = gs.cwiseQuotient(D);
  const real gs_norm = gs.norm();
  if (gs_norm == 0) return Vec::Zero(F.size());
  const real jd = (J * dir).squaredNorm();
  const real alpha = jd > 0 ? gs_norm * gs_norm / jd : radius / gs_norm;
  Vec sd = -alpha * dir;
  const real sd_norm = D.cwiseProduct(sd).norm();
  if (sd_norm >= radius || !all_finite(gn)) return -(radius / gs_norm) * dir;

  // walk from the Cauchy point towards the Gauss-Newton point
  const Vec d = gn - sd;
  const Vec Dd = D.cwiseProduct(d), Dsd = D.cwiseProduct(sd);
  const real a = Dd.squaredNorm(), b = 2 * Dsd.dot(Dd), c = Dsd.squaredNorm() - radius * radius;
  const real tau = (-b + std::sqrt(std::max<real>(0, b * b - 4 * a * c))) / (2 * a);
  return sd + tau * d;
}

}  // namespace

Mat fd_jacobian(const ResidualFn& f, const Vec& x, const Vec& fx, real fd_step) {
  const auto n = x.size();
  Mat J(fx.size(), n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const real h = fd_step * std::max<real>(1, std::abs(x[i]));
    auto column = [&](real step) {
      Vec xh = x;
      xh[i] += step;
      return Vec((f(xh) - fx) / (xh[i] - x[i]));
    };
    try {
      J.col(i) = column(h);
    } catch (const NumericalError&) {
      // the forward point left the admissible region
      J.col(i) = column(-h);
    }
  }
  return J;
}

SolveReport solve_system(const ResidualFn& f, const Vec& x0, const SolverOptions& opts) {
  SolveReport rep;
  rep.root = x0;
  Vec F;
  {
    auto r = try_eval(f, x0, rep.function_evals);
    if (!r) throw EvaluationError("residual is not finite at the starting point", x0);
    F = *r;
  }
  const auto n = x0.size();
  auto finish = [&](SolveStatus s) {
    rep.residual_norm = F.cwiseAbs().maxCoeff();
    rep.status = s;
    rep.converged = s == SolveStatus::converged;
    return rep;
  };
  if (n == 0 || F.cwiseAbs().maxCoeff() <= opts.tol) return finish(SolveStatus::converged);

  Vec& x = rep.root;
  auto refresh = [&]() {
    Mat J = fd_jacobian(f, x, F, opts.fd_step);
    rep.function_evals += static_cast<std::size_t>(n);
    ++rep.jacobian_evals;
    return J;
  };
  rep.history.push_back(F.norm());
  Mat J = refresh();
  bool fresh = true;
  if (!all_finite(J.reshaped())) throw EvaluationError("Jacobian is not finite", x);

  Vec D(n);
  for (Eigen::Index i = 0; i < n; ++i) D[i] = std::max<real>(J.col(i).norm(), 1e-12L);
  real radius = opts.initial_radius * std::max<real>(1, D.cwiseProduct(x).norm());

  for (rep.iterations = 0; rep.iterations < opts.max_iterations; ++rep.iterations) {
    if (F.cwiseAbs().maxCoeff() <= opts.tol) return finish(SolveStatus::converged);
    if (radius < opts.min_radius * std::max<real>(1, D.cwiseProduct(x).norm())) return finish(SolveStatus::stagnation);

    const Vec p = dogleg(J, F, D, radius);
    const real p_norm = D.cwiseProduct(p).norm();
    const Vec xt = x + p;
    if ((xt - x).norm() == 0) return finish(SolveStatus::stagnation);
    const real f2 = F.squaredNorm();
    const real pred = f2 - (F + J * p).squaredNorm();
    auto Ft = try_eval(f, xt, rep.function_evals);
    real ratio = -1;
    if (Ft) {
      const real ared = f2 - Ft->squaredNorm();
      ratio = pred > 0 ? ared / pred : (ared > 0 ? 1 : -1);
    }

    if (ratio < 0.1L)
      radius = 0.5L * std::min(radius, p_norm);
    else if (ratio > 0.75L || std::abs(ratio - 1) < 0.1L)
      radius = std::max(radius, 2 * p_norm);

    const bool accept = Ft && Ft->squaredNorm() < f2 && ratio > 1e-4L;
    if (Ft) {
      // Broyden rank-one update along the trial step
      const real pp = p.squaredNorm();
      if (pp > 0) J += ((*Ft - F - J * p) / pp) * p.transpose();
      fresh = false;
    }
    if (accept) {
      rep.history.push_back(Ft->norm());
      x = xt;
      F = *Ft;
    } else if (!fresh) {
      J = refresh();
      fresh = true;
    }
  }
  return finish(F.cwiseAbs().maxCoeff() <= opts.tol ? SolveStatus::converged : SolveStatus::iteration_limit);
}

std::vector<ContinuationPoint> continuation(const FamilyFn& family, const Vec& x_start, std::size_t steps,
                                            const ContinuationOptions& opts) {
  if (steps == 0) throw std::invalid_argument("continuation: steps must be positive");
  std::vector<ContinuationPoint> path;
  {
    auto rep = solve_system([&](const Vec& x) { return family(x, 0); }, x_start, opts.solver);
    if (!rep.converged) throw PathFailureError("continuation: start point does not solve the t=0 member", path);
    path.push_back({0, std::move(rep)});
  }
  const real nominal = real(1) / steps;
  real dt = nominal;
  real t = 0;
  while (t < 1) {
    const real t_next = (1 - t <= dt * (1 + 1e-12L)) ? 1 : t + dt;
    Vec seed = path.back().report.root;
    if (opts.extrapolate && path.size() >= 2) {
      const auto& prev = path[path.size() - 2];
      const real span = path.back().t - prev.t;
      if (span > 0) seed += (t_next - t) / span * (path.back().report.root - prev.report.root);
    }
    SolveReport rep;
    bool ok = false;
    try {
      rep = solve_system([&](const Vec& x) { return family(x, t_next); }, seed, opts.solver);
      ok = rep.converged;
    } catch (const NumericalError&) {
      ok = false;
    }
    if (ok) {
      path.push_back({t_next, std::move(rep)});
      t = t_next;
      dt = std::min(nominal, 2 * dt);
    } else {
      dt /= 2;
      if (dt < opts.min_dt) throw PathFailureError("continuation: step size fell below the minimum", path);
    }
  }
  return path;
}

}  // namespace ptc
