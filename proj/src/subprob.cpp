#include "smf/subprob.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

#include "smf/prox.hpp"

namespace smf {

double spectral_norm_sq(const Matrix& w) {
  if (!w.allFinite()) throw std::invalid_argument("spectral_norm_sq: non-finite input");
  const Index k = w.cols();
  if (w.size() == 0 || w.isZero(0.0)) return 0.0;

  Vector v = Vector::Constant(k, 1.0 / std::sqrt(static_cast<double>(k)));
  Vector wv(w.rows()), u(k);
  double lambda = 0.0;
  Index restart = 0;
  for (int it = 0; it < 1000; ++it) {
    wv.noalias() = w * v;
    u.noalias() = w.transpose() * wv;
    const double next = v.dot(u);
    const double unorm = u.norm();
    if (unorm == 0.0) {
      // Start vector landed in the null space; restart from a basis vector.
      if (restart >= k) return 0.0;
      v.setZero();
      v[restart++] = 1.0;
      lambda = 0.0;
      continue;
    }
    v = u / unorm;
    if (std::abs(next - lambda) <= 1e-10 * std::max(1.0, std::abs(next))) return next;
    lambda = next;
  }
  return lambda;
}

double tolerance_schedule(long s, long t, long m, double tau, double floor) {
  const double pos = static_cast<double>(m) * static_cast<double>(s) +
                     static_cast<double>(t) + 1.0;
  return std::max(floor, std::pow(pos, -(0.5 + tau)));
}

double code_objective(const ConstVectorRef& y, const Matrix& w,
                      const ProblemSpec& spec, const ConstVectorRef& h,
                      const ConstVectorRef& r) {
  const double fit = 0.5 * (y - w * h - r).squaredNorm();
  double reg = penalty_value(spec.coeff_reg, h);
  if (spec.robust()) reg += penalty_value(spec.outlier_reg, r);
  return fit + reg;
}

CodeStats solve_code_in(const ConstVectorRef& y, const Matrix& w,
                        const ProblemSpec& spec, double tol, int max_iters,
                        CodeWorkspace& ws, double w_norm_sq) {
  if (!y.allFinite() || !w.allFinite())
    throw std::invalid_argument("solve_code: non-finite input");
  if (!(tol > 0.0)) throw std::invalid_argument("solve_code: tol must be > 0");

  const Index d = w.rows();
  const Index k = w.cols();
  ws.resize(d, k);

  const double lip = w_norm_sq >= 0.0 ? w_norm_sq : spectral_norm_sq(w);
  CodeStats out;
  if (lip == 0.0) {
    // All-zero dictionary: h plays no role in the fit.
    ws.h.setZero();
    project_column_inplace(spec.coeff_set, ws.h);
    ws.r = y;
    prox_outlier_inplace(spec, ws.r);
    out.objective = code_objective(y, w, spec, ws.h, ws.r);
    return out;
  }
  const double step = 1.0 / lip;

  ws.h.setZero();
  ws.r.setZero();
  project_column_inplace(spec.outlier_set, ws.r);
#ifndef NDEBUG
  double prev_obj = code_objective(y, w, spec, ws.h, ws.r);
#endif

  for (int it = 1; it <= max_iters; ++it) {
    out.iters = it;
    ws.resid.noalias() = w * ws.h;
    ws.resid += ws.r - y;
    ws.grad_h.noalias() = w.transpose() * ws.resid;
    ws.h_new = ws.h - step * ws.grad_h;
    prox_coeff_inplace(spec, step, ws.h_new);

    ws.r_new = y;
    ws.r_new.noalias() -= w * ws.h_new;
    prox_outlier_inplace(spec, ws.r_new);

    out.residual = std::max((ws.h - ws.h_new).norm() * lip, (ws.r - ws.r_new).norm());
    ws.h.swap(ws.h_new);
    ws.r.swap(ws.r_new);
#ifndef NDEBUG
    const double obj = code_objective(y, w, spec, ws.h, ws.r);
    assert(obj <= prev_obj + 1e-9 * (1.0 + std::abs(prev_obj)));
    prev_obj = obj;
#endif
    if (out.residual <= tol) break;
  }

  out.objective = code_objective(y, w, spec, ws.h, ws.r);
  return out;
}

CodeSolution solve_code(const ConstVectorRef& y, const Matrix& w,
                        const ProblemSpec& spec, double tol, int max_iters) {
  CodeWorkspace ws;
  const CodeStats stats = solve_code_in(y, w, spec, tol, max_iters, ws, -1.0);
  CodeSolution out;
  out.h = std::move(ws.h);
  out.r = std::move(ws.r);
  out.objective = stats.objective;
  out.residual = stats.residual;
  out.iters = stats.iters;
  return out;
}

}  // namespace smf
