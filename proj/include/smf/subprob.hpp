#ifndef SMF_SUBPROB_HPP
#define SMF_SUBPROB_HPP

#include <cstddef>

#include "smf/types.hpp"

namespace smf {

using ConstVectorRef = Eigen::Ref<const Vector>;

/// Result of one per-sample coefficient/outlier solve.
struct CodeSolution {
  Vector h;
  Vector r;
  double objective = 0.0;  // final regularized least-squares value
  double residual = 0.0;   // last prox-gradient residual
  int iters = 0;
};

/// Convergence facts without the iterate (which stays in the workspace).
struct CodeStats {
  double objective = 0.0;
  double residual = 0.0;
  int iters = 0;
};

/// Reusable buffers so batch loops solve many samples without heap churn.
struct CodeWorkspace {
  Vector h, h_new, grad_h, r, r_new, resid;

  void resize(Index d, Index k) {
    h.resize(k);
    h_new.resize(k);
    grad_h.resize(k);
    r.resize(d);
    r_new.resize(d);
    resid.resize(d);
  }
  std::size_t bytes() const {
    return static_cast<std::size_t>(h.size() * 3 + r.size() * 3) * sizeof(double);
  }
};

/// Squared spectral norm ||W||_2^2 by power iteration on W^T W
/// (relative tolerance 1e-10, at most 1000 iterations; exact 0 for the
/// zero matrix).
double spectral_norm_sq(const Matrix& w);

/// Per-sample solve tolerance max(floor, (m s + t + 1)^{-(1/2 + tau)}).
double tolerance_schedule(long s, long t, long m, double tau, double floor);

/// The regularized least-squares value 1/2 ||y - W h - r||^2 + varphi(h) + phi(r).
double code_objective(const ConstVectorRef& y, const Matrix& w,
                      const ProblemSpec& spec, const ConstVectorRef& h,
                      const ConstVectorRef& r);

/// Minimizes code_objective over h in H, r in R by alternating exact
/// block steps: a prox-gradient step on h with step 1 / ||W||_2^2
/// followed by the exact outlier prox. Starts from h = 0,
/// r = project_R(0); stops when max(||h - h+|| * L', ||r - r+||) <= tol
/// or after max_iters sweeps. The minimizer is left in ws.h / ws.r.
/// Pass w_norm_sq >= 0 to reuse a precomputed ||W||_2^2.
CodeStats solve_code_in(const ConstVectorRef& y, const Matrix& w,
                        const ProblemSpec& spec, double tol, int max_iters,
                        CodeWorkspace& ws, double w_norm_sq = -1.0);

CodeSolution solve_code(const ConstVectorRef& y, const Matrix& w,
                        const ProblemSpec& spec, double tol, int max_iters);

}  // namespace smf

#endif  // SMF_SUBPROB_HPP
