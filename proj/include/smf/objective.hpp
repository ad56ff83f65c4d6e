#ifndef SMF_OBJECTIVE_HPP
#define SMF_OBJECTIVE_HPP

#include <utility>
#include <vector>

#include "smf/subprob.hpp"
#include "smf/types.hpp"

namespace smf {

struct StationarityReport {
  Matrix grad_map;
  double norm_sq = 0.0;
  double eta_used = 0.0;
};

/// Per-thread scratch shared by the batched kernels.
struct SampleScratch {
  std::vector<CodeWorkspace> code;
  std::vector<Vector> resid;

  void resize(int threads, Index d, Index k);
  std::size_t bytes() const;
};

/// Loss at one sample: the subproblem minimum plus the code that attains it.
std::pair<double, CodeSolution> eval_loss(const Vector& y, const Matrix& w,
                                          const ProblemSpec& spec, double tol,
                                          int max_iters = 500);

/// f(W) = (1/n) sum_i loss(y_i, W) + psi(W). Throws on infeasible w.
/// Sample losses accumulate in index order regardless of thread count,
/// so the result is bitwise reproducible.
double eval_objective(const Dataset& data, const Matrix& w, const ProblemSpec& spec,
                      double tol, int max_iters = 500, bool parallel = true);
double eval_objective_serial(const Dataset& data, const Matrix& w,
                             const ProblemSpec& spec, double tol, int max_iters = 500);

/// Mean loss gradient over the index set (idx == nullptr means all n
/// samples): (1/count) sum_j (W h*_j + r*_j - y_j) h*_j^T. Streaming:
/// per-sample codes are discarded right after their rank-1 update, and
/// updates apply in index order (bitwise thread-count independent).
void grad_batch_into(const Dataset& data, const int* idx, long count,
                     const Matrix& w, const ProblemSpec& spec, double tol,
                     int max_iters, double w_norm_sq, Matrix& out,
                     SampleScratch& scratch, bool parallel = true);

Matrix grad_g(const Dataset& data, const Matrix& w, const ProblemSpec& spec,
              double tol, int max_iters = 500, bool parallel = true);

/// Plain single-threaded reference used to pin down the parallel kernels.
Matrix grad_g_serial(const Dataset& data, const Matrix& w, const ProblemSpec& spec,
                     double tol, int max_iters = 500);

/// Gamma_{f',eta}(W) = (1/eta) (W - prox_{eta psi + delta_C}(W - eta g)).
StationarityReport grad_mapping(const Matrix& w, const Matrix& g,
                                const ProblemSpec& spec, double eta);

/// Squared gradient-mapping norm without allocating the report.
double grad_map_norm_sq(const Matrix& w, const Matrix& g, const ProblemSpec& spec,
                        double eta, Matrix& scratch);

/// Without-replacement variance factor (n - b) / (b (n - 1)).
double alpha_factor(long n, long b);

/// Expressed variance tr(P_est P_true) / k' with orthogonal projectors
/// onto the column spaces (rank-revealing QR, tolerance 1e-10).
/// Requires w_true to have full column rank.
double expressed_variance(const Matrix& w_est, const Matrix& w_true);

}  // namespace smf

#endif  // SMF_OBJECTIVE_HPP
