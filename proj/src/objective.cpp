#include "smf/objective.hpp"

#include <omp.h>

#include <Eigen/QR>
#include <cmath>
#include <exception>
#include <stdexcept>

#include "smf/prox.hpp"

namespace smf {

void SampleScratch::resize(int threads, Index d, Index k) {
  code.resize(static_cast<std::size_t>(threads));
  resid.resize(static_cast<std::size_t>(threads));
  for (auto& ws : code) ws.resize(d, k);
  for (auto& v : resid) v.resize(d);
}

std::size_t SampleScratch::bytes() const {
  std::size_t total = 0;
  for (const auto& ws : code) total += ws.bytes();
  for (const auto& v : resid) total += static_cast<std::size_t>(v.size()) * sizeof(double);
  return total;
}

std::pair<double, CodeSolution> eval_loss(const Vector& y, const Matrix& w,
                                          const ProblemSpec& spec, double tol,
                                          int max_iters) {
  CodeSolution code = solve_code(y, w, spec, tol, max_iters);
  return {code.objective, std::move(code)};
}

namespace {

void check_feasible(const Matrix& w, const ProblemSpec& spec) {
  if (!set_contains(spec.dict_set, w, 1e-8))
    throw std::invalid_argument("eval_objective: dictionary is infeasible");
}

}  // namespace

double eval_objective_serial(const Dataset& data, const Matrix& w,
                             const ProblemSpec& spec, double tol, int max_iters) {
  check_feasible(w, spec);
  const Index n = data.num_samples();
  const double lip = spectral_norm_sq(w);
  CodeWorkspace ws;
  double sum = 0.0;
  for (Index j = 0; j < n; ++j) {
    sum += solve_code(data.values.col(j), w, spec, tol, max_iters, ws, lip).objective;
  }
  return sum / static_cast<double>(n) + penalty_value(spec.dict_reg, w);
}

double eval_objective(const Dataset& data, const Matrix& w, const ProblemSpec& spec,
                      double tol, int max_iters, bool parallel) {
  if (!parallel) return eval_objective_serial(data, w, spec, tol, max_iters);
  check_feasible(w, spec);
  const long n = static_cast<long>(data.num_samples());
  const double lip = spectral_norm_sq(w);
  double sum = 0.0;
  std::exception_ptr failure;

#pragma omp parallel
  {
    CodeWorkspace ws;
#pragma omp for ordered schedule(dynamic, 1)
    for (long j = 0; j < n; ++j) {
      double value = 0.0;
      bool ok = false;
      try {
        value = solve_code(data.values.col(j), w, spec, tol, max_iters, ws, lip).objective;
        ok = true;
      } catch (...) {
#pragma omp critical(smf_obj_err)
        if (!failure) failure = std::current_exception();
      }
#pragma omp ordered
      {
        if (ok) sum += value;
      }
    }
  }
  if (failure) std::rethrow_exception(failure);
  return sum / static_cast<double>(n) + penalty_value(spec.dict_reg, w);
}

void grad_batch_into(const Dataset& data, const int* idx, long count,
                     const Matrix& w, const ProblemSpec& spec, double tol,
                     int max_iters, double w_norm_sq, Matrix& out,
                     SampleScratch& scratch, bool parallel) {
  if (count < 1) throw std::invalid_argument("grad_batch_into: empty batch");
  const double lip = w_norm_sq >= 0.0 ? w_norm_sq : spectral_norm_sq(w);
  out.setZero();

  if (!parallel) {
    CodeWorkspace& ws = scratch.code.at(0);
    Vector& resid = scratch.resid.at(0);
    for (long i = 0; i < count; ++i) {
      const Index j = idx ? idx[i] : static_cast<Index>(i);
      const auto y = data.values.col(j);
      solve_code(y, w, spec, tol, max_iters, ws, lip);
      resid.noalias() = w * ws.h;
      resid += ws.r - y;
      out.noalias() += resid * ws.h.transpose();
    }
    out /= static_cast<double>(count);
    return;
  }

  std::exception_ptr failure;
#pragma omp parallel
  {
    const int tid = omp_get_thread_num();
    CodeWorkspace& ws = scratch.code.at(static_cast<std::size_t>(tid));
    Vector& resid = scratch.resid.at(static_cast<std::size_t>(tid));
#pragma omp for ordered schedule(dynamic, 1)
    for (long i = 0; i < count; ++i) {
      bool ok = false;
      try {
        const Index j = idx ? idx[i] : static_cast<Index>(i);
        const auto y = data.values.col(j);
        solve_code(y, w, spec, tol, max_iters, ws, lip);
        resid.noalias() = w * ws.h;
        resid += ws.r - y;
        ok = true;
      } catch (...) {
#pragma omp critical(smf_grad_err)
        if (!failure) failure = std::current_exception();
      }
#pragma omp ordered
      {
        if (ok) out.noalias() += resid * ws.h.transpose();
      }
    }
  }
  if (failure) std::rethrow_exception(failure);
  out /= static_cast<double>(count);
}

Matrix grad_g(const Dataset& data, const Matrix& w, const ProblemSpec& spec,
              double tol, int max_iters, bool parallel) {
  SampleScratch scratch;
  scratch.resize(parallel ? omp_get_max_threads() : 1, w.rows(), w.cols());
  Matrix out(w.rows(), w.cols());
  grad_batch_into(data, nullptr, static_cast<long>(data.num_samples()), w, spec,
                  tol, max_iters, -1.0, out, scratch, parallel);
  return out;
}

Matrix grad_g_serial(const Dataset& data, const Matrix& w, const ProblemSpec& spec,
                     double tol, int max_iters) {
  return grad_g(data, w, spec, tol, max_iters, /*parallel=*/false);
}

double grad_map_norm_sq(const Matrix& w, const Matrix& g, const ProblemSpec& spec,
                        double eta, Matrix& scratch) {
  if (!(eta > 0.0)) throw std::invalid_argument("grad_mapping: eta must be > 0");
  scratch = w - eta * g;
  prox_dictionary_inplace(spec, eta, scratch);
  scratch = w - scratch;
  return scratch.squaredNorm() / (eta * eta);
}

StationarityReport grad_mapping(const Matrix& w, const Matrix& g,
                                const ProblemSpec& spec, double eta) {
  StationarityReport rep;
  rep.eta_used = eta;
  Matrix scratch(w.rows(), w.cols());
  rep.norm_sq = grad_map_norm_sq(w, g, spec, eta, scratch);
  rep.grad_map = scratch / eta;
  return rep;
}

double alpha_factor(long n, long b) {
  if (n < 2) throw std::invalid_argument("alpha_factor: n must be >= 2");
  if (b < 1 || b > n) throw std::invalid_argument("alpha_factor: need 1 <= b <= n");
  return static_cast<double>(n - b) /
         (static_cast<double>(b) * static_cast<double>(n - 1));
}

namespace {

Matrix orthonormal_basis(const Matrix& m) {
  Eigen::ColPivHouseholderQR<Matrix> qr(m);
  qr.setThreshold(1e-10);
  const Index rank = qr.rank();
  return qr.householderQ() * Matrix::Identity(m.rows(), rank);
}

}  // namespace

double expressed_variance(const Matrix& w_est, const Matrix& w_true) {
  if (w_true.cols() < 1 || w_est.cols() < 1)
    throw std::invalid_argument("expressed_variance: empty input");
  const Matrix q_true = orthonormal_basis(w_true);
  if (q_true.cols() != w_true.cols())
    throw std::invalid_argument("expressed_variance: w_true is rank deficient");
  const Matrix q_est = orthonormal_basis(w_est);
  const double overlap = (q_est.transpose() * q_true).squaredNorm();
  return overlap / static_cast<double>(w_true.cols());
}

}  // namespace smf
