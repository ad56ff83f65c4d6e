#include "smf/prox.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace smf {

namespace {

void require_finite(const Matrix& v, const char* who) {
  if (!v.allFinite()) throw std::invalid_argument(std::string(who) + ": non-finite input");
}

double soft(double x, double t) {
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

// Projection of one column onto the probability simplex {x >= 0, sum x = 1}
// via the usual sort-and-threshold scheme.
void simplex_project(Eigen::Ref<Vector> col) {
  const Index n = col.size();
  std::vector<double> u(col.data(), col.data() + n);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cumsum = 0.0;
  double theta = 0.0;
  for (Index j = 0; j < n; ++j) {
    cumsum += u[static_cast<std::size_t>(j)];
    const double cand = (cumsum - 1.0) / static_cast<double>(j + 1);
    if (u[static_cast<std::size_t>(j)] - cand > 0.0) theta = cand;
  }
  for (Index i = 0; i < n; ++i) col[i] = std::max(col[i] - theta, 0.0);
}

// prox of (weight/2) * max_i ||row_i||^2 at scale sigma. The optimal
// threshold T solves weight*T = (1/sigma) * sum_{||v_i|| > T} (||v_i|| - T),
// a monotone scalar equation handled by bisection.
void max_row_norm_prox(double weight, double sigma, Matrix& v) {
  const Index rows = v.rows();
  Vector norms(rows);
  for (Index i = 0; i < rows; ++i) norms[i] = v.row(i).norm();
  const double top = norms.maxCoeff();
  if (top <= 0.0 || weight <= 0.0) return;

  auto slope = [&](double t) {
    double pull = 0.0;
    for (Index i = 0; i < rows; ++i)
      if (norms[i] > t) pull += norms[i] - t;
    return weight * t - pull / sigma;
  };

  double lo = 0.0, hi = top;
  const double tol = 1e-10 * std::max(1.0, top);
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (slope(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  const double t_star = 0.5 * (lo + hi);
  for (Index i = 0; i < rows; ++i)
    if (norms[i] > t_star) v.row(i) *= t_star / norms[i];
}

void quadratic_form_prox(const PenaltyDescriptor& p, double scale, Matrix& v) {
  Matrix sys = scale * p.weight * p.quad;
  sys.diagonal().array() += 1.0;
  Eigen::LLT<Matrix> llt(sys);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("prox_penalty: quadratic-form system not SPD");
  v = llt.solve(v);
}

}  // namespace

double penalty_value(const PenaltyDescriptor& p, const Vector& x) {
  switch (p.kind) {
    case PenaltyKind::Zero: return 0.0;
    case PenaltyKind::L1: return p.weight * x.lpNorm<1>();
    case PenaltyKind::SqL2: return 0.5 * p.weight * x.squaredNorm();
    case PenaltyKind::GroupL2: {
      double total = 0.0;
      for (std::size_t j = 0; j < p.groups.size(); ++j) {
        double sq = 0.0;
        for (int idx : p.groups[j]) sq += x[idx] * x[idx];
        total += p.group_weights[j] * std::sqrt(sq);
      }
      return total;
    }
    default:
      throw std::invalid_argument("penalty_value: matrix-only penalty on a vector");
  }
}

double penalty_value(const PenaltyDescriptor& p, const Matrix& x) {
  switch (p.kind) {
    case PenaltyKind::Zero: return 0.0;
    case PenaltyKind::L1: return p.weight * x.lpNorm<1>();
    case PenaltyKind::SqL2: return 0.5 * p.weight * x.squaredNorm();
    case PenaltyKind::MaxRowNormSq: {
      double top = 0.0;
      for (Index i = 0; i < x.rows(); ++i)
        top = std::max(top, x.row(i).squaredNorm());
      return 0.5 * p.weight * top;
    }
    case PenaltyKind::QuadraticForm:
      return 0.5 * p.weight * (x.transpose() * p.quad * x).trace();
    default:
      throw std::invalid_argument("penalty_value: vector-only penalty on a matrix");
  }
}

void prox_penalty_inplace(const PenaltyDescriptor& p, double scale, Matrix& v) {
  require_finite(v, "prox_penalty");
  if (!(scale > 0.0)) throw std::invalid_argument("prox_penalty: scale must be > 0");
  if (p.is_zero()) return;
  switch (p.kind) {
    case PenaltyKind::Zero: return;
    case PenaltyKind::L1: {
      const double t = scale * p.weight;
      v = v.unaryExpr([t](double x) { return soft(x, t); });
      return;
    }
    case PenaltyKind::SqL2:
      v *= 1.0 / (1.0 + scale * p.weight);
      return;
    case PenaltyKind::MaxRowNormSq:
      max_row_norm_prox(p.weight, scale, v);
      return;
    case PenaltyKind::QuadraticForm:
      quadratic_form_prox(p, scale, v);
      return;
    case PenaltyKind::GroupL2:
      throw std::invalid_argument("prox_penalty: GroupL2 applies to vectors");
  }
}

Matrix prox_penalty(const PenaltyDescriptor& p, double scale, const Matrix& v) {
  Matrix out = v;
  prox_penalty_inplace(p, scale, out);
  return out;
}

namespace {

void prox_penalty_vector_inplace(const PenaltyDescriptor& p, double scale, Vector& v) {
  switch (p.kind) {
    case PenaltyKind::Zero:
      return;
    case PenaltyKind::L1: {
      const double t = scale * p.weight;
      for (Index i = 0; i < v.size(); ++i) v[i] = soft(v[i], t);
      return;
    }
    case PenaltyKind::SqL2:
      v *= 1.0 / (1.0 + scale * p.weight);
      return;
    case PenaltyKind::GroupL2: {
      // Blockwise soft threshold: shrink each group radially.
      for (std::size_t j = 0; j < p.groups.size(); ++j) {
        double sq = 0.0;
        for (int idx : p.groups[j]) sq += v[idx] * v[idx];
        const double nrm = std::sqrt(sq);
        const double t = scale * p.group_weights[j];
        const double factor = nrm > t ? 1.0 - t / nrm : 0.0;
        for (int idx : p.groups[j]) v[idx] *= factor;
      }
      return;
    }
    default:
      throw std::invalid_argument("prox_penalty: matrix-only penalty on a vector");
  }
}

}  // namespace

Vector prox_penalty(const PenaltyDescriptor& p, double scale, const Vector& v) {
  require_finite(v, "prox_penalty");
  if (!(scale > 0.0)) throw std::invalid_argument("prox_penalty: scale must be > 0");
  Vector out = v;
  prox_penalty_vector_inplace(p, scale, out);
  return out;
}

void project_column_inplace(const SetDescriptor& s, Eigen::Ref<Vector> col) {
  switch (s.kind) {
    case SetKind::All:
      return;
    case SetKind::NonNeg:
      col = col.cwiseMax(0.0);
      return;
    case SetKind::Box:
      col = col.cwiseMax(s.lo).cwiseMin(s.hi);
      return;
    case SetKind::ZeroSet:
      col.setZero();
      return;
    case SetKind::L2Ball:
    case SetKind::L2UnitColumns: {
      const double nrm = col.norm();
      if (nrm > s.radius) col *= s.radius / nrm;
      return;
    }
    case SetKind::NonNegL2UnitColumns: {
      col = col.cwiseMax(0.0);
      const double nrm = col.norm();
      if (nrm > s.radius) col *= s.radius / nrm;
      return;
    }
    case SetKind::L1SimplexColumns:
      simplex_project(col);
      return;
  }
}

void project_set_inplace(const SetDescriptor& s, Matrix& v) {
  require_finite(v, "project_set");
  switch (s.kind) {
    case SetKind::All:
      return;
    case SetKind::NonNeg:
      v = v.cwiseMax(0.0);
      return;
    case SetKind::Box:
      v = v.cwiseMax(s.lo).cwiseMin(s.hi);
      return;
    case SetKind::ZeroSet:
      v.setZero();
      return;
    case SetKind::L2Ball: {
      const double nrm = v.norm();
      if (nrm > s.radius) v *= s.radius / nrm;
      return;
    }
    case SetKind::L2UnitColumns:
    case SetKind::NonNegL2UnitColumns:
    case SetKind::L1SimplexColumns:
      for (Index j = 0; j < v.cols(); ++j) project_column_inplace(s, v.col(j));
      return;
  }
}

Matrix project_set(const SetDescriptor& s, const Matrix& v) {
  Matrix out = v;
  project_set_inplace(s, out);
  return out;
}

Vector project_set(const SetDescriptor& s, const Vector& v) {
  require_finite(v, "project_set");
  Vector out = v;
  project_column_inplace(s, out);
  return out;
}

bool set_contains(const SetDescriptor& s, const Matrix& v, double tol) {
  return (project_set(s, v) - v).cwiseAbs().maxCoeff() <= tol;
}

bool set_contains(const SetDescriptor& s, const Vector& v, double tol) {
  if (v.size() == 0) return true;
  return (project_set(s, v) - v).cwiseAbs().maxCoeff() <= tol;
}

void prox_coeff_inplace(const ProblemSpec& spec, double scale, Vector& v) {
  const PenaltyDescriptor& p = spec.coeff_reg;
  const SetDescriptor& h_set = spec.coeff_set;
  if (p.is_zero()) {
    project_column_inplace(h_set, v);
    return;
  }
  if (h_set.kind == SetKind::All) {
    prox_penalty_vector_inplace(p, scale, v);
    return;
  }
  // Separable penalty over a separable set: the constrained coordinate
  // minimum is the clamp of the unconstrained one.
  if ((p.kind == PenaltyKind::SqL2 || p.kind == PenaltyKind::L1) &&
      (h_set.kind == SetKind::NonNeg || h_set.kind == SetKind::Box)) {
    prox_penalty_vector_inplace(p, scale, v);
    project_column_inplace(h_set, v);
    return;
  }
  throw std::invalid_argument("prox_coeff: unsupported penalty/set pair");
}

void prox_outlier_inplace(const ProblemSpec& spec, Vector& v) {
  const SetDescriptor& r_set = spec.outlier_set;
  if (r_set.kind == SetKind::ZeroSet) {
    v.setZero();
    return;
  }
  const PenaltyDescriptor& p = spec.outlier_reg;
  if (p.is_zero()) {
    project_column_inplace(r_set, v);
    return;
  }
  if (r_set.kind == SetKind::All) {
    prox_penalty_vector_inplace(p, 1.0, v);
    return;
  }
  if (p.kind == PenaltyKind::L1 &&
      (r_set.kind == SetKind::Box || r_set.kind == SetKind::NonNeg)) {
    prox_penalty_vector_inplace(p, 1.0, v);
    project_column_inplace(r_set, v);
    return;
  }
  throw std::invalid_argument("prox_outlier: unsupported penalty/set pair");
}

namespace {

// Douglas-Rachford splitting between prox of (eta * psi) and the
// projection onto C, relaxation 1, step 1.
void douglas_rachford(const ProblemSpec& spec, double eta, Matrix& v) {
  Matrix z = v;
  Matrix x(v.rows(), v.cols());
  Matrix y(v.rows(), v.cols());
  const int max_iters = 500;
  double residual = 0.0;
  for (int it = 0; it < max_iters; ++it) {
    x = z;
    prox_penalty_inplace(spec.dict_reg, eta, x);
    y = 2.0 * x - z;
    project_set_inplace(spec.dict_set, y);
    residual = (y - x).norm();
    z += y - x;
    if (residual <= 1e-10) {
      v = y;
      return;
    }
  }
  throw std::runtime_error("prox_dictionary: splitting stalled at residual " +
                           std::to_string(residual));
}

}  // namespace

void prox_dictionary_inplace(const ProblemSpec& spec, double eta, Matrix& v) {
  require_finite(v, "prox_dictionary");
  if (!(eta > 0.0)) throw std::invalid_argument("prox_dictionary: eta must be > 0");
  if (spec.dict_reg.is_zero()) {
    project_set_inplace(spec.dict_set, v);
    return;
  }
  if (spec.dict_set.kind == SetKind::All) {
    prox_penalty_inplace(spec.dict_reg, eta, v);
    return;
  }
  douglas_rachford(spec, eta, v);
}

Matrix prox_dictionary(const ProblemSpec& spec, double eta, const Matrix& v) {
  Matrix out = v;
  prox_dictionary_inplace(spec, eta, out);
  return out;
}

}  // namespace smf
