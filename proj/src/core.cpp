#include "smf/core.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace smf {

namespace {

double require_weight(const std::map<std::string, double>& params,
                      const std::string& key, double fallback = -1.0) {
  auto it = params.find(key);
  double v;
  if (it == params.end()) {
    if (fallback < 0.0)
      throw std::invalid_argument("make_spec: missing required param '" + key + "'");
    v = fallback;
  } else {
    v = it->second;
  }
  if (!std::isfinite(v) || v < 0.0)
    throw std::invalid_argument("make_spec: param '" + key + "' must be finite and >= 0");
  return v;
}

void reject_unknown(const std::map<std::string, double>& params,
                    std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : params) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok)
      throw std::invalid_argument("make_spec: param '" + key +
                                  "' is not accepted by this formulation");
  }
}

std::vector<std::vector<int>> singleton_partition(int k) {
  std::vector<std::vector<int>> groups(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) groups[static_cast<std::size_t>(i)] = {i};
  return groups;
}

void check_partition(const std::vector<std::vector<int>>& groups, int k) {
  std::set<int> seen;
  for (const auto& g : groups) {
    if (g.empty())
      throw std::invalid_argument("make_spec: empty OSSL group");
    for (int idx : g) {
      if (idx < 0 || idx >= k)
        throw std::invalid_argument("make_spec: OSSL group index out of range");
      if (!seen.insert(idx).second)
        throw std::invalid_argument("make_spec: OSSL groups overlap");
    }
  }
  if (static_cast<int>(seen.size()) != k)
    throw std::invalid_argument("make_spec: OSSL groups do not cover [k]");
}

void check_psd(const Matrix& m) {
  if (m.rows() != m.cols())
    throw std::invalid_argument("make_spec: SSODL matrix must be square");
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10 * (1.0 + m.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("make_spec: SSODL matrix must be symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-10 * (1.0 + es.eigenvalues().cwiseAbs().maxCoeff()))
    throw std::invalid_argument("make_spec: SSODL matrix must be positive semidefinite");
}

}  // namespace

void Dataset::validate() const {
  if (values.rows() < 1 || values.cols() < 1)
    throw std::invalid_argument("Dataset: needs d >= 1 and n >= 1");
  if (!values.allFinite())
    throw std::invalid_argument("Dataset: non-finite entries");
}

void ProblemSpec::validate() const {
  if (d < 1 || k < 1)
    throw std::invalid_argument("ProblemSpec: d and k must be positive");
  for (const PenaltyDescriptor* p : {&dict_reg, &coeff_reg, &outlier_reg}) {
    if (p->weight < 0.0 || !std::isfinite(p->weight))
      throw std::invalid_argument("ProblemSpec: negative penalty weight");
    if (p->kind == PenaltyKind::GroupL2) {
      if (p->groups.size() != p->group_weights.size())
        throw std::invalid_argument("ProblemSpec: group/weight size mismatch");
      check_partition(p->groups, k);
    }
    if (p->kind == PenaltyKind::QuadraticForm) check_psd(p->quad);
  }
  for (const SetDescriptor* s : {&dict_set, &coeff_set, &outlier_set}) {
    if (s->kind == SetKind::Box && s->lo > s->hi)
      throw std::invalid_argument("ProblemSpec: empty box");
    if ((s->kind == SetKind::L2Ball || s->kind == SetKind::L2UnitColumns ||
         s->kind == SetKind::NonNegL2UnitColumns) &&
        s->radius <= 0.0)
      throw std::invalid_argument("ProblemSpec: nonpositive radius");
  }
}

const char* formulation_name(Formulation f) {
  switch (f) {
    case Formulation::ODL: return "odl";
    case Formulation::OSSL: return "ossl";
    case Formulation::ONMF: return "onmf";
    case Formulation::SSODL: return "ssodl";
    case Formulation::ORPCA: return "orpca";
    case Formulation::OMRMD: return "omrmd";
    case Formulation::ORNMF: return "ornmf";
  }
  return "?";
}

Formulation formulation_from_name(const std::string& name) {
  std::string s;
  for (char c : name) s.push_back(static_cast<char>(std::tolower(c)));
  if (s == "odl") return Formulation::ODL;
  if (s == "ossl") return Formulation::OSSL;
  if (s == "onmf") return Formulation::ONMF;
  if (s == "ssodl") return Formulation::SSODL;
  if (s == "orpca") return Formulation::ORPCA;
  if (s == "omrmd") return Formulation::OMRMD;
  if (s == "ornmf") return Formulation::ORNMF;
  throw std::invalid_argument("unknown formulation '" + name + "'");
}

ProblemSpec make_spec(Formulation f, int d, int k,
                      const std::map<std::string, double>& params,
                      const std::vector<std::vector<int>>& ossl_groups,
                      const Matrix& ssodl_laplacian) {
  if (d < 1 || k < 1)
    throw std::invalid_argument("make_spec: d and k must be positive");

  ProblemSpec spec;
  spec.formulation = f;
  spec.d = d;
  spec.k = k;
  spec.outlier_set.kind = SetKind::ZeroSet;
  const double lambda_default = 1.0 / std::sqrt(static_cast<double>(d));

  switch (f) {
    case Formulation::ODL: {
      reject_unknown(params, {"lambda"});
      spec.dict_set = {SetKind::L2UnitColumns, 0, 0, 1.0};
      spec.coeff_reg = {PenaltyKind::L1, require_weight(params, "lambda", lambda_default)};
      break;
    }
    case Formulation::OSSL: {
      reject_unknown(params, {"lambda"});
      spec.coeff_reg.kind = PenaltyKind::GroupL2;
      const double lam = require_weight(params, "lambda");
      spec.coeff_reg.weight = lam;
      spec.coeff_reg.groups = ossl_groups.empty() ? singleton_partition(k) : ossl_groups;
      check_partition(spec.coeff_reg.groups, k);
      spec.coeff_reg.group_weights.assign(spec.coeff_reg.groups.size(), lam);
      break;
    }
    case Formulation::ONMF: {
      reject_unknown(params, {"lambda"});
      spec.dict_set.kind = SetKind::L1SimplexColumns;
      spec.coeff_set.kind = SetKind::NonNeg;
      spec.coeff_reg = {PenaltyKind::SqL2, require_weight(params, "lambda", lambda_default)};
      break;
    }
    case Formulation::SSODL: {
      reject_unknown(params, {"lambda1", "lambda2"});
      spec.dict_set.kind = SetKind::L1SimplexColumns;
      spec.coeff_set.kind = SetKind::NonNeg;
      spec.dict_reg.kind = PenaltyKind::QuadraticForm;
      spec.dict_reg.weight = require_weight(params, "lambda1");
      spec.dict_reg.quad = ssodl_laplacian.size() == 0
                               ? Matrix(Matrix::Identity(d, d))
                               : ssodl_laplacian;
      if (spec.dict_reg.quad.rows() != d)
        throw std::invalid_argument("make_spec: SSODL matrix must be d x d");
      check_psd(spec.dict_reg.quad);
      spec.coeff_reg = {PenaltyKind::SqL2, require_weight(params, "lambda2")};
      break;
    }
    case Formulation::ORPCA: {
      // psi = (lambda1 / 2n) ||W||^2; the sample count enters the weight.
      reject_unknown(params, {"lambda1", "lambda2", "n"});
      const double n = require_weight(params, "n");
      if (n < 1.0) throw std::invalid_argument("make_spec: ORPCA needs n >= 1");
      spec.outlier_set.kind = SetKind::All;
      spec.dict_reg = {PenaltyKind::SqL2,
                       require_weight(params, "lambda1", lambda_default) / n};
      spec.coeff_reg = {PenaltyKind::SqL2, require_weight(params, "lambda1", lambda_default)};
      spec.outlier_reg = {PenaltyKind::L1, require_weight(params, "lambda2", lambda_default)};
      break;
    }
    case Formulation::OMRMD: {
      reject_unknown(params, {"lambda1", "lambda2", "n"});
      const double n = require_weight(params, "n");
      if (n < 1.0) throw std::invalid_argument("make_spec: OMRMD needs n >= 1");
      spec.coeff_set = {SetKind::L2Ball, 0, 0, 1.0};
      spec.outlier_set.kind = SetKind::All;
      spec.dict_reg = {PenaltyKind::MaxRowNormSq, require_weight(params, "lambda1") / n};
      spec.outlier_reg = {PenaltyKind::L1, require_weight(params, "lambda2")};
      break;
    }
    case Formulation::ORNMF: {
      reject_unknown(params, {"lambda", "M", "Mprime"});
      const double M = require_weight(params, "M");
      const double Mp = require_weight(params, "Mprime");
      if (M <= 0.0 || Mp <= 0.0)
        throw std::invalid_argument("make_spec: ORNMF needs M > 0 and Mprime > 0");
      spec.dict_set = {SetKind::NonNegL2UnitColumns, 0, 0, 1.0};
      spec.coeff_set = {SetKind::Box, 0.0, M};
      spec.outlier_set = {SetKind::Box, -Mp, Mp};
      spec.outlier_reg = {PenaltyKind::L1, require_weight(params, "lambda", lambda_default)};
      break;
    }
  }
  spec.validate();
  return spec;
}

bool check_step_condition(long n, long b, long m, double theta) {
  if (n < 2 || b < 1 || b > n || m < 1)
    throw std::invalid_argument("check_step_condition: need n >= 2, 1 <= b <= n, m >= 1");
  if (theta <= 2.0) return false;
  const double alpha = static_cast<double>(n - b) /
                       (static_cast<double>(b) * static_cast<double>(n - 1));
  return theta * (theta - 1.0) >= 2.0 * static_cast<double>(m) *
                                      static_cast<double>(m + 1) * alpha;
}

std::pair<long, long> default_sizing(long n, double c1, double c2) {
  if (n < 1) throw std::invalid_argument("default_sizing: n must be >= 1");
  const double nd = static_cast<double>(n);
  long b = std::llround(c1 * std::pow(nd, 2.0 / 3.0));
  long m = std::llround(c2 * std::cbrt(nd));
  b = std::clamp(b, 1L, n);
  m = std::max(1L, m);
  return {b, m};
}

void SolverConfig::resolve(Index n) {
  if (n < 1) throw std::invalid_argument("SolverConfig: empty dataset");
  auto [b, m] = default_sizing(static_cast<long>(n), c1, c2);
  if (batch_size == 0) batch_size = static_cast<int>(b);
  if (inner_iters == 0) inner_iters = static_cast<int>(m);
  if (batch_size < 1 || batch_size > n)
    throw std::invalid_argument("SolverConfig: need 1 <= b <= n");
  if (inner_iters < 1) throw std::invalid_argument("SolverConfig: need m >= 1");
  if (outer_iters < 0) throw std::invalid_argument("SolverConfig: need S >= 0");
  if (!(step_size > 0.0)) throw std::invalid_argument("SolverConfig: need eta > 0");
  if (!(tau > 0.0)) throw std::invalid_argument("SolverConfig: need tau > 0");
  if (!(subprob_tol_floor > 0.0))
    throw std::invalid_argument("SolverConfig: need tol floor > 0");
  if (subprob_max_iters < 1)
    throw std::invalid_argument("SolverConfig: need subprob_max_iters >= 1");
}

}  // namespace smf
