#ifndef SMF_TYPES_HPP
#define SMF_TYPES_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace smf {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Column-major sample matrix: column i is sample y_i.
struct Dataset {
  Matrix values;  // d x n
  std::string name;

  Index dim() const { return values.rows(); }
  Index num_samples() const { return values.cols(); }

  /// Throws std::invalid_argument on empty or non-finite data.
  void validate() const;
};

enum class Formulation { ODL, OSSL, ONMF, SSODL, ORPCA, OMRMD, ORNMF };

const char* formulation_name(Formulation f);
Formulation formulation_from_name(const std::string& name);

enum class PenaltyKind { Zero, L1, SqL2, GroupL2, MaxRowNormSq, QuadraticForm };

/// Concrete description of one of the regularizers psi, varphi, phi.
///
/// Conventions (x a vector, W a matrix with rows w_i):
///   L1            weight * ||x||_1
///   SqL2          (weight / 2) * ||x||^2
///   GroupL2       sum_j group_weights[j] * ||x_{groups[j]}||
///   MaxRowNormSq  (weight / 2) * max_i ||w_i||^2
///   QuadraticForm (weight / 2) * tr(W^T quad W), quad symmetric PSD
struct PenaltyDescriptor {
  PenaltyKind kind = PenaltyKind::Zero;
  double weight = 0.0;
  std::vector<std::vector<int>> groups;
  std::vector<double> group_weights;
  Matrix quad;

  bool is_zero() const { return kind == PenaltyKind::Zero || weight == 0.0; }
};

enum class SetKind {
  All,
  NonNeg,
  Box,
  L2Ball,
  L2UnitColumns,
  NonNegL2UnitColumns,
  L1SimplexColumns,
  ZeroSet
};

/// Closed convex constraint set. Column kinds apply per matrix column.
struct SetDescriptor {
  SetKind kind = SetKind::All;
  double lo = 0.0;     // Box
  double hi = 0.0;     // Box
  double radius = 1.0; // L2Ball, L2UnitColumns, NonNegL2UnitColumns
};

/// One of the problem formulations, fully resolved to its constraint
/// sets and regularizers.
struct ProblemSpec {
  Formulation formulation = Formulation::ODL;
  int d = 0;
  int k = 0;
  SetDescriptor dict_set;        // C
  SetDescriptor coeff_set;       // H
  SetDescriptor outlier_set;     // R ({0} for the non-robust loss)
  PenaltyDescriptor dict_reg;    // psi
  PenaltyDescriptor coeff_reg;   // varphi
  PenaltyDescriptor outlier_reg; // phi

  bool robust() const { return outlier_set.kind != SetKind::ZeroSet; }
  void validate() const;
};

enum class FinalOption { OptionI, OptionII };

struct SolverConfig {
  int outer_iters = 10;  // S
  int inner_iters = 0;   // m; 0 = derive via default_sizing
  int batch_size = 0;    // b; 0 = derive via default_sizing
  double step_size = 0.1;
  double theta = 3.0;
  double tau = 1e-3;
  double c1 = 0.2;
  double c2 = 0.5;
  std::uint64_t seed = 0;
  FinalOption final_option = FinalOption::OptionII;
  double subprob_tol_floor = 1e-12;
  int subprob_max_iters = 500;

  /// Fills inner_iters/batch_size from (c1, c2) when unset and checks
  /// bounds against the dataset size. Throws std::invalid_argument.
  void resolve(Index n);
};

struct TraceRecord {
  double data_passes = 0.0;
  double wall_time_s = 0.0;
  double objective = 0.0;
  double grad_map_norm_sq = 0.0;
  bool has_ev = false;
  double ev = 0.0;
};

struct DictionaryState {
  Matrix w;            // W^{s,t}
  Matrix anchor_w;     // W^{s,0}
  Matrix anchor_grad;  // G_{s,0}
  int outer_index = 0;
  int inner_index = 0;
};

}  // namespace smf

#endif  // SMF_TYPES_HPP
