#ifndef SMF_PROX_HPP
#define SMF_PROX_HPP

#include "smf/types.hpp"

namespace smf {

double penalty_value(const PenaltyDescriptor& p, const Vector& x);
double penalty_value(const PenaltyDescriptor& p, const Matrix& x);

/// prox_penalty(p, scale, v) = argmin_x p(x) + (1 / (2 scale)) ||x - v||^2.
Vector prox_penalty(const PenaltyDescriptor& p, double scale, const Vector& v);
Matrix prox_penalty(const PenaltyDescriptor& p, double scale, const Matrix& v);
void prox_penalty_inplace(const PenaltyDescriptor& p, double scale, Matrix& v);

/// Euclidean projection onto the set; column kinds act per column.
Vector project_set(const SetDescriptor& s, const Vector& v);
Matrix project_set(const SetDescriptor& s, const Matrix& v);
void project_set_inplace(const SetDescriptor& s, Matrix& v);

/// Projection of a single dictionary column under a column-structured set.
void project_column_inplace(const SetDescriptor& s, Eigen::Ref<Vector> col);

bool set_contains(const SetDescriptor& s, const Matrix& v, double tol = 1e-12);
bool set_contains(const SetDescriptor& s, const Vector& v, double tol = 1e-12);

/// Composite prox for the coefficient block:
///   argmin_{x in H} varphi(x) + (1 / (2 scale)) ||x - v||^2.
/// Exact closed forms for every (varphi, H) pair arising in the
/// supported formulations.
void prox_coeff_inplace(const ProblemSpec& spec, double scale, Vector& v);

/// Composite prox for the outlier block at unit scale:
///   argmin_{x in R} phi(x) + (1/2) ||x - v||^2.
void prox_outlier_inplace(const ProblemSpec& spec, Vector& v);

/// Dictionary update prox:
///   argmin_W psi(W) + delta_C(W) + (1 / (2 eta)) ||W - v||^2.
/// Pure projection when psi == 0, pure penalty prox when C is the whole
/// space, Douglas-Rachford splitting otherwise (residual 1e-10, <= 500
/// iterations; throws std::runtime_error with the achieved residual on
/// failure).
Matrix prox_dictionary(const ProblemSpec& spec, double eta, const Matrix& v);
void prox_dictionary_inplace(const ProblemSpec& spec, double eta, Matrix& v);

}  // namespace smf

#endif  // SMF_PROX_HPP
