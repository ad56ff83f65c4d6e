#ifndef SMF_CORE_HPP
#define SMF_CORE_HPP

#include <map>
#include <string>
#include <vector>

#include "smf/types.hpp"

namespace smf {

/// Builds the fully-resolved spec for one formulation.
///
/// Recognized params: "lambda", "lambda1", "lambda2", "M", "Mprime".
/// ODL/ONMF/ORNMF default lambda to 1/sqrt(d) when absent, and ORPCA
/// defaults lambda1 = lambda2 = 1/sqrt(d). ORNMF additionally requires
/// M > 0 and Mprime > 0.
///
/// OSSL takes a partition of [k] into coefficient groups (defaults to
/// singletons); SSODL takes a symmetric PSD d x d matrix (defaults to
/// identity). Unknown params and inconsistent overrides are rejected.
ProblemSpec make_spec(Formulation f, int d, int k,
                      const std::map<std::string, double>& params = {},
                      const std::vector<std::vector<int>>& ossl_groups = {},
                      const Matrix& ssodl_laplacian = Matrix());

/// Step-size condition: theta > 2 and
/// theta * (theta - 1) >= 2 * m * (m + 1) * alpha(n, b).
bool check_step_condition(long n, long b, long m, double theta);

/// b = clamp(round(c1 * n^{2/3}), 1, n), m = max(1, round(c2 * n^{1/3})).
/// Rounding is half-away-from-zero.
std::pair<long, long> default_sizing(long n, double c1, double c2);

}  // namespace smf

#endif  // SMF_CORE_HPP
