#pragma once
#include <vector>

#include "berlab/model.hpp"

namespace berlab {

// Exact sign-vector maximum-likelihood decision: global minimizer of
// ||y - channel*x|| over all sign vectors, enumerated in Gray-code order with
// one rank-1 residual update per codeword. Ties (measure zero) go to the
// codeword whose negative-coordinate bitmask is numerically smallest. The
// exhaustive budget caps n at 24; beyond that throws BudgetError.
DetectionResult map_detect(const Instance& inst);

struct BoxRelaxResult {
  DetectionResult detection;       // signs of the relaxed solution, sign(0)=+1
  Eigen::VectorXd relaxed;         // minimizer over the solid cube [-1,1]^n
  double relaxed_objective = 0.0;  // ||y - channel*relaxed||
  bool converged = false;
  int iters = 0;
};

// Box-constrained least squares by projected gradient with fixed step 1/L,
// L estimated by power iteration on the normal matrix to 1e-10 relative
// change. Starts at zero, stops when the projected-gradient max-norm falls
// to 1e-10 or after 1e5 iterations; hitting the cap reports converged=false
// with the best iterate rather than throwing.
BoxRelaxResult box_relax_detect(const Instance& inst);

struct MfGenieResult {
  bool correct = false;
  double statistic = 0.0;  // matched-filter inner product deciding the bit
};

// Single-bit genie decision: all other coordinates revealed, the remaining
// antipodal bit decided by the sign of the matched-filter statistic
// column_j . (x0_j*column_j + sigma*noise), with sign(0) treated as +1.
MfGenieResult mf_genie_detect(const Instance& inst, int bit_index);

// Exact minimum of ||y - channel*x|| / sqrt(n) over sign vectors differing
// from the truth in exactly k coordinates, via revolving-door enumeration of
// k-subsets with one swap (two rank-1 updates) per subset. n above 20 throws
// BudgetError; k outside [0, n] throws std::invalid_argument.
double shell_min_cost(const Instance& inst, int k);

// The whole distance-resolved profile in one Gray-code sweep: entry k is the
// minimum normalized residual over codewords at distance exactly k from the
// truth. Same budget as map_detect minus the tie bookkeeping; n capped at 20
// to match shell_min_cost.
std::vector<double> shell_min_curve(const Instance& inst);

}  // namespace berlab
