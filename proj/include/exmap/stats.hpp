#pragma once

#include <optional>
#include <vector>

#include "exmap/focal.hpp"

namespace exmap {

// Per-focal ordinal group index: position of E1_i(z) within that unit's own
// ordered tilde set, 0-based, in [0, kappa).
struct Grouping {
    std::vector<int> index;
    int kappa = 0;
};

Grouping group_focals(const FocalDesign& design, const AssignmentVector& z,
                      const Network& net);

// Ranks 1..N with ties replaced by the average of their positions.
std::vector<double> midranks(const std::vector<double>& values);

// Statistics return nullopt when the grouping is degenerate (< 2 nonempty
// groups, or no testable regressor for the F statistic). The engine maps
// that to the least extreme value 0, identically for observed and resampled
// draws.
std::optional<double> kw_statistic(const std::vector<double>& y_focals,
                                   const Grouping& grouping, int kappa);
std::optional<double> kw_from_ranks(const std::vector<double>& ranks,
                                    const Grouping& grouping, int kappa);
std::optional<double> acd_statistic(const std::vector<double>& y_focals,
                                    const Grouping& grouping, int kappa);

// F statistic for the block of x columns in the regression of y on
// [1 | e0 columns | x columns]. Rows are focal units. Collinear columns are
// pruned by a rank-revealing decomposition (relative tolerance 1e-10); a
// perfect full-model fit reports +infinity.
std::optional<double> ols_f_statistic(const std::vector<double>& y,
                                      const std::vector<std::vector<double>>& e0_rows,
                                      const std::vector<std::vector<double>>& x_rows);

struct SimesResult {
    bool reject = false;
    std::optional<int> threshold_index;  // smallest 1-based i with p_(i) <= i*alpha/s
};

// Simes multiple-testing rule: reject when some ordered p-value p_(i) falls
// at or below i*alpha/s.
SimesResult simes(const std::vector<double>& p_values, double alpha);

// Equivalent combined p-value: min_i (s/i) * p_(i), clamped to [0, 1].
// simes(ps, alpha).reject == (simes_p_value(ps) <= alpha).
double simes_p_value(const std::vector<double>& p_values);

}  // namespace exmap
