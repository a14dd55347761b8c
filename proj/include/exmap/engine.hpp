#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "exmap/stats.hpp"

namespace exmap {

enum class StatisticKind { Kw, Acd, OlsF };

const char* statistic_name(StatisticKind kind);
std::optional<StatisticKind> statistic_by_name(const std::string& name);

// paper: #{T_r >= T_obs} / R; add_one: (1 + #{...}) / (R + 1), never zero.
enum class PValueRule { Paper, AddOne };

struct TestSpec {
    HypothesisPair pair;
    FocalDesign design;
    AssignmentMechanism mech;
    std::vector<StatisticKind> statistics;
    int R = 500;
    std::uint64_t seed = 0;
    PValueRule p_value_rule = PValueRule::Paper;
    int threads = 1;
    bool retain_draws = false;
    long max_attempts = 10000;  // rejection sampling budget per accepted draw
};

struct StatOutcome {
    StatisticKind kind;
    double t_obs = 0.0;
    double p_hat = 0.0;
    std::vector<double> draw_values;  // populated only when retain_draws
};

struct TestResult {
    std::vector<StatOutcome> statistics;
    double acceptance_rate = 1.0;          // accepted draws / sampling attempts
    std::vector<int> observed_group_sizes;  // |S_j(Z)| for j in [kappa]
    int degenerate_draws = 0;               // draws with < 2 nonempty groups
    int focal_size = 0;
    int kappa = 0;
    int R = 0;
    std::uint64_t seed = 0;
};

// Monte Carlo randomization test: observed statistics, R conditional draws,
// p-hat per statistic. Draw r depends only on (seed, r), so the result is
// independent of the thread count.
TestResult run_test(const TestSpec& spec, const std::vector<double>& Y,
                    const AssignmentVector& Z, const Network& net);

// Exact conditional p-values by exhausting C^S: explicit designs enumerate
// their assignment list with multiplicity weights, constraint designs
// enumerate the design's support (refused above support_cap patterns).
// Values align with spec.statistics.
std::vector<double> exact_test(const TestSpec& spec, const std::vector<double>& Y,
                               const AssignmentVector& Z, const Network& net,
                               std::uint64_t support_cap = std::uint64_t{1} << 20);

struct ProbeRow {
    int R;
    std::vector<double> sd;  // empirical sd of p-hat per statistic
};

// Re-runs the test `reps` times per R with independent seeds; the sd of
// p-hat should shrink like 1/sqrt(R).
std::vector<ProbeRow> error_scaling_probe(const TestSpec& spec, const std::vector<double>& Y,
                                          const AssignmentVector& Z, const Network& net,
                                          const std::vector<int>& r_grid, int reps);

}  // namespace exmap
