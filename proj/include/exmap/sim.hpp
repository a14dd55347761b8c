#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "exmap/engine.hpp"

namespace exmap {

enum class DgpKind { Dgp1, Dgp2 };

// Outcome model: Y_i = D_i + tau * f(#treated peers) + noise, where f is the
// identity for DGP 1 and the capped curve g for DGP 2.
struct DgpConfig {
    DgpKind kind = DgpKind::Dgp1;
    double tau = 0.0;
    double noise_sd = 1.0;
};

// g(a) = a for a <= 2, 1/a for a >= 3.
double g_dgp2(long a);

std::vector<double> gen_outcomes(const DgpConfig& dgp, const AssignmentVector& D,
                                 const Network& net, Rng& rng);

enum class ComplianceKind { Perfect, OneSidedBernoulli };

struct ComplianceModel {
    ComplianceKind kind = ComplianceKind::Perfect;
    double q = 1.0;  // take-up probability among assigned, one-sided model
};

// Treatment take-up: D = Z under perfect compliance; one-sided model lets
// assigned units take the treatment with probability q, controls never do.
AssignmentVector apply_compliance(const AssignmentVector& Z, const ComplianceModel& model,
                                  Rng& rng);

// Full rejection-frequency experiment over a tau grid. Every (tau, rep) cell
// draws a fresh network, assignment, take-up and outcome vector from seeds
// derived from (seed, cell index), so cells are individually re-runnable.
struct ExperimentConfig {
    int n = 200;
    double network_p = 0.015;
    AssignmentMechanism mech = CompleteRandomization{200, 100};
    ExposureKind e0 = ExposureKind::Own;
    ExposureKind e1 = ExposureKind::OwnAndAnyPeer;
    OrderRule order = OrderRule::Lex;
    int kappa = 2;
    FocalMethod method = FocalMethod::Mis;
    double fraction = 0.5;  // random method
    long z0_draws = 20000;  // biclique method
    int biclique_min_units = 2;
    int biclique_min_assignments = 2;
    BicliqueScore biclique_score = BicliqueScore::UnitsLogAssignments;
    long biclique_budget = 100000;
    std::vector<StatisticKind> statistics{StatisticKind::Kw, StatisticKind::Acd,
                                          StatisticKind::OlsF};
    bool include_simes = true;  // adds a combined row when >= 2 statistics
    std::vector<double> tau_grid{0.0, 1.0, 2.0};
    DgpKind dgp = DgpKind::Dgp1;
    double noise_sd = 1.0;
    ComplianceModel compliance;
    int R = 500;
    int reps = 200;
    double alpha = 0.05;
    std::uint64_t seed = 0;
    int threads = 1;
    PValueRule p_value_rule = PValueRule::Paper;
    long max_attempts = 10000;
};

struct SimCell {
    double tau;
    std::string statistic;
    std::string method;
    std::string exposure_pair;
    double rejection_rate;
    double mean_focal_size;
    double mean_acceptance_rate;
    int degenerate_reps;
};

std::vector<SimCell> rejection_frequency_experiment(const ExperimentConfig& config);

}  // namespace exmap
