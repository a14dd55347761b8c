#pragma once

#include <optional>
#include <string>

#include "exmap/config.hpp"
#include "exmap/sim.hpp"
#include "exmap/unit_table.hpp"

namespace exmap {

// Everything the `test` command reads from its config file. The mechanism is
// kept declarative here because stratified designs need the unit table.
struct TestConfig {
    bool undirected = true;

    std::string mechanism_kind = "complete";  // bernoulli | complete | stratified
    double bernoulli_p = 0.5;
    long complete_m = -1;                  // -1: infer from the observed assignment
    std::string stratified_m = "auto";     // auto | comma list "label:count,..."

    ExposureKind e0 = ExposureKind::Own;
    ExposureKind e1 = ExposureKind::OwnAndAnyPeer;
    OrderRule order = OrderRule::Lex;
    int kappa = 2;

    FocalMethod method = FocalMethod::Mis;
    double fraction = 0.5;
    long z0_draws = 20000;
    int biclique_min_units = 2;
    int biclique_min_assignments = 2;
    BicliqueScore biclique_score = BicliqueScore::UnitsLogAssignments;
    long biclique_budget = 100000;

    std::vector<StatisticKind> statistics{StatisticKind::Kw, StatisticKind::Acd,
                                          StatisticKind::OlsF};
    int R = 2000;
    double alpha = 0.05;
    std::uint64_t seed = 1;
    PValueRule p_value_rule = PValueRule::Paper;
    long max_attempts = 10000;
};

TestConfig parse_test_config(const KeyValues& kv);

// Builds the concrete mechanism for n units. Stratified designs take their
// strata from the unit table; per-stratum treated counts come from the config
// or, with "auto", from the observed assignment.
AssignmentMechanism resolve_mechanism(const TestConfig& cfg, const UnitTable& table);

ExperimentConfig parse_sim_config(const KeyValues& kv);

// shared name maps
std::optional<FocalMethod> focal_method_by_name(const std::string& name);
std::optional<BicliqueScore> biclique_score_by_name(const std::string& name);
std::optional<PValueRule> p_value_rule_by_name(const std::string& name);

}  // namespace exmap
