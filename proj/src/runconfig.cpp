#include "exmap/runconfig.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "exmap/errors.hpp"

namespace exmap {

std::optional<FocalMethod> focal_method_by_name(const std::string& name) {
    if (name == "mis") return FocalMethod::Mis;
    if (name == "random") return FocalMethod::Random;
    if (name == "biclique") return FocalMethod::Biclique;
    return std::nullopt;
}

std::optional<BicliqueScore> biclique_score_by_name(const std::string& name) {
    if (name == "units_log_assignments") return BicliqueScore::UnitsLogAssignments;
    if (name == "units") return BicliqueScore::Units;
    if (name == "product") return BicliqueScore::Product;
    return std::nullopt;
}

std::optional<PValueRule> p_value_rule_by_name(const std::string& name) {
    if (name == "paper") return PValueRule::Paper;
    if (name == "add_one") return PValueRule::AddOne;
    return std::nullopt;
}

namespace {

ExposureKind parse_exposure(const KeyValues& kv, const std::string& key,
                            ExposureKind fallback) {
    const std::string name = kv.get_string(key, exposure_name(fallback));
    auto k = exposure_by_name(name);
    if (!k)
        throw ValidationError("unknown exposure '" + name +
                              "' (valid: constant, own, any_neighborhood, own_any_peer, "
                              "own_peer_count, identity)");
    return *k;
}

OrderRule parse_order(const KeyValues& kv) {
    const std::string name = kv.get_string("exposure.order", "lex");
    if (name == "lex") return OrderRule::Lex;
    if (name == "revlex") return OrderRule::RevLex;
    throw ValidationError("unknown exposure.order '" + name + "' (valid: lex, revlex)");
}

std::vector<StatisticKind> parse_statistics(const KeyValues& kv) {
    std::vector<std::string> names = kv.get_list("stats");
    if (names.empty()) names = {"kw", "acd", "olsf"};
    std::vector<StatisticKind> out;
    for (const std::string& name : names) {
        auto k = statistic_by_name(name);
        if (!k)
            throw ValidationError("unknown statistic '" + name + "' (valid: kw, acd, olsf)");
        out.push_back(*k);
    }
    return out;
}

void parse_focal_common(const KeyValues& kv, FocalMethod& method, int& kappa,
                        double& fraction, long& z0_draws, int& min_units,
                        int& min_assignments, BicliqueScore& score, long& budget) {
    const std::string m = kv.get_string("focal.method", "mis");
    auto fm = focal_method_by_name(m);
    if (!fm)
        throw ValidationError("unknown focal.method '" + m + "' (valid: mis, random, biclique)");
    method = *fm;
    kappa = static_cast<int>(kv.get_long("focal.kappa", kappa));
    if (kappa < 2) throw ValidationError("focal.kappa must be >= 2");
    fraction = kv.get_double("focal.fraction", fraction);
    z0_draws = kv.get_long("biclique.z0_draws", z0_draws);
    min_units = static_cast<int>(kv.get_long("biclique.min_units", min_units));
    min_assignments = static_cast<int>(kv.get_long("biclique.min_assignments", min_assignments));
    const std::string sc = kv.get_string("biclique.score", "units_log_assignments");
    auto bs = biclique_score_by_name(sc);
    if (!bs)
        throw ValidationError("unknown biclique.score '" + sc +
                              "' (valid: units_log_assignments, units, product)");
    score = *bs;
    budget = kv.get_long("biclique.budget", budget);
}

PValueRule parse_rule(const KeyValues& kv) {
    const std::string name = kv.get_string("test.p_value_rule", "paper");
    auto rule = p_value_rule_by_name(name);
    if (!rule)
        throw ValidationError("unknown test.p_value_rule '" + name +
                              "' (valid: paper, add_one)");
    return *rule;
}

void reject_unused(const KeyValues& kv) {
    const std::vector<std::string> unused = kv.unused_keys();
    if (!unused.empty()) {
        std::string all;
        for (const auto& k : unused) all += (all.empty() ? "" : ", ") + k;
        throw ValidationError("unknown config keys: " + all);
    }
}

}  // namespace

TestConfig parse_test_config(const KeyValues& kv) {
    TestConfig cfg;
    cfg.undirected = kv.get_bool("network.undirected", true);
    cfg.mechanism_kind = kv.get_string("mechanism.kind", "complete");
    if (cfg.mechanism_kind != "bernoulli" && cfg.mechanism_kind != "complete" &&
        cfg.mechanism_kind != "stratified")
        throw ValidationError("unknown mechanism.kind '" + cfg.mechanism_kind +
                              "' (valid: bernoulli, complete, stratified)");
    cfg.bernoulli_p = kv.get_double("mechanism.p", 0.5);
    cfg.complete_m = kv.get_long("mechanism.m", -1);
    cfg.stratified_m = kv.get_string("mechanism.m_per_stratum", "auto");

    cfg.e0 = parse_exposure(kv, "exposure.e0", cfg.e0);
    cfg.e1 = parse_exposure(kv, "exposure.e1", cfg.e1);
    cfg.order = parse_order(kv);
    parse_focal_common(kv, cfg.method, cfg.kappa, cfg.fraction, cfg.z0_draws,
                       cfg.biclique_min_units, cfg.biclique_min_assignments,
                       cfg.biclique_score, cfg.biclique_budget);
    cfg.statistics = parse_statistics(kv);
    cfg.R = static_cast<int>(kv.get_long("test.R", cfg.R));
    if (cfg.R < 1) throw ValidationError("test.R must be >= 1");
    cfg.alpha = kv.get_double("test.alpha", cfg.alpha);
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0))
        throw ValidationError("test.alpha must be in (0, 1)");
    cfg.seed = kv.get_seed("test.seed", cfg.seed);
    cfg.p_value_rule = parse_rule(kv);
    cfg.max_attempts = kv.get_long("test.max_attempts", cfg.max_attempts);
    if (cfg.max_attempts < 1) throw ValidationError("test.max_attempts must be >= 1");
    reject_unused(kv);
    return cfg;
}

AssignmentMechanism resolve_mechanism(const TestConfig& cfg, const UnitTable& table) {
    if (cfg.mechanism_kind == "bernoulli")
        return BernoulliDesign(table.n, cfg.bernoulli_p);
    if (cfg.mechanism_kind == "complete") {
        long m = cfg.complete_m;
        if (m < 0) m = std::accumulate(table.z.begin(), table.z.end(), 0L);
        return CompleteRandomization{table.n, static_cast<int>(m)};
    }
    if (!table.stratum)
        throw ValidationError("stratified mechanism needs a stratum column in the unit table");
    StratifiedComplete sc;
    sc.stratum = *table.stratum;
    if (cfg.stratified_m == "auto") {
        std::map<int, int> counts;
        for (int i = 0; i < table.n; ++i)
            if (table.z[i]) counts[sc.stratum[i]] += 1;
        std::set<int> labels(sc.stratum.begin(), sc.stratum.end());
        for (int label : labels) sc.treated.emplace_back(label, counts[label]);
    } else {
        std::istringstream in(cfg.stratified_m);
        std::string item;
        while (std::getline(in, item, ',')) {
            const size_t colon = item.find(':');
            if (colon == std::string::npos)
                throw ValidationError(
                    "mechanism.m_per_stratum entries must look like 'label:count'");
            sc.treated.emplace_back(std::stoi(item.substr(0, colon)),
                                    std::stoi(item.substr(colon + 1)));
        }
    }
    return sc;
}

ExperimentConfig parse_sim_config(const KeyValues& kv) {
    ExperimentConfig cfg;
    cfg.n = static_cast<int>(kv.get_long("sim.n", cfg.n));
    if (cfg.n < 2) throw ValidationError("sim.n must be >= 2");
    cfg.network_p = kv.get_double("sim.network_p", 3.0 / cfg.n);
    if (!(cfg.network_p >= 0.0 && cfg.network_p <= 1.0))
        throw ValidationError("sim.network_p must be in [0, 1]");

    const std::string mech = kv.get_string("mechanism.kind", "complete");
    if (mech == "complete") {
        const int m = static_cast<int>(kv.get_long("mechanism.m", cfg.n / 2));
        cfg.mech = CompleteRandomization{cfg.n, m};
    } else if (mech == "bernoulli") {
        cfg.mech = BernoulliDesign(cfg.n, kv.get_double("mechanism.p", 0.5));
    } else {
        throw ValidationError("simulate supports mechanism.kind bernoulli or complete");
    }

    cfg.e0 = parse_exposure(kv, "exposure.e0", cfg.e0);
    cfg.e1 = parse_exposure(kv, "exposure.e1", cfg.e1);
    cfg.order = parse_order(kv);
    parse_focal_common(kv, cfg.method, cfg.kappa, cfg.fraction, cfg.z0_draws,
                       cfg.biclique_min_units, cfg.biclique_min_assignments,
                       cfg.biclique_score, cfg.biclique_budget);
    cfg.statistics = parse_statistics(kv);
    cfg.include_simes = kv.get_bool("sim.include_simes", true);

    cfg.tau_grid = kv.get_double_list("sim.tau_grid");
    if (cfg.tau_grid.empty()) cfg.tau_grid = {0.0, 1.0, 2.0};
    const std::string dgp = kv.get_string("sim.dgp", "dgp1");
    if (dgp == "dgp1") cfg.dgp = DgpKind::Dgp1;
    else if (dgp == "dgp2") cfg.dgp = DgpKind::Dgp2;
    else throw ValidationError("unknown sim.dgp '" + dgp + "' (valid: dgp1, dgp2)");
    cfg.noise_sd = kv.get_double("sim.noise_sd", 1.0);

    const std::string comp = kv.get_string("sim.compliance", "perfect");
    if (comp == "perfect") {
        cfg.compliance = {ComplianceKind::Perfect, 1.0};
    } else if (comp == "one_sided") {
        cfg.compliance = {ComplianceKind::OneSidedBernoulli,
                          kv.get_double("sim.compliance_q", 0.8)};
    } else {
        throw ValidationError("unknown sim.compliance '" + comp +
                              "' (valid: perfect, one_sided)");
    }

    cfg.R = static_cast<int>(kv.get_long("test.R", 500));
    if (cfg.R < 1) throw ValidationError("test.R must be >= 1");
    cfg.reps = static_cast<int>(kv.get_long("sim.reps", 200));
    if (cfg.reps < 1) throw ValidationError("sim.reps must be >= 1");
    cfg.alpha = kv.get_double("test.alpha", 0.05);
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0))
        throw ValidationError("test.alpha must be in (0, 1)");
    cfg.seed = kv.get_seed("test.seed", 1);
    cfg.p_value_rule = parse_rule(kv);
    cfg.max_attempts = kv.get_long("test.max_attempts", 10000);
    reject_unused(kv);
    return cfg;
}

}  // namespace exmap
