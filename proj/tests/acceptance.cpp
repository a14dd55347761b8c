// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Tolerances are pinned in code next to each check.
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "example_net.hpp"
#include "exmap/engine.hpp"
#include "exmap/errors.hpp"
#include "exmap/sim.hpp"
#include "oracles.hpp"

using namespace exmap;

namespace {

int g_failures = 0;

void report(int idx, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%2d] %s %s (%s)\n", idx, pass ? "PASS" : "FAIL", name.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

double rate_of(const std::vector<SimCell>& table, double tau, const std::string& stat) {
    for (const auto& row : table)
        if (row.tau == tau && row.statistic == stat) return row.rejection_rate;
    throw Error("missing cell " + stat);
}

ExperimentConfig paper_experiment(ComplianceModel compliance, std::uint64_t seed) {
    ExperimentConfig cfg;
    cfg.n = 200;
    cfg.network_p = 3.0 / 200;
    cfg.mech = CompleteRandomization{200, 100};
    cfg.e0 = ExposureKind::Own;
    cfg.e1 = ExposureKind::OwnAndAnyPeer;
    cfg.kappa = 2;
    cfg.method = FocalMethod::Mis;
    cfg.statistics = {StatisticKind::Kw, StatisticKind::Acd, StatisticKind::OlsF};
    cfg.include_simes = false;
    cfg.tau_grid = {0.0, 2.0};
    cfg.dgp = DgpKind::Dgp1;
    cfg.compliance = compliance;
    cfg.R = 500;
    cfg.reps = 200;
    cfg.alpha = 0.05;
    cfg.seed = seed;
    return cfg;
}

// ---- criteria 1 and 2: size and power under perfect compliance ----

void criteria_size_and_power() {
    const ExperimentConfig cfg = paper_experiment({ComplianceKind::Perfect, 1.0}, 20260809);
    const auto table = rejection_frequency_experiment(cfg);

    const double upper = 0.05 + 3.0 * std::sqrt(0.05 * 0.95 / 200.0);
    bool size_ok = true;
    std::string size_detail;
    for (const char* stat : {"kw", "acd", "olsf"}) {
        const double rate = rate_of(table, 0.0, stat);
        size_ok = size_ok && rate <= upper && rate >= 0.01;
        size_detail += std::string(stat) + "=" + std::to_string(rate) + " ";
    }
    report(1, "size control at tau=0 (each rate in [0.01, 0.096])", size_ok,
           size_detail + "bound=" + std::to_string(upper));

    const double kw0 = rate_of(table, 0.0, "kw");
    const double kw2 = rate_of(table, 2.0, "kw");
    report(2, "power at tau=2 (kw >= 0.55 with margin >= 0.5 over tau=0)",
           kw2 >= 0.55 && kw2 - kw0 >= 0.5,
           "kw(0)=" + std::to_string(kw0) + " kw(2)=" + std::to_string(kw2));
}

// ---- criterion 3: monte carlo p-values track the exact oracle ----

struct ExactInstance {
    Network net;
    AssignmentVector z;
    std::vector<double> y;
    TestSpec spec;
};

ExactInstance fixed_path_instance() {
    ExactInstance inst{Network::from_edges(8, {{0, 1}, {2, 3}, {4, 5}, {6, 7}}, true),
                       {1, 0, 0, 1, 1, 0, 0, 1},
                       {1.7, 0.4, 0.9, 2.6, 0.1, 1.2, 2.2, 0.8},
                       {}};
    const HypothesisPair pair =
        HypothesisPair::builtin(ExposureKind::Own, ExposureKind::OwnAndAnyPeer);
    Rng rng(2);
    inst.spec.pair = pair;
    inst.spec.design = mis_design(pair, inst.z, inst.net, 2, rng);
    inst.spec.mech = CompleteRandomization{8, 4};
    inst.spec.statistics = {StatisticKind::Kw, StatisticKind::Acd, StatisticKind::OlsF};
    inst.spec.R = 500;
    return inst;
}

ExactInstance rejection_path_instance() {
    ExactInstance inst{example8::network(), example8::observed_z(), example8::outcomes(), {}};
    const HypothesisPair pair =
        HypothesisPair::builtin(ExposureKind::AnyNeighborhood, ExposureKind::OwnAndAnyPeer);
    Rng rng(3);
    inst.spec.pair = pair;
    inst.spec.design = mis_design(pair, inst.z, inst.net, 3, rng);
    inst.spec.mech = CompleteRandomization{8, 4};
    inst.spec.statistics = {StatisticKind::Kw, StatisticKind::Acd, StatisticKind::OlsF};
    inst.spec.R = 500;
    return inst;
}

void criterion_exactness() {
    bool ok = true;
    std::string detail;
    for (ExactInstance inst : {fixed_path_instance(), rejection_path_instance()}) {
        const std::vector<double> exact = exact_test(inst.spec, inst.y, inst.z, inst.net);
        long measurements = 0, within = 0;
        for (int run = 0; run < 1000; ++run) {
            TestSpec spec = inst.spec;
            spec.seed = 777000 + run;
            const TestResult res = run_test(spec, inst.y, inst.z, inst.net);
            for (size_t s = 0; s < exact.size(); ++s) {
                const double bound =
                    3.0 * std::sqrt(exact[s] * (1.0 - exact[s]) / spec.R) + 1e-12;
                ++measurements;
                if (std::abs(res.statistics[s].p_hat - exact[s]) <= bound) ++within;
            }
        }
        const double frac = static_cast<double>(within) / measurements;
        ok = ok && frac >= 0.99;
        detail += std::string(inst.spec.design.pair.e0.kind == ExposureKind::Own
                                  ? "fixed-path"
                                  : "rejection-path") +
                  "=" + std::to_string(frac) + " ";
    }
    report(3, "monte carlo error within 3 binomial SEs in >= 99% of 1000 runs", ok, detail);
}

// ---- criterion 4: 1/sqrt(R) error law on a synthetic p = 0.5 ----

void criterion_error_law() {
    const Network net(2);
    const AssignmentVector z{1, 0};
    const std::vector<double> y{2.0, 1.0};
    const HypothesisPair pair =
        HypothesisPair::builtin(ExposureKind::Constant, ExposureKind::Own);
    Rng rng(5);
    TestSpec spec;
    spec.pair = pair;
    spec.design = random_design(pair, z, net, 2, 1.0, rng);
    spec.mech = BernoulliDesign(2, 0.5);
    spec.statistics = {StatisticKind::Kw, StatisticKind::Acd};
    spec.seed = 4040;

    const std::vector<double> exact = exact_test(spec, y, z, net);
    bool ok = true;
    std::string detail = "exact=" + std::to_string(exact[0]) + " ";
    for (double p : exact) ok = ok && std::abs(p - 0.5) <= 1e-12;

    const auto rows = error_scaling_probe(spec, y, z, net, {100, 400, 1600}, 300);
    for (const auto& row : rows) {
        for (double sd : row.sd) {
            const double scaled = sd * std::sqrt(static_cast<double>(row.R));
            ok = ok && scaled >= 0.4 && scaled <= 0.6;
        }
        detail += "R" + std::to_string(row.R) + "=" + std::to_string(row.sd[0] * std::sqrt(row.R)) + " ";
    }
    report(4, "sd(p-hat)*sqrt(R) in [0.4, 0.6] at synthetic p = 0.5", ok, detail);
}

// ---- criteria 5 and 6: worked-example reconstruction and statistic oracles ----

void criteria_worked_example() {
    const Network net = example8::network();
    const AssignmentVector z = example8::observed_z();
    const HypothesisPair pair =
        HypothesisPair::builtin(ExposureKind::AnyNeighborhood, ExposureKind::OwnAndAnyPeer);

    bool tilde_ok = true;
    const std::vector<ExposureValue> expected{ExposureValue::tuple(0, 1),
                                              ExposureValue::tuple(1, 0),
                                              ExposureValue::tuple(1, 1)};
    for (int i = 0; i < 7; ++i) tilde_ok = tilde_ok && tilde_set(pair, i, z, net) == expected;
    tilde_ok = tilde_ok && tilde_set(pair, 7, z, net) ==
                               std::vector<ExposureValue>{ExposureValue::tuple(0, 0)};

    Rng rng(7);
    const FocalDesign design = random_design(pair, z, net, 3, 1.0, rng);
    const Grouping g = group_focals(design, z, net);
    std::vector<std::vector<double>> groups(3);
    std::vector<double> y_focal;
    for (size_t k = 0; k < design.focals.size(); ++k) {
        groups[g.index[k]].push_back(example8::outcomes()[design.focals[k]]);
        y_focal.push_back(example8::outcomes()[design.focals[k]]);
    }
    for (auto& gr : groups) std::sort(gr.begin(), gr.end());
    const bool groups_ok = groups[0] == std::vector<double>{2, 3, 3} &&
                           groups[1] == std::vector<double>{4, 5} &&
                           groups[2] == std::vector<double>{7, 8};
    report(5, "worked-example tilde sets and observed group multisets", tilde_ok && groups_ok,
           std::string("tilde=") + (tilde_ok ? "ok" : "bad") + " groups=" +
               (groups_ok ? "ok" : "bad"));

    const double kw = kw_statistic(y_focal, g, 3).value_or(-1.0);
    const double acd = acd_statistic(y_focal, g, 3).value_or(-1.0);
    bool ols_ok = true;
    double worst = 0.0;
    Rng orng(11);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::bernoulli_distribution coin(0.5);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 24 + trial % 20;
        std::vector<double> yy(n);
        std::vector<std::vector<double>> e0(n), x(n);
        for (int i = 0; i < n; ++i) {
            const double own = coin(orng) ? 1.0 : 0.0;
            const double peer = coin(orng) ? 1.0 : 0.0;
            e0[i] = {own};
            x[i] = {peer};
            yy[i] = 0.8 + 1.4 * own + 0.6 * peer + noise(orng);
        }
        const double got = ols_f_statistic(yy, e0, x).value_or(-1.0);
        const double want = oracle::ols_f_normal_equations(yy, e0, x);
        const double rel = std::abs(got - want) / std::max(1e-30, std::abs(want));
        worst = std::max(worst, rel);
        ols_ok = ols_ok && rel <= 1e-8;
    }
    const bool kw_ok = std::abs(kw - 75.0 / 14.0) <= 1e-12;
    const bool acd_ok = std::abs(acd - 29.0 / 9.0) <= 1e-12;
    report(6, "statistic oracles: kw = 75/14, acd = 29/9, ols vs normal equations",
           kw_ok && acd_ok && ols_ok,
           "kw=" + std::to_string(kw) + " acd=" + std::to_string(acd) +
               " ols_worst_rel=" + std::to_string(worst));
}

// ---- criterion 7: conditional sampler exactness in total variation ----

void criterion_sampler_exactness() {
    bool ok = true;
    std::string detail;

    // fixed-unit fast path on the paired instance
    {
        const ExactInstance inst = fixed_path_instance();
        const FixedPattern fixed = fixed_pattern(inst.spec.design);
        Rng rng(909);
        std::map<AssignmentVector, long> counts;
        const long draws = 100000;
        for (long r = 0; r < draws; ++r)
            counts[sample_conditional_fixed_units(inst.spec.mech, fixed, rng)] += 1;
        const auto law = oracle::conditional_law(
            inst.spec.mech, inst.net.size(), [&](const AssignmentVector& zz) {
                for (auto [i, v] : fixed)
                    if (zz[i] != v) return false;
                return true;
            });
        const double tv = oracle::total_variation(law, counts, draws);
        ok = ok && tv <= 0.01;
        detail += "fixed_tv=" + std::to_string(tv) + " ";
    }

    // rejection path: any-neighborhood null over three couples
    {
        const Network net = Network::from_edges(
            8, {{0, 1}, {2, 3}, {4, 5}}, true);
        const AssignmentVector z{1, 0, 1, 0, 1, 0, 1, 0};
        const AssignmentMechanism mech = CompleteRandomization{8, 4};
        const HypothesisPair pair = HypothesisPair::builtin(ExposureKind::AnyNeighborhood,
                                                            ExposureKind::OwnAndAnyPeer);
        Rng drng(13);
        const FocalDesign design = mis_design(pair, z, net, 3, drng);
        auto member = [&](const AssignmentVector& zz) {
            return membership(design, mech, net, zz);
        };
        Rng rng(911);
        std::map<AssignmentVector, long> counts;
        const long draws = 100000;
        for (long r = 0; r < draws; ++r)
            counts[sample_conditional(mech, member, 10000, rng).z] += 1;
        const auto law = oracle::conditional_law(mech, 8, member);
        const double tv = oracle::total_variation(law, counts, draws);
        ok = ok && tv <= 0.01;
        detail += "rejection_tv=" + std::to_string(tv) +
                  " patterns=" + std::to_string(law.size());
    }
    report(7, "conditional samplers within 0.01 TV of the enumerated law", ok, detail);
}

// ---- criterion 8: imperfect compliance ----

void criterion_compliance() {
    const ExperimentConfig cfg =
        paper_experiment({ComplianceKind::OneSidedBernoulli, 0.8}, 20260810);
    const auto table = rejection_frequency_experiment(cfg);
    const double upper = 0.05 + 3.0 * std::sqrt(0.05 * 0.95 / 200.0);
    bool ok = true;
    std::string detail;
    for (const char* stat : {"kw", "acd", "olsf"}) {
        const double rate = rate_of(table, 0.0, stat);
        ok = ok && rate <= upper && rate >= 0.01;
        detail += std::string(stat) + "(0)=" + std::to_string(rate) + " ";
    }
    const double kw2 = rate_of(table, 2.0, "kw");
    ok = ok && kw2 >= 0.4;
    report(8, "one-sided compliance: size at tau=0, kw power >= 0.4 at tau=2", ok,
           detail + "kw(2)=" + std::to_string(kw2));
}

// ---- criterion 9: focal-pool sizes of the two simulation exposures ----

void criterion_focal_sizes() {
    const AssignmentMechanism mech = CompleteRandomization{200, 100};
    const HypothesisPair exposure1 =
        HypothesisPair::builtin(ExposureKind::Own, ExposureKind::OwnAndAnyPeer);
    const HypothesisPair exposure2 =
        HypothesisPair::builtin(ExposureKind::Own, ExposureKind::OwnAndPeerCount);
    double sum1 = 0.0, sum2 = 0.0;
    int ok1 = 0, ok2 = 0;
    for (int seed = 0; seed < 200; ++seed) {
        Rng nrng = sub_rng(515, RngDomain::Network, seed);
        const Network net = erdos_renyi(200, 3.0 / 200, nrng);
        Rng zrng = sub_rng(515, RngDomain::Assignment, seed);
        const AssignmentVector z = sample(mech, zrng);
        Rng drng = sub_rng(515, RngDomain::Design, seed);
        sum1 += static_cast<double>(mis_design(exposure1, z, net, 2, drng).focals.size());
        ++ok1;
        sum2 += static_cast<double>(mis_design(exposure2, z, net, 4, drng).focals.size());
        ++ok2;
    }
    const double mean1 = sum1 / ok1;
    const double mean2 = sum2 / ok2;
    const bool ok = mean1 >= 56.0 && mean1 <= 104.0 && mean2 >= 21.0 && mean2 <= 39.0;
    report(9, "mis focal sizes: exposure-1 mean in [56, 104], exposure-2 in [21, 39]", ok,
           "mean1=" + std::to_string(mean1) + " mean2=" + std::to_string(mean2) +
               " ratio=" + std::to_string(mean1 / mean2));
}

// ---- criterion 10: simes decision vs direct threshold enumeration ----

void criterion_simes() {
    Rng rng(17);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    bool ok = true;
    for (int trial = 0; trial < 1000; ++trial) {
        const int s = 1 + trial % 5;
        std::vector<double> ps(s);
        for (auto& p : ps) p = unif(rng);
        const double alpha = trial % 2 == 0 ? 0.05 : 0.01 + 0.15 * unif(rng);

        std::vector<double> sorted = ps;
        std::sort(sorted.begin(), sorted.end());
        bool want = false;
        for (int i = 1; i <= s; ++i)
            if (sorted[i - 1] <= static_cast<double>(i) * alpha / s) want = true;

        ok = ok && simes(ps, alpha).reject == want;
    }
    report(10, "simes decisions match direct threshold enumeration (1000 vectors)", ok,
           ok ? "all matched" : "mismatch found");
}

}  // namespace

int main() {
    try {
        criteria_size_and_power();
        criterion_exactness();
        criterion_error_law();
        criteria_worked_example();
        criterion_sampler_exactness();
        criterion_compliance();
        criterion_focal_sizes();
        criterion_simes();
    } catch (const std::exception& e) {
        std::printf("FATAL: %s\n", e.what());
        return 2;
    }
    if (g_failures > 0) {
        std::printf("%d criterion(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
