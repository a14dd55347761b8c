#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>
#include <string>

#include "exmap/engine.hpp"
#include "exmap/errors.hpp"
#include "exmap/runconfig.hpp"
#include "exmap/sim.hpp"

namespace {

using namespace exmap;

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", x);
    return buf;
}

void write_out(const std::string& out_path, const std::string& text) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw ValidationError("cannot open for writing: " + out_path);
    out << text;
    if (!out) throw ValidationError("write failed: " + out_path);
}

int cmd_test(const std::string& config_path, const std::string& edges_path,
             const std::string& units_path, const std::string& out_path,
             long seed_override, int threads) {
    const KeyValues kv = KeyValues::parse_file(config_path);
    TestConfig cfg = parse_test_config(kv);
    if (seed_override >= 0) cfg.seed = static_cast<std::uint64_t>(seed_override);

    const UnitTable table = load_unit_table(units_path);
    const Network net = load_edge_list(edges_path, cfg.undirected, table.n);
    const AssignmentMechanism mech = resolve_mechanism(cfg, table);
    validate(mech);
    if (!in_support(mech, table.z))
        throw ValidationError("observed Z impossible under declared mechanism");

    const HypothesisPair pair = HypothesisPair::builtin(cfg.e0, cfg.e1, cfg.order);
    Rng design_rng = sub_rng(cfg.seed, RngDomain::Design, 0);
    TestSpec spec;
    spec.pair = pair;
    switch (cfg.method) {
        case FocalMethod::Mis:
            spec.design = mis_design(pair, table.z, net, cfg.kappa, design_rng);
            break;
        case FocalMethod::Random:
            spec.design = random_design(pair, table.z, net, cfg.kappa, cfg.fraction,
                                        design_rng);
            break;
        case FocalMethod::Biclique: {
            Rng pool_rng = sub_rng(cfg.seed, RngDomain::NullGraph, 0);
            NullExposureGraph g = build_null_exposure_graph(pair, table.z, net, mech,
                                                            cfg.kappa, cfg.z0_draws, pool_rng);
            spec.design = biclique_design(g, cfg.biclique_min_units,
                                          cfg.biclique_min_assignments, cfg.biclique_score,
                                          cfg.biclique_budget);
            break;
        }
    }
    spec.mech = mech;
    spec.statistics = cfg.statistics;
    spec.R = cfg.R;
    spec.seed = cfg.seed;
    spec.p_value_rule = cfg.p_value_rule;
    spec.threads = threads;
    spec.max_attempts = cfg.max_attempts;

    const TestResult res = run_test(spec, table.y, table.z, net);

    std::string csv = "statistic,t_obs,p_hat,R,focal_size,kappa,method,acceptance_rate,seed\n";
    std::vector<double> p_values;
    for (const StatOutcome& s : res.statistics) {
        p_values.push_back(s.p_hat);
        csv += std::string(statistic_name(s.kind)) + "," + fmt(s.t_obs) + "," + fmt(s.p_hat) +
               "," + std::to_string(res.R) + "," + std::to_string(res.focal_size) + "," +
               std::to_string(res.kappa) + "," + focal_method_name(spec.design.method) + "," +
               fmt(res.acceptance_rate) + "," + std::to_string(cfg.seed) + "\n";
    }
    csv += "simes,," + fmt(simes_p_value(p_values)) + "," +
           std::to_string(res.R) + "," + std::to_string(res.focal_size) + "," +
           std::to_string(res.kappa) + "," + focal_method_name(spec.design.method) + "," +
           fmt(res.acceptance_rate) + "," + std::to_string(cfg.seed) + "\n";
    write_out(out_path, csv);
    return 0;
}

int cmd_simulate(const std::string& config_path, const std::string& out_path,
                 long seed_override, int threads) {
    const KeyValues kv = KeyValues::parse_file(config_path);
    ExperimentConfig cfg = parse_sim_config(kv);
    if (seed_override >= 0) cfg.seed = static_cast<std::uint64_t>(seed_override);
    cfg.threads = threads;

    const std::vector<SimCell> table = rejection_frequency_experiment(cfg);
    std::string csv =
        "tau,statistic,method,exposure_pair,rejection_rate,mean_focal_size,"
        "mean_acceptance_rate,degenerate_reps\n";
    for (const SimCell& cell : table)
        csv += fmt(cell.tau) + "," + cell.statistic + "," + cell.method + "," +
               cell.exposure_pair + "," + fmt(cell.rejection_rate) + "," +
               fmt(cell.mean_focal_size) + "," + fmt(cell.mean_acceptance_rate) + "," +
               std::to_string(cell.degenerate_reps) + "\n";
    write_out(out_path, csv);
    return 0;
}

int cmd_gen_network(int n, double p, long seed, const std::string& out_path) {
    Rng rng = sub_rng(static_cast<std::uint64_t>(seed), RngDomain::Network, 0);
    const Network net = erdos_renyi(n, p, rng);
    save_edge_list(net, out_path, /*undirected=*/true);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Conditional randomization tests of exposure specifications in "
                 "networked experiments"};
    app.require_subcommand(1);

    std::string config_path, edges_path, units_path, out_path;
    long seed = -1;
    int threads = 1;

    CLI::App* test = app.add_subcommand("test", "Run the randomization test on a dataset");
    test->add_option("--config", config_path, "key = value configuration file")->required();
    test->add_option("--edges", edges_path, "edge list csv (header from,to; 1-based ids)")
        ->required();
    test->add_option("--units", units_path, "unit table csv (header id,y,z[,d][,stratum])")
        ->required();
    test->add_option("--out", out_path, "output csv path (default: stdout)");
    test->add_option("--seed", seed, "override test.seed from the config");
    test->add_option("--threads", threads, "worker cap for the draw loop")
        ->check(CLI::PositiveNumber);

    CLI::App* simulate =
        app.add_subcommand("simulate", "Rejection-frequency experiment over a tau grid");
    simulate->add_option("--config", config_path, "key = value configuration file")->required();
    simulate->add_option("--out", out_path, "output csv path (default: stdout)");
    simulate->add_option("--seed", seed, "override test.seed from the config");
    simulate->add_option("--threads", threads, "worker cap across replications")
        ->check(CLI::PositiveNumber);

    int gen_n = 0;
    double gen_p = 0.0;
    long gen_seed = 1;
    CLI::App* gen = app.add_subcommand("gen-network", "Write a random undirected edge list");
    gen->add_option("--n", gen_n, "number of units")->required()->check(CLI::PositiveNumber);
    gen->add_option("--p", gen_p, "edge probability")->required()
        ->check(CLI::Range(0.0, 1.0));
    gen->add_option("--seed", gen_seed, "generator seed");
    gen->add_option("--out", out_path, "output path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(test))
            return cmd_test(config_path, edges_path, units_path, out_path, seed, threads);
        if (app.got_subcommand(simulate))
            return cmd_simulate(config_path, out_path, seed, threads);
        return cmd_gen_network(gen_n, gen_p, gen_seed, out_path);
    } catch (const exmap::DegenerateDesignError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const exmap::SamplingError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const exmap::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
