#include "exmap/sim.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <thread>

#include "exmap/errors.hpp"

namespace exmap {

double g_dgp2(long a) {
    if (a < 0) throw ValidationError("g_dgp2 expects a non-negative count");
    if (a <= 2) return static_cast<double>(a);
    return 1.0 / static_cast<double>(a);
}

std::vector<double> gen_outcomes(const DgpConfig& dgp, const AssignmentVector& D,
                                 const Network& net, Rng& rng) {
    if (static_cast<int>(D.size()) != net.size())
        throw ValidationError("take-up vector length does not match the network");
    std::vector<double> y(D.size());
    std::normal_distribution<double> noise(0.0, dgp.noise_sd > 0.0 ? dgp.noise_sd : 1.0);
    for (int i = 0; i < net.size(); ++i) {
        long treated_peers = 0;
        for (int j : net.peers(i)) treated_peers += D[j];
        const double spill = dgp.kind == DgpKind::Dgp1
                                 ? static_cast<double>(treated_peers)
                                 : g_dgp2(treated_peers);
        y[i] = static_cast<double>(D[i]) + dgp.tau * spill;
        if (dgp.noise_sd > 0.0) y[i] += noise(rng);
    }
    return y;
}

AssignmentVector apply_compliance(const AssignmentVector& Z, const ComplianceModel& model,
                                  Rng& rng) {
    if (model.kind == ComplianceKind::Perfect) return Z;
    if (!(model.q >= 0.0 && model.q <= 1.0))
        throw ValidationError("take-up probability must be in [0, 1]");
    AssignmentVector d(Z.size(), 0);
    std::bernoulli_distribution takeup(model.q);
    for (size_t i = 0; i < Z.size(); ++i)
        if (Z[i]) d[i] = takeup(rng) ? 1 : 0;
    return d;
}

namespace {

struct CellOutcome {
    bool degenerate = false;
    std::vector<std::uint8_t> rejected;  // per statistic (+ simes last, when present)
    double focal_size = 0.0;
    double acceptance = 0.0;
};

FocalDesign build_design(const ExperimentConfig& cfg, const HypothesisPair& pair,
                         const AssignmentVector& Z, const Network& net, Rng& rng) {
    switch (cfg.method) {
        case FocalMethod::Mis:
            return mis_design(pair, Z, net, cfg.kappa, rng);
        case FocalMethod::Random:
            return random_design(pair, Z, net, cfg.kappa, cfg.fraction, rng);
        case FocalMethod::Biclique: {
            NullExposureGraph g = build_null_exposure_graph(pair, Z, net, cfg.mech, cfg.kappa,
                                                            cfg.z0_draws, rng);
            return biclique_design(g, cfg.biclique_min_units, cfg.biclique_min_assignments,
                                   cfg.biclique_score, cfg.biclique_budget);
        }
    }
    throw ValidationError("unknown focal method");
}

}  // namespace

std::vector<SimCell> rejection_frequency_experiment(const ExperimentConfig& cfg) {
    if (cfg.reps < 1) throw ValidationError("reps must be >= 1");
    if (cfg.tau_grid.empty()) throw ValidationError("tau grid is empty");
    if (num_units(cfg.mech) != cfg.n)
        throw ValidationError("mechanism unit count does not match sim.n");
    validate(cfg.mech);
    const HypothesisPair pair = HypothesisPair::builtin(cfg.e0, cfg.e1, cfg.order);

    const bool with_simes = cfg.include_simes && cfg.statistics.size() >= 2;
    const size_t n_rows = cfg.statistics.size() + (with_simes ? 1 : 0);
    const size_t n_cells = cfg.tau_grid.size() * static_cast<size_t>(cfg.reps);
    std::vector<CellOutcome> cells(n_cells);

    auto run_cell = [&](size_t cell) {
        const size_t ti = cell / cfg.reps;
        CellOutcome& out = cells[cell];
        out.rejected.assign(n_rows, 0);
        try {
            Rng rng_net = sub_rng(cfg.seed, RngDomain::Network, cell);
            const Network net = erdos_renyi(cfg.n, cfg.network_p, rng_net);
            Rng rng_z = sub_rng(cfg.seed, RngDomain::Assignment, cell);
            const AssignmentVector Z = sample(cfg.mech, rng_z);
            Rng rng_d = sub_rng(cfg.seed, RngDomain::Compliance, cell);
            const AssignmentVector D = apply_compliance(Z, cfg.compliance, rng_d);
            DgpConfig dgp{cfg.dgp, cfg.tau_grid[ti], cfg.noise_sd};
            Rng rng_y = sub_rng(cfg.seed, RngDomain::Outcome, cell);
            const std::vector<double> Y = gen_outcomes(dgp, D, net, rng_y);

            Rng rng_design = sub_rng(cfg.seed, RngDomain::Design, cell);
            TestSpec spec;
            spec.pair = pair;
            spec.design = build_design(cfg, pair, Z, net, rng_design);
            spec.mech = cfg.mech;
            spec.statistics = cfg.statistics;
            spec.R = cfg.R;
            spec.seed = derive_seed(cfg.seed, RngDomain::Draw, cell);
            spec.p_value_rule = cfg.p_value_rule;
            spec.max_attempts = cfg.max_attempts;
            const TestResult res = run_test(spec, Y, Z, net);

            std::vector<double> p_values;
            for (size_t s = 0; s < cfg.statistics.size(); ++s) {
                p_values.push_back(res.statistics[s].p_hat);
                out.rejected[s] = res.statistics[s].p_hat <= cfg.alpha ? 1 : 0;
            }
            if (with_simes)
                out.rejected[n_rows - 1] = simes(p_values, cfg.alpha).reject ? 1 : 0;
            out.focal_size = static_cast<double>(res.focal_size);
            out.acceptance = res.acceptance_rate;
        } catch (const DegenerateDesignError&) {
            out.degenerate = true;
        } catch (const SamplingError&) {
            out.degenerate = true;
        }
    };

    const int workers = std::max(1, std::min<int>(cfg.threads, static_cast<int>(n_cells)));
    std::vector<std::exception_ptr> worker_error(workers);
    auto worker = [&](int w) {
        try {
            for (size_t cell = w; cell < n_cells; cell += workers) run_cell(cell);
        } catch (...) {
            worker_error[w] = std::current_exception();
        }
    };
    if (workers == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker, w);
        for (auto& t : pool) t.join();
    }
    for (auto& err : worker_error)
        if (err) std::rethrow_exception(err);

    const std::string pair_name =
        std::string(exposure_name(cfg.e0)) + "/" + exposure_name(cfg.e1);
    std::vector<SimCell> table;
    for (size_t ti = 0; ti < cfg.tau_grid.size(); ++ti) {
        int degenerate = 0, usable = 0;
        double focal_sum = 0.0, acc_sum = 0.0;
        std::vector<long> reject_counts(n_rows, 0);
        for (int rep = 0; rep < cfg.reps; ++rep) {
            const CellOutcome& out = cells[ti * cfg.reps + rep];
            if (out.degenerate) {
                ++degenerate;
                continue;
            }
            ++usable;
            focal_sum += out.focal_size;
            acc_sum += out.acceptance;
            for (size_t s = 0; s < n_rows; ++s) reject_counts[s] += out.rejected[s];
        }
        for (size_t s = 0; s < n_rows; ++s) {
            SimCell row;
            row.tau = cfg.tau_grid[ti];
            row.statistic = s < cfg.statistics.size()
                                ? statistic_name(cfg.statistics[s])
                                : "simes";
            row.method = focal_method_name(cfg.method);
            row.exposure_pair = pair_name;
            row.rejection_rate = static_cast<double>(reject_counts[s]) / cfg.reps;
            row.mean_focal_size = usable > 0 ? focal_sum / usable : 0.0;
            row.mean_acceptance_rate = usable > 0 ? acc_sum / usable : 0.0;
            row.degenerate_reps = degenerate;
            table.push_back(std::move(row));
        }
    }
    return table;
}

}  // namespace exmap
