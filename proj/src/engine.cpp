#include "exmap/engine.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <thread>

#include "exmap/errors.hpp"

namespace exmap {

const char* statistic_name(StatisticKind kind) {
    switch (kind) {
        case StatisticKind::Kw: return "kw";
        case StatisticKind::Acd: return "acd";
        case StatisticKind::OlsF: return "olsf";
    }
    return "?";
}

std::optional<StatisticKind> statistic_by_name(const std::string& name) {
    for (StatisticKind k : {StatisticKind::Kw, StatisticKind::Acd, StatisticKind::OlsF})
        if (name == statistic_name(k)) return k;
    return std::nullopt;
}

namespace {

// Shared per-test state: the focal outcomes, their midranks, and the fixed
// E0 regressors. Under the null the focal outcomes do not change across
// focal assignments, so all of this is computed once.
class Evaluator {
public:
    Evaluator(const TestSpec& spec, const std::vector<double>& Y, const Network& net)
        : design_(spec.design), net_(net), statistics_(spec.statistics) {
        y_focals_.reserve(design_.focals.size());
        for (int i : design_.focals) y_focals_.push_back(Y[i]);
        ranks_ = midranks(y_focals_);
        const bool wants_ols =
            std::find(statistics_.begin(), statistics_.end(), StatisticKind::OlsF) !=
            statistics_.end();
        if (wants_ols) {
            if (!design_.pair.x_rule)
                throw ValidationError(
                    "the olsf statistic needs an x-regressor rule for this exposure pair");
            e0_rows_.reserve(design_.focals.size());
            for (int i : design_.focals) {
                const ExposureValue e0 =
                    eval_exposure(design_.pair.e0, i, design_.observed, net_);
                std::vector<double> row(e0.comp.begin(), e0.comp.begin() + e0.len);
                e0_rows_.push_back(std::move(row));
            }
        }
    }

    // statistic values for one focal assignment; degenerate statistics map to 0
    std::vector<double> values(const AssignmentVector& z, bool& grouping_degenerate) const {
        Grouping g = group_focals(design_, z, net_);
        std::vector<std::vector<double>> x_rows;
        if (!e0_rows_.empty()) {
            x_rows.reserve(design_.focals.size());
            for (size_t k = 0; k < design_.focals.size(); ++k)
                x_rows.push_back(design_.pair.x_rule(design_.tilde[k][g.index[k]]));
        }
        int nonempty = 0;
        {
            std::vector<char> seen(design_.kappa, 0);
            for (int j : g.index)
                if (!seen[j]) {
                    seen[j] = 1;
                    ++nonempty;
                }
        }
        grouping_degenerate = nonempty < 2;

        std::vector<double> out;
        out.reserve(statistics_.size());
        for (StatisticKind kind : statistics_) {
            std::optional<double> v;
            switch (kind) {
                case StatisticKind::Kw: v = kw_from_ranks(ranks_, g, design_.kappa); break;
                case StatisticKind::Acd: v = acd_statistic(y_focals_, g, design_.kappa); break;
                case StatisticKind::OlsF: v = ols_f_statistic(y_focals_, e0_rows_, x_rows); break;
            }
            out.push_back(v.value_or(0.0));
        }
        return out;
    }

    std::vector<int> group_sizes(const AssignmentVector& z) const {
        Grouping g = group_focals(design_, z, net_);
        std::vector<int> sizes(design_.kappa, 0);
        for (int j : g.index) sizes[j] += 1;
        return sizes;
    }

private:
    const FocalDesign& design_;
    const Network& net_;
    std::vector<StatisticKind> statistics_;
    std::vector<double> y_focals_;
    std::vector<double> ranks_;
    std::vector<std::vector<double>> e0_rows_;
};

void validate_spec(const TestSpec& spec, const std::vector<double>& Y,
                   const AssignmentVector& Z, const Network& net) {
    if (spec.R < 1) throw ValidationError("R must be >= 1");
    if (spec.statistics.empty()) throw ValidationError("no test statistics configured");
    if (spec.threads < 1) throw ValidationError("threads must be >= 1");
    if (static_cast<int>(Y.size()) != net.size())
        throw ValidationError("outcome vector length does not match the network");
    if (static_cast<int>(Z.size()) != net.size())
        throw ValidationError("assignment vector length does not match the network");
    validate(spec.mech);
    if (num_units(spec.mech) != net.size())
        throw ValidationError("mechanism unit count does not match the network");
    if (spec.pair.e0.kind != spec.design.pair.e0.kind ||
        spec.pair.e1.kind != spec.design.pair.e1.kind)
        throw ValidationError("test spec pair does not match the design's pair");
    if (spec.design.focals.empty()) throw DegenerateDesignError("design has no focal units");
    if (!in_support(spec.mech, Z))
        throw ValidationError("observed Z impossible under declared mechanism");
    if (!membership(spec.design, spec.mech, net, Z))
        throw ValidationError("observed assignment is not a focal assignment of the design");
}

// One conditional draw; returns the attempt count consumed.
AssignmentVector conditional_draw(const TestSpec& spec, const Network& net,
                                  ConditionalSampler sampler, const FixedPattern& fixed,
                                  const std::vector<long>& cum_weights, Rng& rng,
                                  long& attempts) {
    switch (sampler) {
        case ConditionalSampler::Unconstrained:
            attempts = 1;
            return sample(spec.mech, rng);
        case ConditionalSampler::FixedUnits:
            attempts = 1;
            return sample_conditional_fixed_units(spec.mech, fixed, rng);
        case ConditionalSampler::Explicit: {
            attempts = 1;
            const long total = cum_weights.back();
            std::uniform_int_distribution<long> pick(0, total - 1);
            const long w = pick(rng);
            const size_t idx = static_cast<size_t>(
                std::upper_bound(cum_weights.begin(), cum_weights.end(), w) -
                cum_weights.begin());
            return spec.design.assignments[idx];
        }
        case ConditionalSampler::Rejection: {
            ConditionalDraw draw = sample_conditional(
                spec.mech,
                [&spec, &net](const AssignmentVector& z) {
                    return membership(spec.design, spec.mech, net, z);
                },
                spec.max_attempts, rng);
            attempts = draw.attempts;
            return std::move(draw.z);
        }
    }
    throw Error("unknown sampler kind");
}

}  // namespace

TestResult run_test(const TestSpec& spec, const std::vector<double>& Y,
                    const AssignmentVector& Z, const Network& net) {
    validate_spec(spec, Y, Z, net);
    const Evaluator eval(spec, Y, net);

    bool obs_degenerate = false;
    const std::vector<double> t_obs = eval.values(Z, obs_degenerate);

    const ConditionalSampler sampler = sampler_kind(spec.design);
    FixedPattern fixed;
    if (sampler == ConditionalSampler::FixedUnits) fixed = fixed_pattern(spec.design);
    std::vector<long> cum_weights;
    if (sampler == ConditionalSampler::Explicit) {
        cum_weights.resize(spec.design.weights.size());
        std::partial_sum(spec.design.weights.begin(), spec.design.weights.end(),
                         cum_weights.begin());
        if (cum_weights.empty() || cum_weights.back() <= 0)
            throw DegenerateDesignError("explicit design has no assignments to resample");
    }

    const int n_stats = static_cast<int>(spec.statistics.size());
    const int workers = std::max(1, std::min(spec.threads, spec.R));
    std::vector<std::vector<long>> hits(workers, std::vector<long>(n_stats, 0));
    std::vector<long> attempts_total(workers, 0);
    std::vector<int> degenerate(workers, 0);
    std::vector<std::vector<double>> retained;
    if (spec.retain_draws)
        retained.assign(n_stats, std::vector<double>(spec.R, 0.0));
    std::vector<std::exception_ptr> worker_error(workers);

    auto worker = [&](int w) {
        try {
            for (int r = w; r < spec.R; r += workers) {
                Rng rng = sub_rng(spec.seed, RngDomain::Draw, static_cast<std::uint64_t>(r));
                long att = 0;
                const AssignmentVector z =
                    conditional_draw(spec, net, sampler, fixed, cum_weights, rng, att);
                attempts_total[w] += att;
                bool deg = false;
                const std::vector<double> t = eval.values(z, deg);
                if (deg) degenerate[w] += 1;
                for (int s = 0; s < n_stats; ++s) {
                    if (t[s] >= t_obs[s]) hits[w][s] += 1;
                    if (spec.retain_draws) retained[s][r] = t[s];
                }
            }
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

    TestResult result;
    result.seed = spec.seed;
    result.R = spec.R;
    result.kappa = spec.design.kappa;
    result.focal_size = static_cast<int>(spec.design.focals.size());
    result.observed_group_sizes = eval.group_sizes(Z);
    long all_attempts = 0;
    for (int w = 0; w < workers; ++w) {
        all_attempts += attempts_total[w];
        result.degenerate_draws += degenerate[w];
    }
    result.acceptance_rate = static_cast<double>(spec.R) / static_cast<double>(all_attempts);

    for (int s = 0; s < n_stats; ++s) {
        long hit = 0;
        for (int w = 0; w < workers; ++w) hit += hits[w][s];
        StatOutcome out;
        out.kind = spec.statistics[s];
        out.t_obs = t_obs[s];
        out.p_hat = spec.p_value_rule == PValueRule::Paper
                        ? static_cast<double>(hit) / spec.R
                        : static_cast<double>(hit + 1) / (spec.R + 1);
        if (spec.retain_draws) out.draw_values = std::move(retained[s]);
        result.statistics.push_back(std::move(out));
    }
    return result;
}

std::vector<double> exact_test(const TestSpec& spec, const std::vector<double>& Y,
                               const AssignmentVector& Z, const Network& net,
                               std::uint64_t support_cap) {
    validate_spec(spec, Y, Z, net);
    const Evaluator eval(spec, Y, net);
    bool deg = false;
    const std::vector<double> t_obs = eval.values(Z, deg);

    const int n_stats = static_cast<int>(spec.statistics.size());
    std::vector<double> hit(n_stats, 0.0);
    double mass = 0.0;

    auto tally = [&](const AssignmentVector& z, double weight) {
        bool d = false;
        const std::vector<double> t = eval.values(z, d);
        mass += weight;
        for (int s = 0; s < n_stats; ++s)
            if (t[s] >= t_obs[s]) hit[s] += weight;
    };

    if (spec.design.explicit_rep) {
        for (size_t k = 0; k < spec.design.assignments.size(); ++k)
            tally(spec.design.assignments[k], static_cast<double>(spec.design.weights[k]));
    } else {
        if (support_size(spec.mech, support_cap) > support_cap)
            throw ValidationError("exact test refused: support exceeds the enumeration cap");
        enumerate_support(
            spec.mech,
            [&](const AssignmentVector& z, double w) {
                if (membership(spec.design, spec.mech, net, z)) tally(z, w);
            },
            support_cap);
    }
    if (mass <= 0.0) throw Error("exact test found an empty focal assignment set");
    for (double& h : hit) h /= mass;
    return hit;
}

std::vector<ProbeRow> error_scaling_probe(const TestSpec& spec, const std::vector<double>& Y,
                                          const AssignmentVector& Z, const Network& net,
                                          const std::vector<int>& r_grid, int reps) {
    if (reps < 2) throw ValidationError("error_scaling_probe needs reps >= 2");
    if (!std::is_sorted(r_grid.begin(), r_grid.end()))
        throw ValidationError("R grid must be ascending");
    std::vector<ProbeRow> rows;
    for (size_t gi = 0; gi < r_grid.size(); ++gi) {
        const int R = r_grid[gi];
        std::vector<std::vector<double>> p_hats(spec.statistics.size());
        for (int rep = 0; rep < reps; ++rep) {
            TestSpec run = spec;
            run.R = R;
            run.retain_draws = false;
            run.seed = derive_seed(spec.seed, RngDomain::Probe,
                                   gi * static_cast<std::uint64_t>(reps) + rep);
            TestResult res = run_test(run, Y, Z, net);
            for (size_t s = 0; s < res.statistics.size(); ++s)
                p_hats[s].push_back(res.statistics[s].p_hat);
        }
        ProbeRow row;
        row.R = R;
        for (const auto& ps : p_hats) {
            const double mean = std::accumulate(ps.begin(), ps.end(), 0.0) / ps.size();
            double ss = 0.0;
            for (double p : ps) ss += (p - mean) * (p - mean);
            row.sd.push_back(std::sqrt(ss / (ps.size() - 1)));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace exmap
