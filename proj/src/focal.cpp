#include "exmap/focal.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "exmap/errors.hpp"

namespace exmap {

const char* focal_method_name(FocalMethod m) {
    switch (m) {
        case FocalMethod::Mis: return "mis";
        case FocalMethod::Random: return "random";
        case FocalMethod::Biclique: return "biclique";
    }
    return "?";
}

namespace {

FocalDesign constraint_design(const HypothesisPair& pair, const AssignmentVector& Z,
                              const Network& net, int kappa, std::vector<int> focals,
                              FocalMethod method) {
    if (static_cast<int>(focals.size()) < kappa)
        throw DegenerateDesignError("degenerate design: |S| = " +
                                    std::to_string(focals.size()) + " < kappa = " +
                                    std::to_string(kappa));
    FocalDesign d;
    d.pair = pair;
    d.focals = std::move(focals);
    d.kappa = kappa;
    d.method = method;
    d.observed = Z;
    d.tilde.reserve(d.focals.size());
    for (int i : d.focals) d.tilde.push_back(tilde_set(pair, i, Z, net));
    return d;
}

std::vector<int> require_candidates(const HypothesisPair& pair, const AssignmentVector& Z,
                                    const Network& net, int kappa) {
    std::vector<int> cands = candidate_focals(pair, Z, net, kappa);
    if (cands.empty())
        throw DegenerateDesignError("empty design: no unit has a tilde set of size " +
                                    std::to_string(kappa));
    return cands;
}

}  // namespace

ConditionalSampler sampler_kind(const FocalDesign& design) {
    if (design.explicit_rep) return ConditionalSampler::Explicit;
    switch (design.pair.e0.kind) {
        case ExposureKind::Constant: return ConditionalSampler::Unconstrained;
        case ExposureKind::Own: return ConditionalSampler::FixedUnits;
        default: return ConditionalSampler::Rejection;
    }
}

FixedPattern fixed_pattern(const FocalDesign& design) {
    if (sampler_kind(design) != ConditionalSampler::FixedUnits)
        throw ValidationError("design has no fixed-unit representation");
    FixedPattern fixed;
    fixed.reserve(design.focals.size());
    for (int i : design.focals) fixed.emplace_back(i, design.observed[i]);
    return fixed;
}

bool membership(const FocalDesign& design, const AssignmentMechanism& mech,
                const Network& net, const AssignmentVector& z) {
    if (static_cast<int>(z.size()) != net.size())
        throw ValidationError("assignment vector length does not match the network");
    if (design.explicit_rep)
        return std::find(design.assignments.begin(), design.assignments.end(), z) !=
               design.assignments.end();
    if (!in_support(mech, z)) return false;
    for (size_t k = 0; k < design.focals.size(); ++k) {
        const ExposureValue e = eval_exposure(design.pair.e1, design.focals[k], z, net);
        const auto& tset = design.tilde[k];
        if (std::find(tset.begin(), tset.end(), e) == tset.end()) return false;
    }
    return true;
}

FocalDesign mis_design(const HypothesisPair& pair, const AssignmentVector& Z,
                       const Network& net, int kappa, Rng& rng) {
    std::vector<int> cands = require_candidates(pair, Z, net, kappa);
    SimpleGraph g = common_friend_graph(net, cands);
    std::vector<int> focals = greedy_independent_set(g, rng);
    return constraint_design(pair, Z, net, kappa, std::move(focals), FocalMethod::Mis);
}

FocalDesign random_design(const HypothesisPair& pair, const AssignmentVector& Z,
                          const Network& net, int kappa, double fraction, Rng& rng) {
    if (!(fraction > 0.0 && fraction <= 1.0))
        throw ValidationError("focal fraction must be in (0, 1]");
    std::vector<int> cands = require_candidates(pair, Z, net, kappa);
    const auto target =
        static_cast<size_t>(std::ceil(fraction * static_cast<double>(cands.size())));
    std::vector<int> focals;
    focals.reserve(target);
    std::sample(cands.begin(), cands.end(), std::back_inserter(focals), target, rng);
    return constraint_design(pair, Z, net, kappa, std::move(focals), FocalMethod::Random);
}

NullExposureGraph build_null_exposure_graph(const HypothesisPair& pair,
                                            const AssignmentVector& Z, const Network& net,
                                            const AssignmentMechanism& mech, int kappa,
                                            long num_assignments, Rng& rng) {
    if (num_assignments < 1) throw ValidationError("num_assignments must be >= 1");
    NullExposureGraph g;
    g.pair = pair;
    g.observed = Z;
    g.kappa = kappa;
    g.units = require_candidates(pair, Z, net, kappa);
    g.tilde.reserve(g.units.size());
    for (int i : g.units) g.tilde.push_back(tilde_set(pair, i, Z, net));

    std::map<AssignmentVector, long> pool;
    pool[Z] = 1;
    for (long r = 0; r < num_assignments; ++r) pool[sample(mech, rng)] += 1;

    g.columns.reserve(pool.size());
    g.multiplicity.reserve(pool.size());
    for (auto& [z, count] : pool) {
        g.columns.push_back(z);
        g.multiplicity.push_back(count);
    }

    // edge (i, z) iff c(E1_i(z)) = E0_i(Z)
    g.unit_cols.resize(g.units.size());
    for (size_t u = 0; u < g.units.size(); ++u) {
        const int i = g.units[u];
        const ExposureValue target = eval_exposure(pair.e0, i, Z, net);
        for (size_t c = 0; c < g.columns.size(); ++c) {
            const ExposureValue e = eval_exposure(pair.e1, i, g.columns[c], net);
            if (pair.coarsen.apply(e) == target) g.unit_cols[u].push_back(static_cast<int>(c));
        }
    }
    return g;
}

namespace {

std::vector<int> intersect_sorted(const std::vector<int>& a, const std::vector<int>& b) {
    std::vector<int> out;
    out.reserve(std::min(a.size(), b.size()));
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

double biclique_score(BicliqueScore score, size_t units, std::uint64_t weight) {
    switch (score) {
        case BicliqueScore::UnitsLogAssignments:
            return static_cast<double>(units) * std::log1p(static_cast<double>(weight));
        case BicliqueScore::Units:
            return static_cast<double>(units);
        case BicliqueScore::Product:
            return static_cast<double>(units) * static_cast<double>(weight);
    }
    return 0.0;
}

}  // namespace

FocalDesign biclique_design(const NullExposureGraph& graph, int min_units,
                            int min_assignments, BicliqueScore score, long budget) {
    if (graph.units.empty() || graph.columns.empty())
        throw DegenerateDesignError("null exposure graph is empty");
    min_units = std::max(min_units, 1);
    min_assignments = std::max(min_assignments, 1);

    const size_t nu = graph.units.size();
    bool found = false;
    double best_score = 0.0;
    std::vector<int> best_units;
    std::vector<int> best_cols;

    // Greedy growth from each unit seed: keep the column intersection, add
    // the unit that improves the score most, then close with every free
    // rider. Each grown biclique is inclusion-maximal.
    long work = 0;
    for (size_t seed = 0; seed < nu && work < budget; ++seed) {
        std::vector<char> in_set(nu, 0);
        std::vector<int> members{static_cast<int>(seed)};
        in_set[seed] = 1;
        std::vector<int> cols = graph.unit_cols[seed];
        if (static_cast<int>(cols.size()) < min_assignments) continue;

        auto current_score = [&]() {
            return biclique_score(score, members.size(), cols.size());
        };
        while (work < budget) {
            int best_add = -1;
            size_t best_gain = 0;
            for (size_t u = 0; u < nu && work < budget; ++u) {
                if (in_set[u]) continue;
                ++work;
                const size_t gain = intersect_sorted(cols, graph.unit_cols[u]).size();
                if (gain >= static_cast<size_t>(min_assignments) && gain > best_gain) {
                    best_gain = gain;
                    best_add = static_cast<int>(u);
                }
            }
            if (best_add < 0) break;
            const double with =
                biclique_score(score, members.size() + 1, best_gain);
            if (with <= current_score() && best_gain < cols.size()) break;
            in_set[best_add] = 1;
            members.push_back(best_add);
            cols = intersect_sorted(cols, graph.unit_cols[best_add]);
        }
        // closure: units whose columns contain the whole intersection join for free
        for (size_t u = 0; u < nu; ++u) {
            if (in_set[u]) continue;
            if (intersect_sorted(cols, graph.unit_cols[u]).size() == cols.size()) {
                in_set[u] = 1;
                members.push_back(static_cast<int>(u));
            }
        }
        if (static_cast<int>(members.size()) < min_units ||
            static_cast<int>(cols.size()) < min_assignments)
            continue;
        const double s = biclique_score(score, members.size(), cols.size());
        if (!found || s > best_score) {
            found = true;
            best_score = s;
            best_units = members;
            best_cols = cols;
        }
    }

    if (!found)
        throw DegenerateDesignError(
            "no adequate biclique: nothing enumerated met min_units = " +
            std::to_string(min_units) + ", min_assignments = " +
            std::to_string(min_assignments));

    std::sort(best_units.begin(), best_units.end());
    FocalDesign d;
    d.pair = graph.pair;
    d.kappa = graph.kappa;
    d.method = FocalMethod::Biclique;
    d.observed = graph.observed;
    d.explicit_rep = true;
    for (int u : best_units) {
        d.focals.push_back(graph.units[u]);
        d.tilde.push_back(graph.tilde[u]);
    }
    for (int c : best_cols) {
        d.assignments.push_back(graph.columns[c]);
        d.weights.push_back(graph.multiplicity[c]);
    }
    if (static_cast<int>(d.focals.size()) < d.kappa)
        throw DegenerateDesignError("degenerate design: biclique has fewer units than kappa");
    return d;
}

}  // namespace exmap
