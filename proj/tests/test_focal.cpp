#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "example_net.hpp"
#include "exmap/errors.hpp"
#include "exmap/focal.hpp"
#include "oracles.hpp"

using namespace exmap;

namespace {

bool disjoint_closed_neighborhoods(const Network& net, const std::vector<int>& s) {
    for (size_t a = 0; a < s.size(); ++a)
        for (size_t b = a + 1; b < s.size(); ++b) {
            const auto na = net.closed_neighborhood(s[a]);
            const auto nb = net.closed_neighborhood(s[b]);
            std::vector<int> common;
            std::set_intersection(na.begin(), na.end(), nb.begin(), nb.end(),
                                  std::back_inserter(common));
            if (!common.empty()) return false;
        }
    return true;
}

// hand-assembled bipartite graph for biclique mechanics
NullExposureGraph toy_graph(int n_units, int n_cols,
                            const std::vector<std::pair<int, int>>& edges) {
    NullExposureGraph g;
    g.kappa = 1;
    for (int u = 0; u < n_units; ++u) g.units.push_back(u);
    g.tilde.resize(n_units);
    for (int c = 0; c < n_cols; ++c) {
        g.columns.push_back(AssignmentVector{static_cast<std::uint8_t>(c & 1),
                                             static_cast<std::uint8_t>((c >> 1) & 1),
                                             static_cast<std::uint8_t>((c >> 2) & 1)});
        g.multiplicity.push_back(1);
    }
    g.unit_cols.resize(n_units);
    for (auto [u, c] : edges) g.unit_cols[u].push_back(c);
    for (auto& cols : g.unit_cols) std::sort(cols.begin(), cols.end());
    return g;
}

}  // namespace

TEST_CASE("mis_design uses the whole population when nothing interferes") {
    const Network edgeless(6);
    const AssignmentVector z{1, 0, 1, 0, 1, 0};
    const HypothesisPair fisher =
        HypothesisPair::builtin(ExposureKind::Constant, ExposureKind::Own);
    Rng rng(3);
    const FocalDesign d = mis_design(fisher, z, edgeless, 2, rng);
    CHECK(d.focals == std::vector<int>{0, 1, 2, 3, 4, 5});
    CHECK(d.kappa == 2);
    CHECK(d.method == FocalMethod::Mis);
    CHECK(sampler_kind(d) == ConditionalSampler::Unconstrained);
}

TEST_CASE("mis_design on a paired population keeps one unit per pair") {
    // couples (0,1), (2,3): exposure pair fixes each focal's own treatment
    const Network net = Network::from_edges(4, {{0, 1}, {2, 3}}, true);
    const AssignmentVector z{1, 0, 0, 1};
    const HypothesisPair pair =
        HypothesisPair::builtin(ExposureKind::Own, ExposureKind::OwnAndAnyPeer);
    Rng rng(5);
    const FocalDesign d = mis_design(pair, z, net, 2, rng);
    CHECK(d.focals.size() == 2);
    CHECK(disjoint_closed_neighborhoods(net, d.focals));

    CHECK(sampler_kind(d) == ConditionalSampler::FixedUnits);
    const FixedPattern fixed = fixed_pattern(d);
    REQUIRE(fixed.size() == 2);
    for (auto [i, v] : fixed) CHECK(v == z[i]);

    // membership: flipping a focal's own treatment leaves C^S
    const AssignmentMechanism mech = CompleteRandomization{4, 2};
    CHECK(membership(d, mech, net, z));
    AssignmentVector flipped = z;
    const int focal = d.focals[0];
    const int partner = focal ^ 1;
    std::swap(flipped[focal], flipped[partner]);
    CHECK(!membership(d, mech, net, flipped));
}

TEST_CASE("mis_design matches the brute-force maximum on three disjoint pairs") {
    const Network net = Network::from_edges(6, {{0, 1}, {2, 3}, {4, 5}}, true);
    const AssignmentVector z{1, 0, 1, 0, 1, 0};
    const HypothesisPair pair =
        HypothesisPair::builtin(ExposureKind::Own, ExposureKind::OwnAndAnyPeer);
    Rng rng(7);
    const FocalDesign d = mis_design(pair, z, net, 2, rng);
    CHECK(d.focals.size() == 3);
    const SimpleGraph g = common_friend_graph(net, {0, 1, 2, 3, 4, 5});
    CHECK(oracle::max_independent_sets(g).front().size() == 3);
}

TEST_CASE("mis_design error paths") {
    const HypothesisPair pair =
        HypothesisPair::builtin(ExposureKind::Own, ExposureKind::OwnAndAnyPeer);
    Rng rng(9);
    // no unit has a peer: candidate pool for kappa = 2 is empty
    const Network edgeless(4);
    CHECK_THROWS_AS(mis_design(pair, {1, 0, 1, 0}, edgeless, 2, rng),
                    DegenerateDesignError);
    // one connected pair only: |S| = 1 < kappa
    const Network one_pair = Network::from_edges(4, {{0, 1}}, true);
    CHECK_THROWS_AS(mis_design(pair, {1, 0, 1, 0}, one_pair, 2, rng),
                    DegenerateDesignError);
}

TEST_CASE("random_design sizes and selection frequencies") {
    const Network net = example8::network();
    const AssignmentVector z = example8::observed_z();
    const HypothesisPair pair =
        HypothesisPair::builtin(ExposureKind::Own, ExposureKind::OwnAndAnyPeer);

    Rng rng(11);
    const FocalDesign full = random_design(pair, z, net, 2, 1.0, rng);
    CHECK(full.focals == candidate_focals(pair, z, net, 2));

    const FocalDesign half = random_design(pair, z, net, 2, 0.5, rng);
    CHECK(half.focals.size() == 4);  // ceil(7 / 2)

    std::map<int, long> picked;
    const int runs = 10000;
    for (int r = 0; r < runs; ++r) {
        Rng seed_rng(1000 + r);
        for (int i : random_design(pair, z, net, 2, 0.5, seed_rng).focals) picked[i] += 1;
    }
    for (const auto& [unit, count] : picked)
        CHECK(std::abs(static_cast<double>(count) / runs - 4.0 / 7.0) <= 0.02);

    CHECK_THROWS_AS(random_design(pair, z, net, 2, 0.0, rng), ValidationError);
    CHECK_THROWS_AS(random_design(pair, z, net, 2, 1.5, rng), ValidationError);
}

TEST_CASE("null exposure graph edges follow the coarsening condition") {
    const Network net = example8::network();
    const AssignmentVector z = example8::observed_z();
    const AssignmentMechanism mech = CompleteRandomization{8, 4};
    Rng rng(13);

    const HypothesisPair pair =
        HypothesisPair::builtin(ExposureKind::Own, ExposureKind::OwnAndAnyPeer);
    const NullExposureGraph g = build_null_exposure_graph(pair, z, net, mech, 2, 500, rng);

    // the observed assignment is one of the columns and connects to everyone
    const auto zc = std::find(g.columns.begin(), g.columns.end(), z);
    REQUIRE(zc != g.columns.end());
    const int z_col = static_cast<int>(zc - g.columns.begin());
    for (size_t u = 0; u < g.units.size(); ++u)
        CHECK(std::binary_search(g.unit_cols[u].begin(), g.unit_cols[u].end(), z_col));

    // own-exposure nulls: an edge exists exactly when the unit's own
    // treatment is preserved
    for (size_t u = 0; u < g.units.size(); ++u) {
        const int i = g.units[u];
        for (size_t c = 0; c < g.columns.size(); ++c) {
            const bool edge =
                std::binary_search(g.unit_cols[u].begin(), g.unit_cols[u].end(),
                                   static_cast<int>(c));
            CHECK(edge == (g.columns[c][i] == z[i]));
        }
    }

    // Fisher null: no restriction, complete bipartite
    const HypothesisPair fisher =
        HypothesisPair::builtin(ExposureKind::Constant, ExposureKind::Own);
    Rng rng2(17);
    const NullExposureGraph gf = build_null_exposure_graph(fisher, z, net, mech, 2, 200, rng2);
    for (const auto& cols : gf.unit_cols)
        CHECK(cols.size() == gf.columns.size());

    // multiplicities count every draw plus the observed assignment
    long total = 0;
    for (long m : gf.multiplicity) total += m;
    CHECK(total == 201);
}

TEST_CASE("biclique of a complete bipartite graph is everything") {
    std::vector<std::pair<int, int>> edges;
    for (int u = 0; u < 3; ++u)
        for (int c = 0; c < 4; ++c) edges.emplace_back(u, c);
    const NullExposureGraph g = toy_graph(3, 4, edges);
    const FocalDesign d = biclique_design(g, 1, 1);
    CHECK(d.focals.size() == 3);
    CHECK(d.assignments.size() == 4);
    CHECK(d.explicit_rep);
}

TEST_CASE("biclique picks the deep column pair over the wide unit pair") {
    // edges {(0,a),(0,b),(1,a)}: with min 2 assignments only ({0},{a,b}) works
    const NullExposureGraph g = toy_graph(2, 2, {{0, 0}, {0, 1}, {1, 0}});
    const FocalDesign d = biclique_design(g, 1, 2);
    CHECK(d.focals == std::vector<int>{0});
    CHECK(d.assignments.size() == 2);
}

TEST_CASE("biclique fails loudly when only the observed column is shared") {
    // every unit is connected to column 0 only
    const NullExposureGraph g = toy_graph(3, 3, {{0, 0}, {1, 0}, {2, 0}});
    CHECK_THROWS_AS(biclique_design(g, 1, 2), DegenerateDesignError);
}

TEST_CASE("biclique output is a maximal biclique meeting the minima") {
    Rng rng(21);
    std::bernoulli_distribution edge(0.45);
    for (int trial = 0; trial < 30; ++trial) {
        const int nu = 5, nc = 7;
        std::set<std::pair<int, int>> edge_set;
        for (int u = 0; u < nu; ++u)
            for (int c = 0; c < nc; ++c)
                if (edge(rng)) edge_set.insert({u, c});
        // column 0 plays the observed role: connect it everywhere
        for (int u = 0; u < nu; ++u) edge_set.insert({u, 0});
        const NullExposureGraph g =
            toy_graph(nu, nc, {edge_set.begin(), edge_set.end()});

        const int min_units = 1, min_cols = 2;
        FocalDesign d;
        try {
            d = biclique_design(g, min_units, min_cols);
        } catch (const DegenerateDesignError&) {
            continue;
        }
        REQUIRE(static_cast<int>(d.focals.size()) >= min_units);
        REQUIRE(static_cast<int>(d.assignments.size()) >= min_cols);

        // translate back to graph indices
        std::vector<int> unit_idx, col_idx;
        for (int f : d.focals)
            unit_idx.push_back(static_cast<int>(
                std::find(g.units.begin(), g.units.end(), f) - g.units.begin()));
        for (const auto& a : d.assignments)
            col_idx.push_back(static_cast<int>(
                std::find(g.columns.begin(), g.columns.end(), a) - g.columns.begin()));

        auto has_edge = [&g](int u, int c) {
            return std::binary_search(g.unit_cols[u].begin(), g.unit_cols[u].end(), c);
        };
        for (int u : unit_idx)
            for (int c : col_idx) CHECK(has_edge(u, c));

        // unit-maximal: no outside unit is adjacent to every chosen column
        for (int u = 0; u < nu; ++u) {
            if (std::find(unit_idx.begin(), unit_idx.end(), u) != unit_idx.end()) continue;
            bool all = true;
            for (int c : col_idx) all = all && has_edge(u, c);
            CHECK(!all);
        }
        // column-maximal: no outside column is adjacent to every chosen unit
        for (int c = 0; c < nc; ++c) {
            if (std::find(col_idx.begin(), col_idx.end(), c) != col_idx.end()) continue;
            bool all = true;
            for (int u : unit_idx) all = all && has_edge(u, c);
            CHECK(!all);
        }
    }
}

TEST_CASE("end-to-end biclique design on the worked example") {
    const Network net = example8::network();
    const AssignmentVector z = example8::observed_z();
    const AssignmentMechanism mech = CompleteRandomization{8, 4};
    Rng rng(23);
    const HypothesisPair pair =
        HypothesisPair::builtin(ExposureKind::AnyNeighborhood, ExposureKind::OwnAndAnyPeer);
    const NullExposureGraph g = build_null_exposure_graph(pair, z, net, mech, 3, 3000, rng);
    const FocalDesign d = biclique_design(g, 3, 4);

    CHECK(d.kappa == 3);
    CHECK(static_cast<int>(d.focals.size()) >= 3);
    CHECK(static_cast<int>(d.assignments.size()) >= 4);
    CHECK(sampler_kind(d) == ConditionalSampler::Explicit);

    // S stays inside the candidate pool
    const std::vector<int> pool = candidate_focals(pair, z, net, 3);
    for (int i : d.focals)
        CHECK(std::find(pool.begin(), pool.end(), i) != pool.end());

    // the observed assignment is resampleable and a member
    CHECK(std::find(d.assignments.begin(), d.assignments.end(), z) != d.assignments.end());
    CHECK(membership(d, mech, net, z));

    // exhaustive edge check on the selected block: every listed assignment
    // preserves every focal's null exposure
    for (const auto& zb : d.assignments)
        for (int i : d.focals)
            CHECK(pair.coarsen.apply(eval_exposure(pair.e1, i, zb, net)) ==
                  eval_exposure(pair.e0, i, z, net));

    // explicit membership is exactly list membership
    AssignmentVector outside = z;
    std::swap(outside[0], outside[1]);
    if (std::find(d.assignments.begin(), d.assignments.end(), outside) == d.assignments.end())
        CHECK(!membership(d, mech, net, outside));
}

TEST_CASE("membership keeps the null exposure fixed on focals") {
    const Network net = example8::network();
    const AssignmentVector z = example8::observed_z();
    const AssignmentMechanism mech = CompleteRandomization{8, 4};
    for (auto kinds : {std::pair{ExposureKind::Own, ExposureKind::OwnAndAnyPeer},
                       std::pair{ExposureKind::AnyNeighborhood, ExposureKind::OwnAndAnyPeer}}) {
        const HypothesisPair pair = HypothesisPair::builtin(kinds.first, kinds.second);
        Rng rng(29);
        const FocalDesign d =
            mis_design(pair, z, net, kinds.first == ExposureKind::Own ? 2 : 3, rng);
        CHECK(disjoint_closed_neighborhoods(net, d.focals));
        Rng draw_rng(31);
        int members = 0;
        for (int r = 0; r < 2000; ++r) {
            const AssignmentVector zz = sample(mech, draw_rng);
            if (!membership(d, mech, net, zz)) continue;
            ++members;
            for (int i : d.focals)
                CHECK(eval_exposure(pair.e0, i, zz, net) == eval_exposure(pair.e0, i, z, net));
        }
        CHECK(members > 0);
    }
}
