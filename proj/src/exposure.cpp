#include "exmap/exposure.hpp"

#include <algorithm>
#include <set>

#include "exmap/errors.hpp"

namespace exmap {

std::string ExposureValue::to_string() const {
    if (len == 1) return std::to_string(comp[0]);
    return "(" + std::to_string(comp[0]) + "," + std::to_string(comp[1]) + ")";
}

ExposureMapping ExposureMapping::builtin(ExposureKind kind) {
    if (kind == ExposureKind::Custom)
        throw ValidationError("custom exposures need an eval rule and a dependence set");
    ExposureMapping e;
    e.kind = kind;
    return e;
}

namespace {

void check_unit(int i, const Network& net) {
    if (i < 0 || i >= net.size()) throw std::out_of_range("unit index out of range");
}

void check_vector(const AssignmentVector& z, const Network& net) {
    if (static_cast<int>(z.size()) != net.size())
        throw ValidationError("assignment vector length does not match the network");
}

std::int64_t pack_assignment(const AssignmentVector& z) {
    if (z.size() > 62) throw ValidationError("identity exposure supports at most 62 units");
    std::int64_t v = 0;
    for (size_t j = 0; j < z.size(); ++j)
        if (z[j]) v |= std::int64_t{1} << j;
    return v;
}

}  // namespace

ExposureValue eval_exposure(const ExposureMapping& e, int i, const AssignmentVector& z,
                            const Network& net) {
    check_unit(i, net);
    check_vector(z, net);
    switch (e.kind) {
        case ExposureKind::Constant:
            return ExposureValue::scalar(0);
        case ExposureKind::Own:
            return ExposureValue::scalar(z[i]);
        case ExposureKind::AnyNeighborhood: {
            if (z[i]) return ExposureValue::scalar(1);
            for (int j : net.peers(i))
                if (z[j]) return ExposureValue::scalar(1);
            return ExposureValue::scalar(0);
        }
        case ExposureKind::OwnAndAnyPeer: {
            std::int64_t any = 0;
            for (int j : net.peers(i))
                if (z[j]) {
                    any = 1;
                    break;
                }
            return ExposureValue::tuple(z[i], any);
        }
        case ExposureKind::OwnAndPeerCount: {
            std::int64_t count = 0;
            for (int j : net.peers(i)) count += z[j];
            return ExposureValue::tuple(z[i], count);
        }
        case ExposureKind::Identity:
            return ExposureValue::scalar(pack_assignment(z));
        case ExposureKind::Custom:
            if (!e.custom_eval) throw ValidationError("custom exposure has no eval rule");
            return e.custom_eval(i, z, net);
    }
    throw ValidationError("unknown exposure kind");
}

std::vector<int> dependence_set(const ExposureMapping& e, int i, const Network& net) {
    check_unit(i, net);
    switch (e.kind) {
        case ExposureKind::Constant:
            return {};
        case ExposureKind::Own:
            return {i};
        case ExposureKind::AnyNeighborhood:
        case ExposureKind::OwnAndAnyPeer:
        case ExposureKind::OwnAndPeerCount:
            return net.closed_neighborhood(i);
        case ExposureKind::Identity: {
            std::vector<int> all(net.size());
            for (int j = 0; j < net.size(); ++j) all[j] = j;
            return all;
        }
        case ExposureKind::Custom:
            if (!e.custom_dependence)
                throw ValidationError("custom exposure has no dependence set");
            return e.custom_dependence(i, net);
    }
    throw ValidationError("unknown exposure kind");
}

const char* exposure_name(ExposureKind kind) {
    switch (kind) {
        case ExposureKind::Constant: return "constant";
        case ExposureKind::Own: return "own";
        case ExposureKind::AnyNeighborhood: return "any_neighborhood";
        case ExposureKind::OwnAndAnyPeer: return "own_any_peer";
        case ExposureKind::OwnAndPeerCount: return "own_peer_count";
        case ExposureKind::Identity: return "identity";
        case ExposureKind::Custom: return "custom";
    }
    return "?";
}

std::optional<ExposureKind> exposure_by_name(const std::string& name) {
    for (ExposureKind k :
         {ExposureKind::Constant, ExposureKind::Own, ExposureKind::AnyNeighborhood,
          ExposureKind::OwnAndAnyPeer, ExposureKind::OwnAndPeerCount, ExposureKind::Identity})
        if (name == exposure_name(k)) return k;
    return std::nullopt;
}

HypothesisPair HypothesisPair::builtin(ExposureKind e0, ExposureKind e1, OrderRule order) {
    HypothesisPair pair;
    pair.e0 = ExposureMapping::builtin(e0);
    pair.e1 = ExposureMapping::builtin(e1);
    pair.order_rule = order;

    auto first = [](const ExposureValue& v) { return ExposureValue::scalar(v.comp[0]); };
    if (e0 == ExposureKind::Constant && e1 == ExposureKind::Own) {
        pair.coarsen.apply = [](const ExposureValue&) { return ExposureValue::scalar(0); };
        pair.x_rule = [](const ExposureValue& v) {
            return std::vector<double>{static_cast<double>(v.comp[0])};
        };
    } else if (e0 == ExposureKind::Own &&
               (e1 == ExposureKind::OwnAndAnyPeer || e1 == ExposureKind::OwnAndPeerCount)) {
        pair.coarsen.apply = first;
        pair.x_rule = [](const ExposureValue& v) {
            return std::vector<double>{static_cast<double>(v.comp[1])};
        };
    } else if (e0 == ExposureKind::AnyNeighborhood && e1 == ExposureKind::OwnAndAnyPeer) {
        pair.coarsen.apply = [](const ExposureValue& v) {
            return ExposureValue::scalar(std::max(v.comp[0], v.comp[1]));
        };
        pair.x_rule = [](const ExposureValue& v) {
            return std::vector<double>{static_cast<double>(v.comp[0]),
                                       static_cast<double>(v.comp[1])};
        };
    } else if (e0 == ExposureKind::OwnAndAnyPeer && e1 == ExposureKind::OwnAndPeerCount) {
        pair.coarsen.apply = [](const ExposureValue& v) {
            return ExposureValue::tuple(v.comp[0], std::min<std::int64_t>(v.comp[1], 1));
        };
        pair.x_rule = [](const ExposureValue& v) {
            return std::vector<double>{static_cast<double>(v.comp[1])};
        };
    } else {
        throw ValidationError(std::string("unsupported exposure pair: ") + exposure_name(e0) +
                              " / " + exposure_name(e1));
    }
    return pair;
}

namespace {

bool fixed_feasible(const AssignmentMechanism& mech, const FixedPattern& fixed) {
    const int n = num_units(mech);
    for (auto [i, v] : fixed)
        if (i < 0 || i >= n) throw std::out_of_range("unit index out of range");
    if (const auto* b = std::get_if<BernoulliDesign>(&mech)) {
        for (auto [i, v] : fixed) {
            if (v == 1 && b->p[i] <= 0.0) return false;
            if (v == 0 && b->p[i] >= 1.0) return false;
        }
        return true;
    }
    auto count_in = [&fixed](const std::vector<int>& units, std::uint8_t val) {
        int c = 0;
        for (auto [i, v] : fixed)
            if (v == val && std::find(units.begin(), units.end(), i) != units.end()) ++c;
        return c;
    };
    if (const auto* c = std::get_if<CompleteRandomization>(&mech)) {
        int ones = 0, zeros = 0;
        for (auto [i, v] : fixed) (v ? ones : zeros)++;
        return ones <= c->m && zeros <= c->n - c->m;
    }
    const auto& sc = std::get<StratifiedComplete>(mech);
    for (auto [label, ms] : sc.treated) {
        std::vector<int> units;
        for (int i = 0; i < n; ++i)
            if (sc.stratum[i] == label) units.push_back(i);
        const int ones = count_in(units, 1), zeros = count_in(units, 0);
        if (ones > ms || zeros > static_cast<int>(units.size()) - ms) return false;
    }
    return true;
}

// Can z_i = own while exactly k of i's peers are treated?
bool peer_count_feasible(const AssignmentMechanism& mech, int i, int own, int k,
                         const std::vector<int>& peers) {
    if (k < 0 || k > static_cast<int>(peers.size())) return false;
    if (const auto* b = std::get_if<BernoulliDesign>(&mech)) {
        if (own == 1 && b->p[i] <= 0.0) return false;
        if (own == 0 && b->p[i] >= 1.0) return false;
        int forced_one = 0, can_be_one = 0;
        for (int j : peers) {
            if (b->p[j] >= 1.0) ++forced_one;
            if (b->p[j] > 0.0) ++can_be_one;
        }
        return forced_one <= k && k <= can_be_one;
    }
    // Complete and stratified reduce to per-stratum intervals for the number
    // of treated peers that stratum can host.
    std::vector<std::pair<std::vector<int>, int>> groups;  // (members, m_s)
    if (const auto* c = std::get_if<CompleteRandomization>(&mech)) {
        std::vector<int> all(c->n);
        for (int u = 0; u < c->n; ++u) all[u] = u;
        groups.emplace_back(std::move(all), c->m);
    } else {
        const auto& sc = std::get<StratifiedComplete>(mech);
        for (auto [label, ms] : sc.treated) {
            std::vector<int> units;
            for (int u = 0; u < static_cast<int>(sc.stratum.size()); ++u)
                if (sc.stratum[u] == label) units.push_back(u);
            groups.emplace_back(std::move(units), ms);
        }
    }
    int lo_total = 0, hi_total = 0;
    for (const auto& [units, ms] : groups) {
        int peers_here = 0;
        bool own_here = false;
        for (int u : units) {
            if (u == i) own_here = true;
            if (std::find(peers.begin(), peers.end(), u) != peers.end()) ++peers_here;
        }
        const int own_ones = own_here ? own : 0;
        const int own_zeros = own_here ? 1 - own : 0;
        const int hi = std::min(peers_here, ms - own_ones);
        const int lo = std::max(0, peers_here + own_zeros -
                                       (static_cast<int>(units.size()) - ms));
        if (lo > hi) return false;
        lo_total += lo;
        hi_total += hi;
    }
    return lo_total <= k && k <= hi_total;
}

std::vector<int> own_values(const AssignmentMechanism* mech, int i) {
    std::vector<int> vals;
    for (int a : {0, 1})
        if (!mech || fixed_feasible(*mech, {{i, static_cast<std::uint8_t>(a)}}))
            vals.push_back(a);
    return vals;
}

RealizableRange sampled_range(const ExposureMapping& e, int i, const Network& net,
                              const AssignmentMechanism& mech, int trials) {
    Rng rng(0x5eedf00dULL + static_cast<std::uint64_t>(i));
    std::set<ExposureValue> seen;
    for (int t = 0; t < trials; ++t) seen.insert(eval_exposure(e, i, sample(mech, rng), net));
    return {{seen.begin(), seen.end()}, false};
}

}  // namespace

RealizableRange realizable_range(const ExposureMapping& e, int i, const Network& net,
                                 const AssignmentMechanism* mech, int sample_trials) {
    check_unit(i, net);
    std::vector<ExposureValue> vals;
    switch (e.kind) {
        case ExposureKind::Constant:
            return {{ExposureValue::scalar(0)}, true};
        case ExposureKind::Own: {
            for (int a : own_values(mech, i)) vals.push_back(ExposureValue::scalar(a));
            return {vals, true};
        }
        case ExposureKind::AnyNeighborhood: {
            const auto closed = net.closed_neighborhood(i);
            bool zero_ok = true, one_ok = false;
            if (mech) {
                FixedPattern all_zero;
                for (int j : closed) all_zero.emplace_back(j, 0);
                zero_ok = fixed_feasible(*mech, all_zero);
                for (int j : closed)
                    if (fixed_feasible(*mech, {{j, 1}})) {
                        one_ok = true;
                        break;
                    }
            } else {
                one_ok = true;
            }
            if (zero_ok) vals.push_back(ExposureValue::scalar(0));
            if (one_ok) vals.push_back(ExposureValue::scalar(1));
            return {vals, true};
        }
        case ExposureKind::OwnAndAnyPeer: {
            const auto& peers = net.peers(i);
            for (int a : {0, 1}) {
                // (a, 0): own = a and every peer control
                bool pair_zero = true, pair_one = !peers.empty();
                if (mech) {
                    FixedPattern quiet{{i, static_cast<std::uint8_t>(a)}};
                    for (int j : peers) quiet.emplace_back(j, 0);
                    pair_zero = fixed_feasible(*mech, quiet);
                    pair_one = false;
                    for (int j : peers)
                        if (fixed_feasible(*mech, {{i, static_cast<std::uint8_t>(a)}, {j, 1}})) {
                            pair_one = true;
                            break;
                        }
                }
                if (pair_zero) vals.push_back(ExposureValue::tuple(a, 0));
                if (pair_one) vals.push_back(ExposureValue::tuple(a, 1));
            }
            std::sort(vals.begin(), vals.end());
            return {vals, true};
        }
        case ExposureKind::OwnAndPeerCount: {
            const auto& peers = net.peers(i);
            for (int a : {0, 1}) {
                for (int k = 0; k <= static_cast<int>(peers.size()); ++k) {
                    bool ok = mech ? peer_count_feasible(*mech, i, a, k, peers)
                                   : true;
                    if (ok) vals.push_back(ExposureValue::tuple(a, k));
                }
            }
            std::sort(vals.begin(), vals.end());
            return {vals, true};
        }
        case ExposureKind::Identity: {
            if (!mech) {
                if (net.size() > 16)
                    throw ValidationError("identity range needs a mechanism for n > 16");
                AssignmentVector z(net.size(), 0);
                for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << net.size()); ++mask) {
                    for (int j = 0; j < net.size(); ++j) z[j] = (mask >> j) & 1;
                    vals.push_back(ExposureValue::scalar(pack_assignment(z)));
                }
                return {vals, true};
            }
            if (support_size(*mech, 1u << 16) <= (1u << 16)) {
                enumerate_support(
                    *mech,
                    [&vals](const AssignmentVector& z, double) {
                        vals.push_back(ExposureValue::scalar(pack_assignment(z)));
                    },
                    1u << 16);
                std::sort(vals.begin(), vals.end());
                return {vals, true};
            }
            return sampled_range(e, i, net, *mech, sample_trials);
        }
        case ExposureKind::Custom: {
            if (!mech)
                throw ValidationError("custom exposure ranges need a mechanism to sample from");
            return sampled_range(e, i, net, *mech, sample_trials);
        }
    }
    throw ValidationError("unknown exposure kind");
}

std::vector<ExposureValue> tilde_set(const HypothesisPair& pair, int i,
                                     const AssignmentVector& Z, const Network& net,
                                     const AssignmentMechanism* mech) {
    if (!pair.coarsen.apply) throw ValidationError("hypothesis pair has no coarsening map");
    const ExposureValue ev0 = eval_exposure(pair.e0, i, Z, net);
    const ExposureValue ev1 = eval_exposure(pair.e1, i, Z, net);
    if (pair.coarsen.apply(ev1) != ev0)
        throw ValidationError("coarsening inconsistency: c(E1_i(Z)) != E0_i(Z) at unit " +
                              std::to_string(i));
    RealizableRange range = realizable_range(pair.e1, i, net, mech);
    std::vector<ExposureValue> out;
    for (const auto& e : range.values)
        if (pair.coarsen.apply(e) == ev0) out.push_back(e);
    if (std::find(out.begin(), out.end(), ev1) == out.end()) {
        if (range.exact)
            throw ValidationError("coarsening inconsistency: observed E1 value missing from "
                                  "its own level set at unit " +
                                  std::to_string(i));
        out.push_back(ev1);  // sampled range missed the observed value
    }
    std::sort(out.begin(), out.end());
    if (pair.order_rule == OrderRule::RevLex) std::reverse(out.begin(), out.end());
    return out;
}

std::vector<int> candidate_focals(const HypothesisPair& pair, const AssignmentVector& Z,
                                  const Network& net, int kappa,
                                  const AssignmentMechanism* mech) {
    if (kappa < 2) throw ValidationError("kappa must be at least 2");
    std::vector<int> out;
    for (int i = 0; i < net.size(); ++i)
        if (static_cast<int>(tilde_set(pair, i, Z, net, mech).size()) == kappa)
            out.push_back(i);
    return out;
}

CoarsenessCheck check_coarseness(const HypothesisPair& pair, const Network& net,
                                 const AssignmentMechanism& mech, int trials, Rng& rng) {
    if (trials < 1) throw ValidationError("check_coarseness needs at least one trial");
    for (int t = 0; t < trials; ++t) {
        AssignmentVector z = sample(mech, rng);
        for (int i = 0; i < net.size(); ++i) {
            const ExposureValue fine = eval_exposure(pair.e1, i, z, net);
            const ExposureValue coarse = eval_exposure(pair.e0, i, z, net);
            if (pair.coarsen.apply(fine) != coarse) return {false, {{i, z}}};
        }
    }
    return {true, std::nullopt};
}

}  // namespace exmap
