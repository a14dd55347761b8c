#include "exmap/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <string>

#include "exmap/errors.hpp"

namespace exmap {

namespace {

std::map<int, std::vector<int>> stratum_members(const StratifiedComplete& sc) {
    std::map<int, std::vector<int>> members;
    for (int i = 0; i < static_cast<int>(sc.stratum.size()); ++i)
        members[sc.stratum[i]].push_back(i);
    return members;
}

int treated_for_label(const StratifiedComplete& sc, int label) {
    for (auto [lab, m] : sc.treated)
        if (lab == label) return m;
    throw ValidationError("stratified design: no treated count for stratum label " +
                          std::to_string(label));
}

// saturating binomial coefficient
std::uint64_t choose_capped(std::uint64_t n, std::uint64_t k, std::uint64_t cap) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        if (r > cap) return cap + 1;
        r = r * (n - k + i) / i;  // exact: product of i consecutive ints divisible by i!
    }
    return std::min(r, cap + 1);
}

void sample_m_of(const std::vector<int>& units, int m, AssignmentVector& z, Rng& rng) {
    std::vector<int> picked;
    picked.reserve(m);
    std::sample(units.begin(), units.end(), std::back_inserter(picked), m, rng);
    for (int i : picked) z[i] = 1;
}

}  // namespace

int num_units(const AssignmentMechanism& mech) {
    return std::visit(
        [](const auto& m) -> int {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, BernoulliDesign>)
                return static_cast<int>(m.p.size());
            else if constexpr (std::is_same_v<T, CompleteRandomization>)
                return m.n;
            else
                return static_cast<int>(m.stratum.size());
        },
        mech);
}

void validate(const AssignmentMechanism& mech) {
    if (num_units(mech) < 1) throw ValidationError("assignment mechanism over zero units");
    if (const auto* b = std::get_if<BernoulliDesign>(&mech)) {
        for (double p : b->p)
            if (!(p >= 0.0 && p <= 1.0))
                throw ValidationError("Bernoulli probability outside [0, 1]");
    } else if (const auto* c = std::get_if<CompleteRandomization>(&mech)) {
        if (c->m <= 0 || c->m >= c->n)
            throw ValidationError("complete randomization requires 0 < m < n");
    } else {
        const auto& sc = std::get<StratifiedComplete>(mech);
        auto members = stratum_members(sc);
        if (members.size() != sc.treated.size())
            throw ValidationError("stratified design: treated counts do not match strata");
        for (const auto& [label, units] : members) {
            int m = treated_for_label(sc, label);
            if (m < 0 || m > static_cast<int>(units.size()))
                throw ValidationError("stratified design: treated count outside [0, |stratum|]");
        }
    }
}

AssignmentVector sample(const AssignmentMechanism& mech, Rng& rng) {
    const int n = num_units(mech);
    AssignmentVector z(n, 0);
    if (const auto* b = std::get_if<BernoulliDesign>(&mech)) {
        for (int i = 0; i < n; ++i) {
            std::bernoulli_distribution coin(b->p[i]);
            z[i] = coin(rng) ? 1 : 0;
        }
    } else if (const auto* c = std::get_if<CompleteRandomization>(&mech)) {
        std::vector<int> all(n);
        std::iota(all.begin(), all.end(), 0);
        sample_m_of(all, c->m, z, rng);
    } else {
        const auto& sc = std::get<StratifiedComplete>(mech);
        for (const auto& [label, units] : stratum_members(sc))
            sample_m_of(units, treated_for_label(sc, label), z, rng);
    }
    return z;
}

bool in_support(const AssignmentMechanism& mech, const AssignmentVector& z) {
    const int n = num_units(mech);
    if (static_cast<int>(z.size()) != n)
        throw ValidationError("assignment vector length does not match the design");
    if (const auto* b = std::get_if<BernoulliDesign>(&mech)) {
        for (int i = 0; i < n; ++i) {
            if (z[i] == 1 && b->p[i] <= 0.0) return false;
            if (z[i] == 0 && b->p[i] >= 1.0) return false;
        }
        return true;
    }
    if (const auto* c = std::get_if<CompleteRandomization>(&mech)) {
        return std::accumulate(z.begin(), z.end(), 0) == c->m;
    }
    const auto& sc = std::get<StratifiedComplete>(mech);
    for (const auto& [label, units] : stratum_members(sc)) {
        int count = 0;
        for (int i : units) count += z[i];
        if (count != treated_for_label(sc, label)) return false;
    }
    return true;
}

double log_prob(const AssignmentMechanism& mech, const AssignmentVector& z) {
    if (!in_support(mech, z)) return -std::numeric_limits<double>::infinity();
    if (const auto* b = std::get_if<BernoulliDesign>(&mech)) {
        double lp = 0.0;
        for (size_t i = 0; i < z.size(); ++i)
            lp += z[i] ? std::log(b->p[i]) : std::log1p(-b->p[i]);
        return lp;
    }
    auto log_choose = [](int n, int k) {
        return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
    };
    if (const auto* c = std::get_if<CompleteRandomization>(&mech))
        return -log_choose(c->n, c->m);
    const auto& sc = std::get<StratifiedComplete>(mech);
    double lp = 0.0;
    for (const auto& [label, units] : stratum_members(sc))
        lp -= log_choose(static_cast<int>(units.size()), treated_for_label(sc, label));
    return lp;
}

ConditionalDraw sample_conditional(const AssignmentMechanism& mech,
                                   const ConstraintPredicate& pred, long max_attempts,
                                   Rng& rng) {
    for (long attempt = 1; attempt <= max_attempts; ++attempt) {
        AssignmentVector z = sample(mech, rng);
        if (pred(z)) return {std::move(z), attempt};
    }
    throw SamplingError("low acceptance rate: no draw satisfied the constraint in " +
                            std::to_string(max_attempts) + " attempts",
                        max_attempts);
}

AssignmentVector sample_conditional_fixed_units(const AssignmentMechanism& mech,
                                                const FixedPattern& fixed, Rng& rng) {
    const int n = num_units(mech);
    std::vector<int> pinned(n, -1);
    for (auto [i, v] : fixed) {
        if (i < 0 || i >= n) throw ValidationError("fixed unit out of range");
        if (v > 1) throw ValidationError("fixed value must be 0 or 1");
        if (pinned[i] >= 0 && pinned[i] != v)
            throw ValidationError("contradictory fixed values for one unit");
        pinned[i] = v;
    }

    AssignmentVector z(n, 0);
    if (const auto* b = std::get_if<BernoulliDesign>(&mech)) {
        for (int i = 0; i < n; ++i) {
            if (pinned[i] == 1 && b->p[i] <= 0.0)
                throw ValidationError("infeasible constraint: unit can never be treated");
            if (pinned[i] == 0 && b->p[i] >= 1.0)
                throw ValidationError("infeasible constraint: unit is always treated");
            if (pinned[i] >= 0) {
                z[i] = static_cast<std::uint8_t>(pinned[i]);
            } else {
                std::bernoulli_distribution coin(b->p[i]);
                z[i] = coin(rng) ? 1 : 0;
            }
        }
        return z;
    }

    auto fill_group = [&](const std::vector<int>& units, int m) {
        int fixed_ones = 0, fixed_zeros = 0;
        std::vector<int> free_units;
        for (int i : units) {
            if (pinned[i] == 1) {
                ++fixed_ones;
                z[i] = 1;
            } else if (pinned[i] == 0) {
                ++fixed_zeros;
            } else {
                free_units.push_back(i);
            }
        }
        const int remaining = m - fixed_ones;
        if (remaining < 0 || remaining > static_cast<int>(free_units.size()))
            throw ValidationError("infeasible constraint: fixed pattern incompatible with the "
                                  "treated count");
        sample_m_of(free_units, remaining, z, rng);
    };

    if (const auto* c = std::get_if<CompleteRandomization>(&mech)) {
        std::vector<int> all(n);
        std::iota(all.begin(), all.end(), 0);
        fill_group(all, c->m);
        return z;
    }
    const auto& sc = std::get<StratifiedComplete>(mech);
    for (const auto& [label, units] : stratum_members(sc))
        fill_group(units, treated_for_label(sc, label));
    return z;
}

namespace {

// Visits all ways of treating exactly m units of `units`, writing into z.
void enumerate_group(const std::vector<std::vector<int>>& groups,
                     const std::vector<int>& counts, size_t gi, AssignmentVector& z,
                     double log_weight,
                     const std::function<void(const AssignmentVector&, double)>& visit) {
    if (gi == groups.size()) {
        visit(z, std::exp(log_weight));
        return;
    }
    const auto& units = groups[gi];
    const int k = counts[gi];
    const int n = static_cast<int>(units.size());
    const double lw = log_weight - (std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
                                    std::lgamma(n - k + 1.0));
    std::vector<int> comb(k);
    std::iota(comb.begin(), comb.end(), 0);
    while (true) {
        for (int c : comb) z[units[c]] = 1;
        enumerate_group(groups, counts, gi + 1, z, lw, visit);
        for (int c : comb) z[units[c]] = 0;
        // next k-combination of [0, n)
        int i = k - 1;
        while (i >= 0 && comb[i] == n - k + i) --i;
        if (i < 0) break;
        ++comb[i];
        for (int j = i + 1; j < k; ++j) comb[j] = comb[j - 1] + 1;
    }
}

}  // namespace

std::uint64_t support_size(const AssignmentMechanism& mech, std::uint64_t cap) {
    if (const auto* b = std::get_if<BernoulliDesign>(&mech)) {
        int free_units = 0;
        for (double p : b->p)
            if (p > 0.0 && p < 1.0) ++free_units;
        if (free_units >= 64) return cap + 1;
        std::uint64_t s = std::uint64_t{1} << free_units;
        return std::min(s, cap + 1);
    }
    if (const auto* c = std::get_if<CompleteRandomization>(&mech))
        return choose_capped(c->n, c->m, cap);
    const auto& sc = std::get<StratifiedComplete>(mech);
    std::uint64_t total = 1;
    for (const auto& [label, units] : stratum_members(sc)) {
        std::uint64_t s = choose_capped(units.size(), treated_for_label(sc, label), cap);
        if (s == 0) return 0;
        if (total > (cap + 1) / s) return cap + 1;
        total *= s;
    }
    return std::min(total, cap + 1);
}

void enumerate_support(const AssignmentMechanism& mech,
                       const std::function<void(const AssignmentVector&, double)>& visit,
                       std::uint64_t max_patterns) {
    validate(mech);
    if (support_size(mech, max_patterns) > max_patterns)
        throw ValidationError("support too large to enumerate");
    const int n = num_units(mech);
    AssignmentVector z(n, 0);

    if (const auto* b = std::get_if<BernoulliDesign>(&mech)) {
        std::vector<int> free_units;
        double base_lp = 0.0;
        for (int i = 0; i < n; ++i) {
            if (b->p[i] >= 1.0) {
                z[i] = 1;
            } else if (b->p[i] > 0.0) {
                free_units.push_back(i);
            }
        }
        const int k = static_cast<int>(free_units.size());
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << k); ++mask) {
            double lp = base_lp;
            for (int bit = 0; bit < k; ++bit) {
                const int i = free_units[bit];
                const bool on = (mask >> bit) & 1;
                z[i] = on ? 1 : 0;
                lp += on ? std::log(b->p[i]) : std::log1p(-b->p[i]);
            }
            visit(z, std::exp(lp));
        }
        return;
    }

    std::vector<std::vector<int>> groups;
    std::vector<int> counts;
    if (const auto* c = std::get_if<CompleteRandomization>(&mech)) {
        std::vector<int> all(n);
        std::iota(all.begin(), all.end(), 0);
        groups.push_back(std::move(all));
        counts.push_back(c->m);
    } else {
        const auto& sc = std::get<StratifiedComplete>(mech);
        for (const auto& [label, units] : stratum_members(sc)) {
            groups.push_back(units);
            counts.push_back(treated_for_label(sc, label));
        }
    }
    enumerate_group(groups, counts, 0, z, 0.0, visit);
}

}  // namespace exmap
