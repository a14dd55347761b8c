#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <variant>
#include <vector>

#include "exmap/rng.hpp"

namespace exmap {

// Binary treatment assignment over n units, z[i] in {0, 1}.
using AssignmentVector = std::vector<std::uint8_t>;

// Membership test for a focal-assignment set C^S.
using ConstraintPredicate = std::function<bool(const AssignmentVector&)>;

// Independent coin flips, per-unit probabilities.
struct BernoulliDesign {
    std::vector<double> p;

    BernoulliDesign() = default;
    BernoulliDesign(int n, double prob) : p(n, prob) {}
    explicit BernoulliDesign(std::vector<double> probs) : p(std::move(probs)) {}
};

// Exactly m treated units, uniform over all (n choose m) patterns.
struct CompleteRandomization {
    int n;
    int m;
};

// Complete randomization within each stratum. stratum[i] is an arbitrary
// integer label; treated[s] is the count for label s.
struct StratifiedComplete {
    std::vector<int> stratum;
    std::vector<std::pair<int, int>> treated;  // (label, m_s), one entry per label
};

using AssignmentMechanism =
    std::variant<BernoulliDesign, CompleteRandomization, StratifiedComplete>;

int num_units(const AssignmentMechanism& mech);
void validate(const AssignmentMechanism& mech);

// One draw distributed exactly as P_Z.
AssignmentVector sample(const AssignmentMechanism& mech, Rng& rng);

// True iff P_Z(z) > 0.
bool in_support(const AssignmentMechanism& mech, const AssignmentVector& z);

// P_Z(z); zero off-support. Used by the exact-enumeration oracle.
double log_prob(const AssignmentMechanism& mech, const AssignmentVector& z);

struct ConditionalDraw {
    AssignmentVector z;
    long attempts;
};

// Exact rejection sampler for P_{Z | pred(Z)}. Throws SamplingError with the
// attempt count once max_attempts draws were rejected.
ConditionalDraw sample_conditional(const AssignmentMechanism& mech,
                                   const ConstraintPredicate& pred, long max_attempts,
                                   Rng& rng);

// (unit, value) constraints; each unit at most once.
using FixedPattern = std::vector<std::pair<int, std::uint8_t>>;

// Exact draw from P_Z conditioned on z matching the fixed pattern. Throws
// ValidationError when the pattern is infeasible under the design.
AssignmentVector sample_conditional_fixed_units(const AssignmentMechanism& mech,
                                                const FixedPattern& fixed, Rng& rng);

// Enumerates the support, calling visit(z, P_Z(z)) once per pattern. Throws
// ValidationError when the support exceeds max_patterns.
void enumerate_support(const AssignmentMechanism& mech,
                       const std::function<void(const AssignmentVector&, double)>& visit,
                       std::uint64_t max_patterns);

// Support size if representable, otherwise max+1 as a saturation marker.
std::uint64_t support_size(const AssignmentMechanism& mech, std::uint64_t cap);

}  // namespace exmap
