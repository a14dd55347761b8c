#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "exmap/assignment.hpp"
#include "exmap/graph.hpp"

namespace exmap {

// Value of an exposure mapping: a tuple of 1 or 2 non-negative integers,
// totally ordered lexicographically.
struct ExposureValue {
    std::uint8_t len = 1;
    std::array<std::int64_t, 2> comp{0, 0};

    static ExposureValue scalar(std::int64_t a) { return {1, {a, 0}}; }
    static ExposureValue tuple(std::int64_t a, std::int64_t b) { return {2, {a, b}}; }

    friend bool operator==(const ExposureValue& a, const ExposureValue& b) {
        return a.len == b.len && a.comp == b.comp;
    }
    friend bool operator!=(const ExposureValue& a, const ExposureValue& b) { return !(a == b); }
    friend bool operator<(const ExposureValue& a, const ExposureValue& b) {
        if (a.len != b.len) return a.len < b.len;
        return a.comp < b.comp;
    }
    std::string to_string() const;
};

enum class ExposureKind {
    Constant,         // 0 regardless of z
    Own,              // z_i
    AnyNeighborhood,  // max of z over {i} and peers
    OwnAndAnyPeer,    // (z_i, max of z over peers)
    OwnAndPeerCount,  // (z_i, sum of z over peers)
    Identity,         // the whole assignment, bit-packed; n <= 62 only
    Custom,
};

// An evaluable exposure rule. Built-ins read z only through the closed
// neighborhood; Custom rules must declare their dependence set so that
// constraint predicates stay computable.
struct ExposureMapping {
    ExposureKind kind = ExposureKind::Own;
    std::function<ExposureValue(int, const AssignmentVector&, const Network&)> custom_eval;
    std::function<std::vector<int>(int, const Network&)> custom_dependence;

    static ExposureMapping builtin(ExposureKind kind);
};

ExposureValue eval_exposure(const ExposureMapping& e, int i, const AssignmentVector& z,
                            const Network& net);
std::vector<int> dependence_set(const ExposureMapping& e, int i, const Network& net);

const char* exposure_name(ExposureKind kind);
std::optional<ExposureKind> exposure_by_name(const std::string& name);

// Surjection collapsing E1 values onto E0 values.
struct CoarseningMap {
    std::function<ExposureValue(const ExposureValue&)> apply;
};

enum class OrderRule { Lex, RevLex };

// The tested pair: null exposure E0, finer exposure E1, the coarsening that
// ties them together, and the rule used to order each tilde set.
struct HypothesisPair {
    ExposureMapping e0;
    ExposureMapping e1;
    CoarseningMap coarsen;
    OrderRule order_rule = OrderRule::Lex;

    // Regressor columns X_i(z) for the OLS statistic, as a function of the
    // E1 value. Preset for the built-in pairs.
    std::function<std::vector<double>(const ExposureValue&)> x_rule;

    // Supported combinations: (Constant, Own), (Own, OwnAndAnyPeer),
    // (Own, OwnAndPeerCount), (AnyNeighborhood, OwnAndAnyPeer),
    // (OwnAndAnyPeer, OwnAndPeerCount).
    static HypothesisPair builtin(ExposureKind e0, ExposureKind e1,
                                  OrderRule order = OrderRule::Lex);
};

struct RealizableRange {
    std::vector<ExposureValue> values;  // sorted ascending
    bool exact;                         // false for sampled approximations
};

// Attainable E values for unit i. With a mechanism the range is intersected
// with design feasibility; without one it is network-implied. Custom (and
// large-n Identity) ranges are sampled under-approximations and need mech.
RealizableRange realizable_range(const ExposureMapping& e, int i, const Network& net,
                                 const AssignmentMechanism* mech = nullptr,
                                 int sample_trials = 2048);

// Ordered tilde set: the E1 values whose coarsening equals E0_i(Z).
std::vector<ExposureValue> tilde_set(const HypothesisPair& pair, int i,
                                     const AssignmentVector& Z, const Network& net,
                                     const AssignmentMechanism* mech = nullptr);

// N(kappa): units whose tilde set has exactly kappa elements.
std::vector<int> candidate_focals(const HypothesisPair& pair, const AssignmentVector& Z,
                                  const Network& net, int kappa,
                                  const AssignmentMechanism* mech = nullptr);

struct CoarsenessCheck {
    bool pass = true;
    // first violating (unit, assignment) when pass is false
    std::optional<std::pair<int, AssignmentVector>> counterexample;
};

// Randomized verification that coarsen(E1_i(z)) == E0_i(z) over draws from P_Z.
CoarsenessCheck check_coarseness(const HypothesisPair& pair, const Network& net,
                                 const AssignmentMechanism& mech, int trials, Rng& rng);

}  // namespace exmap
