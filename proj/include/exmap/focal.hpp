#pragma once

#include <cstdint>
#include <vector>

#include "exmap/assignment.hpp"
#include "exmap/exposure.hpp"
#include "exmap/graph.hpp"

namespace exmap {

enum class FocalMethod { Mis, Random, Biclique };

const char* focal_method_name(FocalMethod m);

// A focal subpopulation S together with a representation of its focal
// assignment set C^S. Constraint designs keep C^S implicit through the
// per-focal tilde sets; explicit designs carry a finite list of assignment
// vectors with multiplicities.
struct FocalDesign {
    HypothesisPair pair;
    std::vector<int> focals;                        // ordered S
    std::vector<std::vector<ExposureValue>> tilde;  // per focal, ordered, length kappa
    int kappa = 0;
    FocalMethod method = FocalMethod::Mis;
    AssignmentVector observed;

    bool explicit_rep = false;
    std::vector<AssignmentVector> assignments;  // distinct columns of Z_b
    std::vector<long> weights;                  // multiplicities, aligned with assignments
};

// How the engine should draw from P_{Z | Z in C^S}.
enum class ConditionalSampler { Unconstrained, FixedUnits, Rejection, Explicit };

ConditionalSampler sampler_kind(const FocalDesign& design);
FixedPattern fixed_pattern(const FocalDesign& design);  // FixedUnits designs only

// True iff z is a focal assignment of the design.
bool membership(const FocalDesign& design, const AssignmentMechanism& mech,
                const Network& net, const AssignmentVector& z);

// S = greedy independent set of the common-friend graph on N(kappa); the
// focal assignments keep every focal's E1 value inside its tilde set.
FocalDesign mis_design(const HypothesisPair& pair, const AssignmentVector& Z,
                       const Network& net, int kappa, Rng& rng);

// S = uniform random subset of N(kappa) of size ceil(fraction * |N(kappa)|).
FocalDesign random_design(const HypothesisPair& pair, const AssignmentVector& Z,
                          const Network& net, int kappa, double fraction, Rng& rng);

// Bipartite null exposure graph between N(kappa) and a drawn pool Z0.
// Columns are deduplicated with multiplicity weights; Z itself always
// belongs to the pool and is adjacent to every candidate unit.
struct NullExposureGraph {
    HypothesisPair pair;
    AssignmentVector observed;
    int kappa = 0;
    std::vector<int> units;                         // N(kappa)
    std::vector<std::vector<ExposureValue>> tilde;  // per candidate unit
    std::vector<AssignmentVector> columns;          // distinct assignments
    std::vector<long> multiplicity;
    std::vector<std::vector<int>> unit_cols;  // per unit: sorted column indices with an edge
};

NullExposureGraph build_null_exposure_graph(const HypothesisPair& pair,
                                            const AssignmentVector& Z, const Network& net,
                                            const AssignmentMechanism& mech, int kappa,
                                            long num_assignments, Rng& rng);

enum class BicliqueScore { UnitsLogAssignments, Units, Product };

// Inclusion-maximal biclique search with a node-expansion budget. Returns an
// explicit design (S = N_b, C^S = Z_b) maximizing the chosen score among the
// bicliques enumerated; throws DegenerateDesignError when none meets the
// minima.
FocalDesign biclique_design(const NullExposureGraph& graph, int min_units,
                            int min_assignments,
                            BicliqueScore score = BicliqueScore::UnitsLogAssignments,
                            long budget = 100000);

}  // namespace exmap
