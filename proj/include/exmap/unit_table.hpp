#pragma once

#include <optional>
#include <string>
#include <vector>

#include "exmap/assignment.hpp"

namespace exmap {

// Per-unit data: CSV with header id,y,z plus optional d and stratum columns
// in any order. Ids must cover 1..n exactly.
struct UnitTable {
    int n = 0;
    std::vector<double> y;
    AssignmentVector z;
    std::optional<AssignmentVector> d;
    std::optional<std::vector<int>> stratum;
};

UnitTable load_unit_table(const std::string& path);

}  // namespace exmap
