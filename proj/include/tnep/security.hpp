#pragma once

#include <span>
#include <vector>

#include "tnep/network.hpp"

namespace tnep {

enum class GenerationMode { Fixed, Dispatch };

/// k = 0 is the base case; k >= 1 removes one circuit of `corridor`.
struct ContingencyId {
    int k = 0;
    std::size_t corridor = 0;

    bool operator==(const ContingencyId&) const = default;
};

/// One single-circuit outage per corridor that carries at least one circuit.
std::vector<ContingencyId> contingency_list(const Case& c, const ExpansionPlan& plan);

/// Aggregate rating of a corridor holding `circuits` circuits, one of which is
/// out when `outaged` is set.
double derated_limit(const Corridor& corridor, int circuits, bool outaged);

/// Post-outage generator outputs. In fixed mode the base outputs are returned
/// untouched. In dispatch mode `imbalance` (p.u., positive when generation
/// must rise) is shared across generators by participation times remaining
/// headroom and clipped to their bounds; the slack generator is excluded.
std::vector<double> corrective_dispatch(std::span<const double> base_p, double imbalance, const Case& c,
                                        GenerationMode mode);

} // namespace tnep
