#include "tnep/security.hpp"

#include <algorithm>

namespace tnep {

std::vector<ContingencyId> contingency_list(const Case& c, const ExpansionPlan& plan)
{
    std::vector<ContingencyId> out;
    for (std::size_t l = 0; l < c.corridors().size(); ++l)
        if (plan.circuits(c, l) >= 1) out.push_back({static_cast<int>(out.size()) + 1, l});
    return out;
}

double derated_limit(const Corridor& corridor, int circuits, bool outaged)
{
    const int in_service = std::max(0, outaged ? circuits - 1 : circuits);
    return in_service * corridor.rating;
}

std::vector<double> corrective_dispatch(std::span<const double> base_p, double imbalance, const Case& c,
                                        GenerationMode mode)
{
    std::vector<double> p(base_p.begin(), base_p.end());
    if (mode == GenerationMode::Fixed || imbalance == 0.0) return p;

    // Redistribute in rounds: generators that saturate drop out and the rest
    // pick up the remainder.
    double remaining = imbalance;
    for (int round = 0; round < static_cast<int>(p.size()) + 1 && std::abs(remaining) > 1e-12; ++round) {
        std::vector<double> weight(p.size(), 0.0);
        double total = 0.0;
        for (std::size_t g = 0; g < p.size(); ++g) {
            if (g == c.slack_generator()) continue;
            const Generator& gen = c.generators()[g];
            const double headroom = remaining > 0.0 ? gen.p_max - p[g] : p[g] - gen.p_min;
            weight[g] = gen.participation * std::max(0.0, headroom);
            total += weight[g];
        }
        if (total <= 0.0) break;
        double moved = 0.0;
        for (std::size_t g = 0; g < p.size(); ++g) {
            if (weight[g] == 0.0) continue;
            const Generator& gen = c.generators()[g];
            const double target = std::clamp(p[g] + remaining * weight[g] / total, gen.p_min, gen.p_max);
            moved += target - p[g];
            p[g] = target;
        }
        remaining -= moved;
    }
    return p;
}

} // namespace tnep
