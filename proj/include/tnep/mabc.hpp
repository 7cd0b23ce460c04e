#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <stdexcept>
#include <span>
#include <vector>

#include "tnep/fitness.hpp"

namespace tnep {

struct MabcParams {
    int cs_n = 20;    // colony size; food sources = ceil(cs_n / 2)
    int e_h = 2;      // neighbours drawn per move; the fittest is followed
    int lim = 6;      // trials without improvement before a scout replaces a source
    int iter = 30;
    double w_g = 1.5; // attraction towards the global best
    double mr = 0.3;  // per-gene modification probability (at least one gene moves)

    int food_sources() const { return (cs_n + 1) / 2; }
    void validate() const;
};

/// Deterministic uniform source; draws are consumed in a fixed order.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; } // [0, 1)
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)); }

private:
    std::mt19937_64 engine_;
};

struct Candidate {
    std::vector<double> x;
    double m = 0.0;
    int trial = 0;

    double fitness() const { return 1.0 / (m + 1e-12); }
};

/// Objective result: modified objective, whether the evaluation counts as a
/// full fitness evaluation (filter rejections do not), power flows solved and
/// whether the candidate is penalty-free.
struct ObjectiveValue {
    double m = 0.0;
    bool counted = true;
    long pf_calls = 0;
    bool feasible = false;
};

using Objective = std::function<ObjectiveValue(std::span<const double>)>;

struct RunStats {
    long ff_n = 0;        // counted evaluations
    long evaluations = 0; // all objective calls
    long pf_n = 0;
    int scouts = 0;
    double tp = 0.0;
    std::vector<double> history;  // best m after initialisation and after each cycle
    std::vector<long> ff_history; // ff_n at the same points
    double diversity = 0.0;       // mean pool gene variance over cycles (normalised genes)
};

struct RunResult {
    Candidate best;
    std::optional<Candidate> best_feasible; // lowest-m penalty-free candidate evaluated
    RunStats stats;
};

void clip(std::vector<double>& x, const Bounds& b);
std::vector<double> random_candidate(Rng& rng, const Bounds& b);

/// Employed/onlooker move of food source `self` towards a neighbour chosen
/// as the fittest of e_h random others, plus global-best attraction.
Candidate neighbour_move(std::size_t self, const std::vector<Candidate>& foods, const Candidate& gbest, Rng& rng,
                         const MabcParams& params, const Bounds& bounds);

/// Fresh uniform candidate when the trial counter reached the limit; returns
/// whether a replacement happened (the caller evaluates it).
bool scout_replace(Candidate& c, Rng& rng, const Bounds& bounds, int lim);

/// Normalised pool diversity: sum over genes of the variance of (x - lo) / (hi - lo).
double pool_variance(const std::vector<Candidate>& foods, const Bounds& bounds);

RunResult run(const Objective& objective, const Bounds& bounds, const MabcParams& params, std::uint64_t seed,
              const std::vector<std::vector<double>>& seeds_in = {});

struct TuneSetting {
    int e_h = 2;
    int lim = 6;
};

struct TuneRow {
    TuneSetting setting;
    std::vector<double> variance; // per trial
    std::vector<double> cost;     // best m per trial
    double min_cost = 0.0;
    double max_cost = 0.0;
    double mean_cost = 0.0;
    double mean_variance = 0.0;
};

/// Short runs over a grid of (e_h, lim) settings with seeds base_seed + trial.
std::vector<TuneRow> tune_sweep(const Objective& objective, const Bounds& bounds,
                                const std::vector<TuneSetting>& grid, const MabcParams& base, int trials,
                                int short_iter, std::uint64_t base_seed,
                                const std::vector<std::vector<double>>& seeds_in = {});

} // namespace tnep
