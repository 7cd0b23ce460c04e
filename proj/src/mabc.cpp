#include "tnep/mabc.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace tnep {

void MabcParams::validate() const
{
    if (cs_n < 2) throw std::invalid_argument("colony size must be at least 2");
    if (e_h < 1) throw std::invalid_argument("e_h must be at least 1");
    if (lim < 1) throw std::invalid_argument("lim must be at least 1");
    if (iter < 0) throw std::invalid_argument("iter must be non-negative");
    if (w_g < 0.0) throw std::invalid_argument("w_g must be non-negative");
    if (!(mr > 0.0 && mr <= 1.0)) throw std::invalid_argument("mr must lie in (0, 1]");
}

void clip(std::vector<double>& x, const Bounds& b)
{
    for (std::size_t j = 0; j < x.size(); ++j) {
        if (b.integer[j]) x[j] = std::round(x[j]); // half away from zero
        x[j] = std::clamp(x[j], b.lo[j], b.hi[j]);
    }
}

std::vector<double> random_candidate(Rng& rng, const Bounds& b)
{
    std::vector<double> x(b.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
        if (b.integer[j]) {
            const auto span = static_cast<std::size_t>(b.hi[j] - b.lo[j]) + 1;
            x[j] = b.lo[j] + static_cast<double>(rng.index(span));
        } else {
            x[j] = rng.uniform(b.lo[j], b.hi[j]);
        }
    }
    return x;
}

Candidate neighbour_move(std::size_t self, const std::vector<Candidate>& foods, const Candidate& gbest, Rng& rng,
                         const MabcParams& params, const Bounds& bounds)
{
    const Candidate& cur = foods[self];
    Candidate out;
    out.x = cur.x;
    out.trial = cur.trial;

    std::size_t k = self;
    if (foods.size() > 1) {
        const int draws = std::min<int>(params.e_h, static_cast<int>(foods.size()) - 1);
        double best_fit = -1.0;
        for (int d = 0; d < draws; ++d) {
            std::size_t pick = rng.index(foods.size() - 1);
            if (pick >= self) ++pick;
            if (foods[pick].fitness() > best_fit) {
                best_fit = foods[pick].fitness();
                k = pick;
            }
        }
    }

    const std::size_t dim = cur.x.size();
    const std::size_t forced = rng.index(dim);
    for (std::size_t j = 0; j < dim; ++j) {
        const double u = rng.uniform();
        if (j != forced && u >= params.mr) continue;
        const double phi = rng.uniform(-1.0, 1.0);
        const double psi = rng.uniform();
        out.x[j] = cur.x[j] + phi * (cur.x[j] - foods[k].x[j]) + params.w_g * psi * (gbest.x[j] - cur.x[j]);
    }
    clip(out.x, bounds);
    return out;
}

bool scout_replace(Candidate& c, Rng& rng, const Bounds& bounds, int lim)
{
    if (c.trial < lim) return false;
    c.x = random_candidate(rng, bounds);
    c.trial = 0;
    return true;
}

double pool_variance(const std::vector<Candidate>& foods, const Bounds& bounds)
{
    if (foods.empty()) return 0.0;
    double total = 0.0;
    const double n = static_cast<double>(foods.size());
    for (std::size_t j = 0; j < bounds.size(); ++j) {
        const double range = bounds.hi[j] - bounds.lo[j];
        if (range <= 0.0) continue;
        double mean = 0.0;
        for (const Candidate& f : foods) mean += (f.x[j] - bounds.lo[j]) / range;
        mean /= n;
        double var = 0.0;
        for (const Candidate& f : foods) {
            const double z = (f.x[j] - bounds.lo[j]) / range - mean;
            var += z * z;
        }
        total += var / n;
    }
    return total;
}

RunResult run(const Objective& objective, const Bounds& bounds, const MabcParams& params, std::uint64_t seed,
              const std::vector<std::vector<double>>& seeds_in)
{
    params.validate();
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(seed);
    RunResult res;
    RunStats& st = res.stats;

    auto eval = [&](Candidate& c) {
        const ObjectiveValue v = objective(c.x);
        c.m = v.m;
        ++st.evaluations;
        if (v.counted) ++st.ff_n;
        st.pf_n += v.pf_calls;
        if (v.feasible && (!res.best_feasible || v.m < res.best_feasible->m)) res.best_feasible = c;
    };

    const auto n_food = static_cast<std::size_t>(params.food_sources());
    std::vector<Candidate> foods(n_food);
    for (std::size_t i = 0; i < n_food; ++i) {
        if (i < seeds_in.size()) {
            foods[i].x = seeds_in[i];
            clip(foods[i].x, bounds);
        } else {
            foods[i].x = random_candidate(rng, bounds);
        }
        eval(foods[i]);
    }
    auto best_of = [&]() {
        return *std::min_element(foods.begin(), foods.end(),
                                 [](const Candidate& a, const Candidate& b) { return a.m < b.m; });
    };
    Candidate& gbest = res.best;
    gbest = best_of();
    st.history.push_back(gbest.m);
    st.ff_history.push_back(st.ff_n);

    auto improve = [&](std::size_t i) {
        Candidate trial = neighbour_move(i, foods, gbest, rng, params, bounds);
        if (trial.x == foods[i].x) {
            ++foods[i].trial;
            return;
        }
        eval(trial);
        if (trial.m < foods[i].m) {
            trial.trial = 0;
            foods[i] = std::move(trial);
            if (foods[i].m < gbest.m) gbest = foods[i];
        } else {
            ++foods[i].trial;
        }
    };

    double diversity_sum = 0.0;
    for (int it = 0; it < params.iter; ++it) {
        for (std::size_t i = 0; i < n_food; ++i) improve(i);

        for (std::size_t o = 0; o < n_food; ++o) {
            double total = 0.0;
            for (const Candidate& f : foods) total += f.fitness();
            double r = rng.uniform() * total;
            std::size_t pick = n_food - 1;
            for (std::size_t i = 0; i < n_food; ++i) {
                r -= foods[i].fitness();
                if (r < 0.0) {
                    pick = i;
                    break;
                }
            }
            improve(pick);
        }

        for (Candidate& f : foods) {
            if (scout_replace(f, rng, bounds, params.lim)) {
                ++st.scouts;
                eval(f);
                if (f.m < gbest.m) gbest = f;
            }
        }
        diversity_sum += pool_variance(foods, bounds);
        st.history.push_back(gbest.m);
        st.ff_history.push_back(st.ff_n);
    }
    st.diversity = params.iter > 0 ? diversity_sum / params.iter : pool_variance(foods, bounds);
    st.tp = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

std::vector<TuneRow> tune_sweep(const Objective& objective, const Bounds& bounds,
                                const std::vector<TuneSetting>& grid, const MabcParams& base, int trials,
                                int short_iter, std::uint64_t base_seed,
                                const std::vector<std::vector<double>>& seeds_in)
{
    if (trials < 1) throw std::invalid_argument("tune sweep needs at least one trial");
    std::vector<TuneRow> rows;
    for (const TuneSetting& s : grid) {
        MabcParams p = base;
        p.e_h = s.e_h;
        p.lim = s.lim;
        p.iter = short_iter;
        TuneRow row;
        row.setting = s;
        for (int t = 0; t < trials; ++t) {
            const RunResult r = run(objective, bounds, p, base_seed + static_cast<std::uint64_t>(t), seeds_in);
            row.variance.push_back(r.stats.diversity);
            row.cost.push_back(r.best.m);
        }
        row.min_cost = *std::min_element(row.cost.begin(), row.cost.end());
        row.max_cost = *std::max_element(row.cost.begin(), row.cost.end());
        row.mean_cost = std::accumulate(row.cost.begin(), row.cost.end(), 0.0) / trials;
        row.mean_variance = std::accumulate(row.variance.begin(), row.variance.end(), 0.0) / trials;
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace tnep
