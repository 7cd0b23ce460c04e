#include "tnep/dc_power_flow.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tnep {

namespace {

bool is_active(const Case& c, std::size_t bus)
{
    const Bus& b = c.buses()[bus];
    return b.p_demand != 0.0 || b.q_demand != 0.0 || c.generator_at(bus).has_value();
}

/// Row numbering of the reduced system: connected non-slack buses only.
std::vector<int> reduced_index(const Case& c, std::span<const int> circuits)
{
    const std::vector<bool> seen = slack_component(c, circuits);
    std::vector<int> idx(c.buses().size(), -1);
    int next = 0;
    for (std::size_t i = 0; i < idx.size(); ++i) {
        if (!seen[i]) {
            if (is_active(c, i)) throw IslandingError("bus " + std::to_string(c.buses()[i].id) + " is islanded");
            continue;
        }
        if (i != c.slack_index()) idx[i] = next++;
    }
    return idx;
}

Eigen::MatrixXd reduced_susceptance(const Case& c, std::span<const int> circuits, const std::vector<int>& idx, int n)
{
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t l = 0; l < c.corridors().size(); ++l) {
        if (circuits[l] <= 0) continue;
        const Corridor& cor = c.corridors()[l];
        const double y = circuits[l] / cor.x;
        const int i = idx[c.ends(l).first];
        const int j = idx[c.ends(l).second];
        if (i >= 0) b(i, i) += y;
        if (j >= 0) b(j, j) += y;
        if (i >= 0 && j >= 0) {
            b(i, j) -= y;
            b(j, i) -= y;
        }
    }
    return b;
}

DcSolution assemble(const Case& c, std::span<const int> circuits, const std::vector<int>& idx,
                    const Eigen::VectorXd& theta_reduced, std::span<const double> injections)
{
    DcSolution sol;
    sol.theta.assign(c.buses().size(), 0.0);
    for (std::size_t i = 0; i < idx.size(); ++i)
        if (idx[i] >= 0) sol.theta[i] = theta_reduced[idx[i]];
    sol.flow.assign(c.corridors().size(), 0.0);
    for (std::size_t l = 0; l < c.corridors().size(); ++l) {
        if (circuits[l] <= 0) continue;
        const Corridor& cor = c.corridors()[l];
        sol.flow[l] = circuits[l] / cor.x * (sol.theta[c.ends(l).first] - sol.theta[c.ends(l).second]);
    }
    double others = 0.0;
    for (std::size_t i = 0; i < injections.size(); ++i)
        if (i != c.slack_index()) others += injections[i];
    sol.slack_injection = -others;
    return sol;
}

Eigen::VectorXd reduced_injections(const std::vector<int>& idx, int n, std::span<const double> injections)
{
    Eigen::VectorXd p = Eigen::VectorXd::Zero(n);
    for (std::size_t i = 0; i < idx.size(); ++i)
        if (idx[i] >= 0) p[idx[i]] = injections[i];
    return p;
}

} // namespace

std::vector<int> circuits_in_service(const Case& c, const ExpansionPlan& plan, std::optional<std::size_t> outage)
{
    std::vector<int> n(c.corridors().size());
    for (std::size_t l = 0; l < n.size(); ++l) n[l] = plan.circuits(c, l);
    if (outage) {
        if (*outage >= n.size() || n[*outage] < 1) throw CaseError("outage on a corridor without circuits");
        --n[*outage];
    }
    return n;
}

std::vector<bool> slack_component(const Case& c, std::span<const int> circuits)
{
    const std::size_t n = c.buses().size();
    std::vector<std::vector<std::size_t>> adj(n);
    for (std::size_t l = 0; l < c.corridors().size(); ++l) {
        if (circuits[l] <= 0) continue;
        const auto [i, j] = c.ends(l);
        adj[i].push_back(j);
        adj[j].push_back(i);
    }
    std::vector<bool> seen(n, false);
    std::vector<std::size_t> stack{c.slack_index()};
    seen[c.slack_index()] = true;
    while (!stack.empty()) {
        const std::size_t u = stack.back();
        stack.pop_back();
        for (std::size_t v : adj[u])
            if (!seen[v]) {
                seen[v] = true;
                stack.push_back(v);
            }
    }
    return seen;
}

bool is_connected(const Case& c, std::span<const int> circuits)
{
    const std::vector<bool> seen = slack_component(c, circuits);
    for (std::size_t i = 0; i < seen.size(); ++i)
        if (!seen[i] && is_active(c, i)) return false;
    return true;
}

std::vector<double> dc_injections(const Case& c, std::span<const double> p_gen)
{
    if (p_gen.size() != c.generators().size()) throw CaseError("dispatch vector does not match generators");
    std::vector<double> p(c.buses().size());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = -c.buses()[i].p_demand;
    for (std::size_t g = 0; g < p_gen.size(); ++g) p[c.generator_bus(g)] += p_gen[g];
    return p;
}

DcSolution solve_dc(const Case& c, const ExpansionPlan& plan, std::span<const double> p_gen,
                    std::optional<std::size_t> outage)
{
    const std::vector<int> circuits = circuits_in_service(c, plan, outage);
    const std::vector<int> idx = reduced_index(c, circuits);
    const int n = *std::max_element(idx.begin(), idx.end()) + 1;
    const std::vector<double> inj = dc_injections(c, p_gen);
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(n);
    if (n > 0) {
        const Eigen::MatrixXd b = reduced_susceptance(c, circuits, idx, n);
        Eigen::FullPivLU<Eigen::MatrixXd> lu(b);
        if (!lu.isInvertible()) throw NumericalError("singular B matrix");
        theta = lu.solve(reduced_injections(idx, n, inj));
    }
    return assemble(c, circuits, idx, theta, inj);
}

DcNetwork::DcNetwork(const Case& c, const ExpansionPlan& plan, std::span<const double> p_gen)
    : case_(c), plan_(plan), p_gen_(p_gen.begin(), p_gen.end())
{
    circuits_ = circuits_in_service(c, plan, std::nullopt);
    reduced_ = reduced_index(c, circuits_);
    const int n = *std::max_element(reduced_.begin(), reduced_.end()) + 1;
    const std::vector<double> inj = dc_injections(c, p_gen_);
    injections_ = reduced_injections(reduced_, n, inj);
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(n);
    if (n > 0) {
        factor_.compute(reduced_susceptance(c, circuits_, reduced_, n));
        if (factor_.info() != Eigen::Success || factor_.vectorD().minCoeff() <= 0.0)
            throw NumericalError("B matrix is not positive definite");
        theta = factor_.solve(injections_);
    }
    theta_base_ = theta;
    base_ = assemble(c, circuits_, reduced_, theta, inj);
}

DcSolution DcNetwork::outage(std::size_t corridor) const
{
    std::vector<int> circuits = circuits_;
    if (corridor >= circuits.size() || circuits[corridor] < 1) throw CaseError("outage on a corridor without circuits");
    --circuits[corridor];
    if (!is_connected(case_, circuits)) throw IslandingError("outage islands the network");

    const Corridor& cor = case_.corridors()[corridor];
    const int i = reduced_[case_.ends(corridor).first];
    const int j = reduced_[case_.ends(corridor).second];
    const int n = static_cast<int>(injections_.size());
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    if (i >= 0) e[i] = 1.0;
    if (j >= 0) e[j] = -1.0;

    // B' = B + delta * e e^T with delta = -1/x; Sherman-Morrison on the base factor.
    const double delta = -1.0 / cor.x;
    const Eigen::VectorXd z = factor_.solve(e);
    const double denom = 1.0 + delta * e.dot(z);
    const Eigen::VectorXd& theta0 = theta_base_;
    if (std::abs(denom) < 1e-10) {
        // Only a passive bus was cut off; fall back to a full solve.
        return solve_dc(case_, plan_, p_gen_, corridor);
    }
    const Eigen::VectorXd theta = theta0 - z * (delta * e.dot(theta0) / denom);
    return assemble(case_, circuits, reduced_, theta, dc_injections(case_, p_gen_));
}

} // namespace tnep
