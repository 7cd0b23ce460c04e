#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "tnep/network.hpp"

namespace tnep {

/// A load or generator bus is cut off from the slack in the evaluated state.
class IslandingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct DcSolution {
    std::vector<double> theta; // radians per bus
    std::vector<double> flow;  // aggregate real flow per corridor, from -> to
    double slack_injection = 0.0;
};

/// Circuits in service per corridor for a plan, with one circuit of `outage`
/// removed.
std::vector<int> circuits_in_service(const Case& c, const ExpansionPlan& plan, std::optional<std::size_t> outage);

/// Buses reachable from the slack through in-service circuits.
std::vector<bool> slack_component(const Case& c, std::span<const int> circuits);

/// True when every bus with demand or a generator is reachable from the slack.
bool is_connected(const Case& c, std::span<const int> circuits);

/// Net real injection per bus (generation minus demand). The slack entry is
/// left at its scheduled value; the solver overrides it with the balance.
std::vector<double> dc_injections(const Case& c, std::span<const double> p_gen);

/// Full B-theta solve. Throws IslandingError for a disconnected state.
DcSolution solve_dc(const Case& c, const ExpansionPlan& plan, std::span<const double> p_gen,
                    std::optional<std::size_t> outage = std::nullopt);

/// Factorised base-case network. Single-circuit outages are solved by a
/// rank-one compensation of the base factorisation.
class DcNetwork {
public:
    DcNetwork(const Case& c, const ExpansionPlan& plan, std::span<const double> p_gen);

    const DcSolution& base() const { return base_; }
    DcSolution outage(std::size_t corridor) const;

private:
    const Case& case_;
    ExpansionPlan plan_;
    std::vector<double> p_gen_;
    std::vector<int> circuits_;
    std::vector<int> reduced_; // bus index -> row in the reduced system, -1 if excluded
    Eigen::LDLT<Eigen::MatrixXd> factor_;
    Eigen::VectorXd injections_;
    Eigen::VectorXd theta_base_;
    DcSolution base_;
};

} // namespace tnep
