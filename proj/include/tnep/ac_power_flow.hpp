#pragma once

#include <complex>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "tnep/network.hpp"

namespace tnep {

using Complex = std::complex<double>;
using SparseComplex = Eigen::SparseMatrix<Complex>;

/// Bus admittance matrix of one network state. `energized` marks buses
/// connected to the slack; isolated passive buses are left out of the solve.
struct Admittance {
    SparseComplex y;
    std::vector<int> circuits;
    std::vector<bool> energized;
};

Admittance build_admittance(const Case& c, std::span<const int> circuits);
Admittance build_admittance(const Case& c, const ExpansionPlan& plan, std::optional<std::size_t> outage = std::nullopt);

/// Operating controls of one state: real output per generator (the slack entry
/// is an initial value only), voltage setpoint per bus (read at pv/slack
/// buses) and constant reactive injection per bus from installed sources.
struct Controls {
    std::vector<double> p_gen;
    std::vector<double> v_set;
    std::vector<double> q_inject;
};

/// Case dispatch, case setpoints and the plan's reactive sources.
Controls default_controls(const Case& c, const ExpansionPlan& plan);

struct PFSolution {
    std::vector<double> v;
    std::vector<double> theta;
    std::vector<double> p_gen;
    std::vector<double> q_gen;
    std::vector<double> s_from;
    std::vector<double> s_to;
    bool converged = false;
    int iterations = 0;
    double max_mismatch = 0.0;
    double mismatch_sq = 0.0; // sum of squared residuals; a failed solve reports its closest iterate
    double l_index = 0.0;
};

struct AcOptions {
    double tolerance = 1.0e-6;
    int max_iterations = 30;
    /// Warm start; pv/slack magnitudes are still taken from the controls.
    const PFSolution* start = nullptr;
};

/// Newton-Raphson in polar form. Divergence is reported through
/// `converged == false`, never thrown.
PFSolution solve_ac(const Admittance& adm, const Case& c, const Controls& controls, const AcOptions& opts = {});

/// Kessel-Glavitch L-index, maximum over energized load buses. Throws
/// NumericalError when the load block of Y is singular.
double l_index(const PFSolution& pf, const Admittance& adm, const Case& c);

struct CorridorFlows {
    std::vector<double> s_from;
    std::vector<double> s_to;
};

/// Aggregate apparent power at both ends of every corridor.
CorridorFlows corridor_flows(const PFSolution& pf, const Case& c, std::span<const int> circuits);

namespace detail {

/// Unknown layout used by the Newton iteration: angles of energized non-slack
/// buses followed by magnitudes of energized pq buses.
struct Layout {
    std::vector<int> angle_row; // bus -> row or -1
    std::vector<int> mag_row;   // bus -> row or -1
    int size = 0;
};

Layout make_layout(const Admittance& adm, const Case& c);

/// Specified minus calculated injections, in layout order.
Eigen::VectorXd mismatch(const Admittance& adm, const Case& c, const Controls& controls, const Layout& layout,
                         std::span<const double> v, std::span<const double> theta);

/// Jacobian of the calculated injections with respect to the unknowns.
Eigen::MatrixXd jacobian(const Admittance& adm, const Layout& layout, std::span<const double> v,
                         std::span<const double> theta);

} // namespace detail

} // namespace tnep
