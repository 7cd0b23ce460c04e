#include "tnep/ac_power_flow.hpp"

#include <cmath>
#include <limits>

#include <Eigen/SparseLU>

#include "tnep/dc_power_flow.hpp"

namespace tnep {

namespace {

std::vector<bool> energized_buses(const Case& c, std::span<const int> circuits)
{
    std::vector<std::vector<std::size_t>> adj(c.buses().size());
    for (std::size_t l = 0; l < c.corridors().size(); ++l) {
        if (circuits[l] <= 0) continue;
        const auto [i, j] = c.ends(l);
        adj[i].push_back(j);
        adj[j].push_back(i);
    }
    std::vector<bool> seen(c.buses().size(), false);
    std::vector<std::size_t> stack{c.slack_index()};
    seen[c.slack_index()] = true;
    while (!stack.empty()) {
        const std::size_t u = stack.back();
        stack.pop_back();
        for (std::size_t w : adj[u])
            if (!seen[w]) {
                seen[w] = true;
                stack.push_back(w);
            }
    }
    return seen;
}

std::vector<Complex> phasors(std::span<const double> v, std::span<const double> theta)
{
    std::vector<Complex> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::polar(v[i], theta[i]);
    return out;
}

/// Complex power injections S = V conj(Y V).
std::vector<Complex> injections(const SparseComplex& y, const std::vector<Complex>& vc)
{
    std::vector<Complex> current(vc.size(), Complex{});
    for (int k = 0; k < y.outerSize(); ++k)
        for (SparseComplex::InnerIterator it(y, k); it; ++it) current[it.row()] += it.value() * vc[it.col()];
    std::vector<Complex> s(vc.size());
    for (std::size_t i = 0; i < vc.size(); ++i) s[i] = vc[i] * std::conj(current[i]);
    return s;
}

struct Specified {
    std::vector<double> p;
    std::vector<double> q;
};

Specified specified(const Case& c, const Controls& ctl)
{
    Specified s;
    s.p.resize(c.buses().size());
    s.q.resize(c.buses().size());
    for (std::size_t i = 0; i < c.buses().size(); ++i) {
        s.p[i] = -c.buses()[i].p_demand;
        s.q[i] = -c.buses()[i].q_demand + ctl.q_inject[i];
    }
    for (std::size_t g = 0; g < c.generators().size(); ++g) s.p[c.generator_bus(g)] += ctl.p_gen[g];
    return s;
}

Eigen::VectorXd residual(const detail::Layout& layout, const Specified& spec, const std::vector<Complex>& s)
{
    Eigen::VectorXd f(layout.size);
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (layout.angle_row[i] >= 0) f[layout.angle_row[i]] = spec.p[i] - s[i].real();
        if (layout.mag_row[i] >= 0) f[layout.mag_row[i]] = spec.q[i] - s[i].imag();
    }
    return f;
}

/// Jacobian entries as triplets; the sparsity follows Y.
std::vector<Eigen::Triplet<double>> jacobian_triplets(const SparseComplex& y, const detail::Layout& layout,
                                                      const std::vector<Complex>& vc, std::span<const double> v)
{
    const std::size_t n = vc.size();
    std::vector<Complex> current(n, Complex{});
    for (int k = 0; k < y.outerSize(); ++k)
        for (SparseComplex::InnerIterator it(y, k); it; ++it) current[it.row()] += it.value() * vc[it.col()];

    // dS_i/dtheta_k = j V_i conj(Y_ik V_k) (k != i),  j V_i conj(I_i) - j V_i conj(Y_ii V_i) (k == i)
    // dS_i/dV_k     = V_i conj(Y_ik V_k / |V_k|)  (+ conj(I_i) V_i/|V_i| for k == i)
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(y.nonZeros()) * 4 + n * 4);
    const Complex j1(0.0, 1.0);
    auto emit = [&](std::size_t i, std::size_t k, Complex ds_dth, Complex ds_dv) {
        const int rp = layout.angle_row[i];
        const int rq = layout.mag_row[i];
        const int ca = layout.angle_row[k];
        const int cm = layout.mag_row[k];
        if (rp >= 0 && ca >= 0) trip.emplace_back(rp, ca, ds_dth.real());
        if (rp >= 0 && cm >= 0) trip.emplace_back(rp, cm, ds_dv.real());
        if (rq >= 0 && ca >= 0) trip.emplace_back(rq, ca, ds_dth.imag());
        if (rq >= 0 && cm >= 0) trip.emplace_back(rq, cm, ds_dv.imag());
    };
    for (int k = 0; k < y.outerSize(); ++k) {
        for (SparseComplex::InnerIterator it(y, k); it; ++it) {
            const auto i = static_cast<std::size_t>(it.row());
            const auto kk = static_cast<std::size_t>(it.col());
            const Complex yv = it.value() * vc[kk];
            const Complex ds_dth = -j1 * vc[i] * std::conj(yv);
            const Complex ds_dv = vc[i] * std::conj(yv / v[kk]);
            emit(i, kk, ds_dth, ds_dv);
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (layout.angle_row[i] < 0 && layout.mag_row[i] < 0) continue;
        const Complex ds_dth = j1 * vc[i] * std::conj(current[i]);
        const Complex ds_dv = std::conj(current[i]) * vc[i] / v[i];
        emit(i, i, ds_dth, ds_dv);
    }
    return trip;
}

} // namespace

Admittance build_admittance(const Case& c, std::span<const int> circuits)
{
    if (circuits.size() != c.corridors().size()) throw CaseError("circuit vector does not match corridors");
    const auto n = static_cast<Eigen::Index>(c.buses().size());
    std::vector<Eigen::Triplet<Complex>> trip;
    for (std::size_t l = 0; l < c.corridors().size(); ++l) {
        if (circuits[l] < 0) throw CaseError("negative circuit count");
        if (circuits[l] == 0) continue;
        const Corridor& cor = c.corridors()[l];
        const double m = circuits[l];
        const Complex ys = m / Complex(cor.r, cor.x);
        const Complex ysh(0.0, m * cor.b_shunt / 2.0);
        const auto [i, j] = c.ends(l);
        const auto ii = static_cast<Eigen::Index>(i);
        const auto jj = static_cast<Eigen::Index>(j);
        trip.emplace_back(ii, ii, ys + ysh);
        trip.emplace_back(jj, jj, ys + ysh);
        trip.emplace_back(ii, jj, -ys);
        trip.emplace_back(jj, ii, -ys);
    }
    Admittance adm;
    adm.y.resize(n, n);
    adm.y.setFromTriplets(trip.begin(), trip.end());
    adm.y.makeCompressed();
    adm.circuits.assign(circuits.begin(), circuits.end());
    adm.energized = energized_buses(c, circuits);
    return adm;
}

Admittance build_admittance(const Case& c, const ExpansionPlan& plan, std::optional<std::size_t> outage)
{
    const std::vector<int> circuits = circuits_in_service(c, plan, outage);
    return build_admittance(c, circuits);
}

Controls default_controls(const Case& c, const ExpansionPlan& plan)
{
    Controls ctl;
    for (const Generator& g : c.generators()) ctl.p_gen.push_back(g.p_dispatch);
    for (const Bus& b : c.buses()) ctl.v_set.push_back(b.v_setpoint);
    ctl.q_inject.assign(c.buses().size(), 0.0);
    for (std::size_t k = 0; k < c.reactive().size(); ++k)
        ctl.q_inject[c.bus_index(c.reactive()[k].bus)] += plan.reactive.at(k);
    return ctl;
}

namespace detail {

Layout make_layout(const Admittance& adm, const Case& c)
{
    Layout layout;
    const std::size_t n = c.buses().size();
    layout.angle_row.assign(n, -1);
    layout.mag_row.assign(n, -1);
    int row = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (adm.energized[i] && i != c.slack_index()) layout.angle_row[i] = row++;
    for (std::size_t i = 0; i < n; ++i)
        if (adm.energized[i] && c.buses()[i].kind == BusKind::PQ) layout.mag_row[i] = row++;
    layout.size = row;
    return layout;
}

Eigen::VectorXd mismatch(const Admittance& adm, const Case& c, const Controls& controls, const Layout& layout,
                         std::span<const double> v, std::span<const double> theta)
{
    return residual(layout, specified(c, controls), injections(adm.y, phasors(v, theta)));
}

Eigen::MatrixXd jacobian(const Admittance& adm, const Layout& layout, std::span<const double> v,
                         std::span<const double> theta)
{
    const auto trip = jacobian_triplets(adm.y, layout, phasors(v, theta), v);
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(layout.size, layout.size);
    for (const auto& t : trip) j(t.row(), t.col()) += t.value();
    return j;
}

} // namespace detail

PFSolution solve_ac(const Admittance& adm, const Case& c, const Controls& controls, const AcOptions& opts)
{
    const std::size_t n = c.buses().size();
    if (controls.p_gen.size() != c.generators().size() || controls.v_set.size() != n || controls.q_inject.size() != n)
        throw CaseError("controls do not match the case dimensions");
    if (adm.energized.size() != n) throw CaseError("admittance does not match the case");

    PFSolution pf;
    pf.v.assign(n, 1.0);
    pf.theta.assign(n, 0.0);
    if (opts.start != nullptr && opts.start->v.size() == n) {
        pf.v = opts.start->v;
        pf.theta = opts.start->theta;
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!adm.energized[i]) {
            pf.v[i] = 1.0;
            pf.theta[i] = 0.0;
        } else if (c.buses()[i].kind != BusKind::PQ) {
            pf.v[i] = controls.v_set[i];
        }
    }
    pf.theta[c.slack_index()] = 0.0;

    const detail::Layout layout = detail::make_layout(adm, c);
    const Specified spec = specified(c, controls);

    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    bool analysed = false;
    std::vector<Complex> vc = phasors(pf.v, pf.theta);
    Eigen::VectorXd f = residual(layout, spec, injections(adm.y, vc));
    auto norm = [](const Eigen::VectorXd& x) { return x.size() == 0 ? 0.0 : x.cwiseAbs().maxCoeff(); };

    bool ok = std::isfinite(norm(f));
    struct Iterate {
        std::vector<double> v, theta;
        Eigen::VectorXd f;
    };
    Iterate best{pf.v, pf.theta, f};
    while (ok && norm(f) >= opts.tolerance && pf.iterations < opts.max_iterations) {
        const auto trip = jacobian_triplets(adm.y, layout, vc, pf.v);
        Eigen::SparseMatrix<double> jac(layout.size, layout.size);
        jac.setFromTriplets(trip.begin(), trip.end());
        jac.makeCompressed();
        if (!analysed) {
            lu.analyzePattern(jac);
            analysed = true;
        }
        lu.factorize(jac);
        if (lu.info() != Eigen::Success) {
            ok = false;
            break;
        }
        const Eigen::VectorXd dx = lu.solve(f);
        for (std::size_t i = 0; i < n; ++i) {
            if (layout.angle_row[i] >= 0) pf.theta[i] += dx[layout.angle_row[i]];
            if (layout.mag_row[i] >= 0) pf.v[i] += dx[layout.mag_row[i]];
        }
        ++pf.iterations;
        vc = phasors(pf.v, pf.theta);
        f = residual(layout, spec, injections(adm.y, vc));
        const double fn = norm(f);
        if (!std::isfinite(fn)) ok = false;
        for (std::size_t i = 0; i < n && ok; ++i)
            if (!(pf.v[i] > 1e-3 && pf.v[i] < 10.0)) ok = false;
        if (ok && f.squaredNorm() < best.f.squaredNorm()) best = {pf.v, pf.theta, f};
    }
    if (!(ok && norm(f) < opts.tolerance) && std::isfinite(norm(best.f))) {
        // report the closest iterate of a failed solve
        pf.v = best.v;
        pf.theta = best.theta;
        f = best.f;
        vc = phasors(pf.v, pf.theta);
        ok = false;
    }

    pf.max_mismatch = norm(f);
    pf.mismatch_sq = std::isfinite(pf.max_mismatch) ? f.squaredNorm() : std::numeric_limits<double>::infinity();
    pf.converged = ok && pf.max_mismatch < opts.tolerance;

    const std::vector<Complex> s = injections(adm.y, vc);
    pf.p_gen = controls.p_gen;
    pf.q_gen.assign(c.generators().size(), 0.0);
    for (std::size_t g = 0; g < c.generators().size(); ++g) {
        const std::size_t b = c.generator_bus(g);
        if (b == c.slack_index()) pf.p_gen[g] = s[b].real() + c.buses()[b].p_demand;
        pf.q_gen[g] = s[b].imag() + c.buses()[b].q_demand - controls.q_inject[b];
    }
    const CorridorFlows flows = corridor_flows(pf, c, adm.circuits);
    pf.s_from = flows.s_from;
    pf.s_to = flows.s_to;
    return pf;
}

double l_index(const PFSolution& pf, const Admittance& adm, const Case& c)
{
    std::vector<int> load_pos(c.buses().size(), -1);
    std::vector<int> gen_pos(c.buses().size(), -1);
    int nl = 0, ng = 0;
    for (std::size_t i = 0; i < c.buses().size(); ++i) {
        if (!adm.energized[i]) continue;
        if (c.buses()[i].kind == BusKind::PQ)
            load_pos[i] = nl++;
        else
            gen_pos[i] = ng++;
    }
    if (nl == 0) return 0.0;

    std::vector<Eigen::Triplet<Complex>> ll;
    Eigen::MatrixXcd lg = Eigen::MatrixXcd::Zero(nl, ng);
    for (int k = 0; k < adm.y.outerSize(); ++k) {
        for (SparseComplex::InnerIterator it(adm.y, k); it; ++it) {
            const int r = load_pos[it.row()];
            if (r < 0) continue;
            if (load_pos[it.col()] >= 0)
                ll.emplace_back(r, load_pos[it.col()], it.value());
            else if (gen_pos[it.col()] >= 0)
                lg(r, gen_pos[it.col()]) += it.value();
        }
    }
    SparseComplex yll(nl, nl);
    yll.setFromTriplets(ll.begin(), ll.end());
    yll.makeCompressed();
    Eigen::SparseLU<SparseComplex> lu;
    lu.compute(yll);
    if (lu.info() != Eigen::Success) throw NumericalError("singular load block in L-index");
    const Eigen::MatrixXcd f = -lu.solve(lg);
    if (!f.allFinite()) throw NumericalError("singular load block in L-index");

    Eigen::VectorXcd vg(ng);
    for (std::size_t i = 0; i < c.buses().size(); ++i)
        if (gen_pos[i] >= 0) vg[gen_pos[i]] = std::polar(pf.v[i], pf.theta[i]);
    const Eigen::VectorXcd fv = f * vg;

    double lmax = 0.0;
    for (std::size_t i = 0; i < c.buses().size(); ++i) {
        if (load_pos[i] < 0) continue;
        const Complex vj = std::polar(pf.v[i], pf.theta[i]);
        lmax = std::max(lmax, std::abs(1.0 - fv[load_pos[i]] / vj));
    }
    return lmax;
}

CorridorFlows corridor_flows(const PFSolution& pf, const Case& c, std::span<const int> circuits)
{
    CorridorFlows out;
    out.s_from.assign(c.corridors().size(), 0.0);
    out.s_to.assign(c.corridors().size(), 0.0);
    for (std::size_t l = 0; l < c.corridors().size(); ++l) {
        if (circuits[l] <= 0) continue;
        const Corridor& cor = c.corridors()[l];
        const auto [i, j] = c.ends(l);
        const Complex vi = std::polar(pf.v[i], pf.theta[i]);
        const Complex vj = std::polar(pf.v[j], pf.theta[j]);
        const Complex ys = 1.0 / Complex(cor.r, cor.x);
        const Complex ysh(0.0, cor.b_shunt / 2.0);
        const double m = circuits[l];
        const Complex i_from = m * (ys * (vi - vj) + ysh * vi);
        const Complex i_to = m * (ys * (vj - vi) + ysh * vj);
        out.s_from[l] = std::abs(vi * std::conj(i_from));
        out.s_to[l] = std::abs(vj * std::conj(i_to));
    }
    return out;
}

} // namespace tnep
