#include "sclame/calogero.hpp"

#include "sclame/gammae.hpp"
#include "sclame/lame.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace sclame {

namespace {

constexpr double kPi = 3.14159265358979323846;
const cplx kI{0.0, 1.0};
const cplx kTwoPiI{0.0, 2.0 * kPi};

cplx reduce_mod_lattice(cplx u, cplx tau, cplx* lattice_point = nullptr)
{
    const long m = std::lround(u.imag() / tau.imag());
    cplx r = u - static_cast<double>(m) * tau;
    const long n = std::lround(r.real());
    r -= static_cast<double>(n);
    // check the 8 neighbours for the actual nearest lattice translate
    cplx best = r;
    cplx shift{0.0, 0.0};
    for (int dn = -1; dn <= 1; ++dn)
        for (int dm = -1; dm <= 1; ++dm) {
            const cplx cand = r - static_cast<double>(dn) - static_cast<double>(dm) * tau;
            if (std::abs(cand) < std::abs(best)) {
                best = cand;
                shift = static_cast<double>(dn) + static_cast<double>(dm) * tau;
            }
        }
    if (lattice_point) *lattice_point = u - best;
    return best;
}

} // namespace

void MonodromySeed::validate() const
{
    const double twice = 2.0 * a.real();
    if (std::abs(a.imag()) < 1e-12 &&
        std::abs(twice - std::round(twice)) < 1e-9)
        throw CalogeroError("resonant A-cycle exponent: a in Z/2");
    if (!(m >= 0.0)) throw CalogeroError("mass must be non-negative");
}

cplx monodromy_b(cplx a, double m, double nu)
{
    const cplx rhs = std::exp(kI * nu / 2.0) *
                     std::exp(log_gamma(2.0 * a - m) + log_gamma(1.0 - 2.0 * a) -
                              log_gamma(2.0 * a) - log_gamma(1.0 - m - 2.0 * a));
    return std::log(rhs) / kTwoPiI;
}

CMState eom_rhs(cplx tau, const CMState& state, double m)
{
    CMState d;
    d.u = state.v / kTwoPiI;
    if (m == 0.0) {
        d.v = 0.0;
        return d;
    }
    const Torus t = Torus::from_tau(tau);
    const cplx two_u = reduce_mod_lattice(2.0 * state.u, tau);
    d.v = m * m * wp_prime(two_u, t) / kTwoPiI;
    return d;
}

CMState seed_at_infinity(const MonodromySeed& seed, cplx tau0)
{
    seed.validate();
    const cplx phase = std::exp(4.0 * kPi * kI * (seed.a * tau0 + seed.b));
    const cplx corr = seed.m * seed.m / (8.0 * kPi * kI * seed.a * seed.a) * phase;
    const double q_abs = std::exp(-kPi * tau0.imag());
    const double next_order = q_abs * std::abs(phase);
    if (seed.m != 0.0 && (std::abs(corr) > 1e-10 || next_order > 1e-10)) {
        std::ostringstream os;
        os << "seed_at_infinity: corrections " << std::abs(corr) << " / " << next_order
           << " exceed 1e-10; increase Im(tau0) beyond " << tau0.imag();
        throw CalogeroError(os.str());
    }
    CMState s;
    s.u = seed.a * tau0 + seed.b + corr;
    // v = 2 pi i du/dtau, du/dtau = a + 4 pi i a * corr
    s.v = kTwoPiI * (seed.a + 4.0 * kPi * kI * seed.a * corr);
    return s;
}

cplx cm_hamiltonian(cplx tau, const CMState& state, double m)
{
    cplx H = state.v * state.v;
    if (m != 0.0) {
        const Torus t = Torus::from_tau(tau);
        const cplx two_u = reduce_mod_lattice(2.0 * state.u, tau);
        H -= m * m * wp(two_u, t);
    }
    return H;
}

CMState CMTrajectory::state_at(double s) const
{
    const std::vector<cplx> y = ode.dense_eval(s);
    return CMState{y[0], y[1]};
}

CMTrajectory integrate_cm(const MonodromySeed& seed, cplx tau0, cplx tau1,
                          const CMIntegrateSpec& spec,
                          const std::vector<cplx>& waypoints)
{
    seed.validate();
    const CMState init = seed_at_infinity(seed, tau0);

    OdeSpec os;
    os.t0 = tau0;
    os.t1 = tau1;
    os.waypoints = waypoints;
    os.y0 = {init.u, init.v};
    os.rel_tol = spec.rel_tol;
    os.abs_tol = spec.abs_tol;
    os.max_steps = spec.max_steps;
    os.dense_output = true;
    os.stop_on_underflow = true;
    if (spec.stop_distance > 0.0) {
        const double d = spec.stop_distance;
        os.stop_condition = [d](const cplx& tau, const std::vector<cplx>& y) {
            return std::abs(reduce_mod_lattice(y[0], tau)) < d;
        };
    }

    const double m = seed.m;
    CMTrajectory traj;
    traj.m = m;
    traj.ode = integrate_ode(
        [m](const cplx& tau, const std::vector<cplx>& y, std::vector<cplx>& dydt) {
            const CMState d = eom_rhs(tau, CMState{y[0], y[1]}, m);
            dydt[0] = d.u;
            dydt[1] = d.v;
        },
        os);
    traj.truncated = traj.ode.underflow;
    if (traj.ode.stopped_early) traj.truncation_tau = traj.ode.stop_location;

    // uniform output samples over the covered span
    const double s_max = traj.ode.steps.empty() ? 0.0 : traj.ode.steps.back().s1;
    const int n = std::max(2, spec.n_samples);
    for (int i = 0; i < n; ++i) {
        const double s = s_max * i / (n - 1);
        const std::vector<cplx> y = traj.ode.dense_eval(s);
        CMSample sample;
        sample.tau = traj.ode.path_point(s);
        sample.u = y[0];
        sample.v = y[1];
        sample.H = cm_hamiltonian(sample.tau, CMState{y[0], y[1]}, m);
        traj.samples.push_back(sample);
    }

    // zero-approach events: local minima of |u mod lattice| on a fine grid
    const int fine = 8 * n;
    std::vector<double> dist(fine);
    for (int i = 0; i < fine; ++i) {
        const double s = s_max * i / (fine - 1);
        const std::vector<cplx> y = traj.ode.dense_eval(s);
        dist[i] = std::abs(reduce_mod_lattice(y[0], traj.ode.path_point(s)));
    }
    const double threshold = 0.3;
    for (int i = 1; i + 1 < fine; ++i) {
        if (dist[i] < threshold && dist[i] <= dist[i - 1] && dist[i] <= dist[i + 1]) {
            // golden-section refine the minimum to ~1e-10 in s
            double lo = s_max * (i - 1) / (fine - 1);
            double hi = s_max * (i + 1) / (fine - 1);
            auto f = [&](double s) {
                return std::abs(reduce_mod_lattice(traj.ode.dense_eval(s)[0],
                                                   traj.ode.path_point(s)));
            };
            const double gr = 0.618033988749895;
            double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
            double f1 = f(x1), f2 = f(x2);
            for (int it = 0; it < 80 && hi - lo > 1e-12; ++it) {
                if (f1 < f2) { hi = x2; x2 = x1; f2 = f1; x1 = hi - gr * (hi - lo); f1 = f(x1); }
                else { lo = x1; x1 = x2; f1 = f2; x2 = lo + gr * (hi - lo); f2 = f(x2); }
            }
            ZeroEvent ev;
            ev.s = 0.5 * (lo + hi);
            ev.tau = traj.ode.path_point(ev.s);
            ev.u_reduced = reduce_mod_lattice(traj.ode.dense_eval(ev.s)[0], ev.tau,
                                              &ev.lattice_point);
            traj.events.push_back(ev);
        }
    }
    // truncation by the stop condition also marks an event at the end
    if (traj.ode.stopped_early && !traj.ode.steps.empty()) {
        ZeroEvent ev;
        ev.s = s_max;
        ev.tau = traj.ode.path_point(s_max);
        ev.u_reduced = reduce_mod_lattice(traj.ode.dense_eval(s_max)[0], ev.tau,
                                          &ev.lattice_point);
        if (traj.events.empty() ||
            std::abs(traj.events.back().s - s_max) > 1e-6)
            traj.events.push_back(ev);
    }
    return traj;
}

// ------------------------------------------------------------ action residual

namespace {

// cumulative action phi(s) = int_0^s (v^2 + m^2 wp(2u)) dtau/(2 pi i) on a
// uniform grid, composite Simpson
std::vector<cplx> action_cumulative(const CMTrajectory& traj,
                                    const std::vector<double>& grid)
{
    const double m = traj.m;
    auto lagrangian = [&](double s) {
        const CMState st = traj.state_at(s);
        const cplx tau = traj.tau_at(s);
        cplx L = st.v * st.v;
        if (m != 0.0) {
            const Torus t = Torus::from_tau(tau);
            L += m * m * wp(reduce_mod_lattice(2.0 * st.u, tau), t);
        }
        return L;
    };
    // dtau/ds is piecewise constant along the polygon; for the default single
    // segment it is (t1 - t0)
    const cplx dtau_ds = (traj.ode.path_nodes.back() - traj.ode.path_nodes.front()) /
                         1.0;   // path parameter spans [0,1] over the whole polygon

    std::vector<cplx> phi(grid.size(), cplx{0.0, 0.0});
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double a = grid[i - 1], b = grid[i];
        const cplx fa = lagrangian(a), fm = lagrangian(0.5 * (a + b)), fb = lagrangian(b);
        phi[i] = phi[i - 1] +
                 (b - a) / 6.0 * (fa + 4.0 * fm + fb) * dtau_ds / kTwoPiI;
    }
    return phi;
}

} // namespace

HJResidual action_hj_residual(const MonodromySeed& seed, cplx tau0, cplx tau1,
                              const CMIntegrateSpec& spec, double s_lo, double s_hi,
                              cplx db)
{
    MonodromySeed twin = seed;
    twin.b += db;
    const CMTrajectory a = integrate_cm(seed, tau0, tau1, spec);
    const CMTrajectory b = integrate_cm(twin, tau0, tau1, spec);

    const int n = 200;
    std::vector<double> grid(n);
    const double cover = std::min(a.ode.steps.back().s1, b.ode.steps.back().s1);
    const double lo = std::max(0.0, s_lo) * cover;
    const double hi = std::min(1.0, s_hi) * cover;
    for (int i = 0; i < n; ++i) grid[i] = lo + (hi - lo) * i / (n - 1);

    const std::vector<cplx> phi_a = action_cumulative(a, grid);
    const std::vector<cplx> phi_b = action_cumulative(b, grid);

    HJResidual out;
    const cplx dtau_ds = a.ode.path_nodes.back() - a.ode.path_nodes.front();
    for (int i = 1; i + 1 < n; ++i) {
        const double ds = grid[i + 1] - grid[i - 1];
        // flow derivative vs Lagrangian at the midpoint sample
        const cplx dphi = (phi_a[i + 1] - phi_a[i - 1]) / (ds * dtau_ds);
        const CMState st = a.state_at(grid[i]);
        const cplx tau = a.tau_at(grid[i]);
        cplx L = st.v * st.v;
        if (a.m != 0.0)
            L += a.m * a.m * wp(reduce_mod_lattice(2.0 * st.u, tau), Torus::from_tau(tau));
        out.flow_residual = std::max(out.flow_residual,
                                     std::abs(dphi - L / kTwoPiI) / (1.0 + std::abs(L)));

        // family finite difference: d phi / dz = v at the moving point
        const CMState stb = b.state_at(grid[i]);
        const cplx dz = 2.0 * (stb.u - st.u);
        if (std::abs(dz) < 1e-12 || std::abs(dz) > 1e3 * std::abs(db)) {
            out.fd_valid = false;
            continue;
        }
        const cplx vbar = 0.5 * (st.v + stb.v);
        const cplx fd = (phi_b[i] - phi_a[i]) / dz;
        out.z_residual = std::max(out.z_residual,
                                  std::abs(fd - vbar) / (1.0 + std::abs(vbar)));
    }
    return out;
}

// ------------------------------------------------------------------- zero fit

ZeroFit zero_expansion_fit(const CMTrajectory& traj, const ZeroEvent& event,
                           double window)
{
    // samples with tau within the window of the event, u lattice-reduced
    std::vector<std::pair<cplx, cplx>> usq;   // (tau - tau_c, u_reduced^2)
    std::vector<std::pair<cplx, cplx>> hval;  // (tau - tau_c, H)
    const cplx tau_c = event.tau;
    const double s_max = traj.ode.steps.back().s1;
    const int n = 400;
    for (int i = 0; i < n; ++i) {
        const double s = s_max * i / (n - 1);
        const cplx tau = traj.tau_at(s);
        if (std::abs(tau - tau_c) > window) continue;
        const CMState st = traj.state_at(s);
        const cplx ur = reduce_mod_lattice(st.u, tau);
        if (std::abs(ur) > 0.45) continue;
        usq.emplace_back(tau - tau_c, ur * ur);
        hval.emplace_back(tau - tau_c, cm_hamiltonian(tau, st, traj.m));
    }
    if (usq.size() < 8)
        throw CalogeroError("zero_expansion_fit: too few dense samples near the event; "
                            "integrate with a finer stop_distance or larger window");

    const std::vector<cplx> P = fit_polynomial(usq, 3);

    // root of P near 0 by Newton
    cplx ts = 0.0;
    for (int it = 0; it < 60; ++it) {
        const cplx p = eval_polynomial(P, ts);
        const cplx dp = P[1] + ts * (2.0 * P[2] + ts * 3.0 * P[3]);
        const cplx step = p / dp;
        ts -= step;
        if (std::abs(step) < 1e-15 * (1.0 + std::abs(ts))) break;
    }

    ZeroFit fit;
    fit.tau_star = tau_c + ts;
    const cplx dP = P[1] + ts * (2.0 * P[2] + ts * 3.0 * P[3]);
    const cplx ddP = 2.0 * P[2] + 6.0 * P[3] * ts;
    // +/- c1 is a gauge (paired with the sqrt branch); normalize Re c1 > 0 so
    // the phase lands on one of e^{-+ i pi/4}
    cplx c1 = std::sqrt(dP);
    if (c1.real() < 0.0) c1 = -c1;
    fit.c1 = c1;
    const cplx r = ddP / (4.0 * dP);   // c2/c1
    fit.c2 = r * c1;
    fit.branch = (std::arg(c1) < 0.0) ? +1 : -1;   // e^{-i pi/4} <-> +1
    const double sgn = (fit.branch == +1) ? +1.0 : -1.0;
    fit.H_star = sgn * r * 4.0 * kPi * kI * traj.m;

    // fit residual: compare |u| against the two-term form on the samples
    double res = 0.0;
    for (const auto& [dt, u2] : usq) {
        const cplx delta = dt - ts;
        const cplx pred = dP * delta * (1.0 + 2.0 * r * delta);
        res = std::max(res, std::abs(u2 - pred) / (std::abs(u2) + 1e-30));
    }
    fit.fit_residual = res;

    // trajectory H extrapolated to tau_star (quadratic fit in tau - tau_star)
    std::vector<std::pair<cplx, cplx>> hshift;
    for (const auto& [dt, H] : hval) hshift.emplace_back(dt - ts, H);
    const std::vector<cplx> HP = fit_polynomial(hshift, std::min<int>(2, (int)hshift.size() - 1));
    fit.H_trajectory = HP[0];

    // which printed normalization matches: H_star vs H_star + 2 m^2 eta1
    const Torus t_star = Torus::from_tau(fit.tau_star);
    const cplx shift = 2.0 * traj.m * traj.m * weierstrass_eta1(t_star);
    const double d_plain = std::abs(fit.H_star - fit.H_trajectory);
    const double d_shift = std::abs(fit.H_star - shift - fit.H_trajectory);
    fit.h_matches_shifted = d_shift < d_plain;
    fit.h_rel_diff = std::min(d_plain, d_shift) / (1.0 + std::abs(fit.H_trajectory));
    return fit;
}

AccessoryHamiltonianReport accessory_hamiltonian_compare(double alpha0, double P0,
                                                         const MonodromySeed& seed,
                                                         cplx tau0,
                                                         const CMIntegrateSpec& spec)
{
    CMIntegrateSpec sp = spec;
    if (sp.stop_distance <= 0.0) sp.stop_distance = 0.01;
    const cplx tau1{tau0.real(), 0.05};
    const CMTrajectory traj = integrate_cm(seed, tau0, tau1, sp);
    if (traj.events.empty())
        throw CalogeroError("no zero crossing found along the path");
    const ZeroFit fit = zero_expansion_fit(traj, traj.events.back());

    AccessoryHamiltonianReport rep;
    rep.tau_star = fit.tau_star;
    rep.q_star = std::exp(kI * kPi * fit.tau_star);
    rep.H_star = fit.H_trajectory;

    const Torus torus = Torus::from_tau(fit.tau_star);
    LameParams params;
    params.alpha0 = alpha0;
    params.P0 = P0;
    QuadratureSpec qs;
    qs.abs_tol = qs.rel_tol = 1e-11;
    const AccessoryReport acc = accessory_report(params, torus, qs);
    rep.four_accessory = 4.0 * acc.accessory;
    rep.difference = rep.H_star - rep.four_accessory;
    return rep;
}

std::string trajectory_csv(const CMTrajectory& traj)
{
    std::string out = "re_tau,im_tau,re_u,im_u,re_v,im_v,re_H,im_H\n";
    char buf[64];
    auto put = [&](double v, char sep) {
        std::snprintf(buf, sizeof(buf), "%.17g%c", v, sep);
        out += buf;
    };
    for (const CMSample& s : traj.samples) {
        put(s.tau.real(), ','); put(s.tau.imag(), ',');
        put(s.u.real(), ','); put(s.u.imag(), ',');
        put(s.v.real(), ','); put(s.v.imag(), ',');
        put(s.H.real(), ','); put(s.H.imag(), '\n');
    }
    return out;
}

} // namespace sclame
