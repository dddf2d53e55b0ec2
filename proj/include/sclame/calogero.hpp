#pragma once

// Non-autonomous elliptic Calogero-Moser dynamics in the modular parameter:
//   2 pi i du/dtau = v,   2 pi i dv/dtau = m^2 wp'(2u | tau),
//   H(tau) = v^2 - m^2 wp(2u | tau),
// with tau -> i*inf seeding from the monodromy data, zero-crossing detection
// and the local square-root expansion, and the action / Hamilton-Jacobi
// residual checks.

#include "sclame/elliptic.hpp"
#include "sclame/numerics.hpp"

#include <optional>
#include <vector>

namespace sclame {

class CalogeroError : public NumericsError {
public:
    using NumericsError::NumericsError;
};

struct MonodromySeed {
    cplx a;          // A-cycle exponent, a not in Z/2
    cplx b;          // B-cycle position parameter
    double m = 1.0;  // mass, m^2 = (2 - alpha0)^2
    double nu = 0.0;

    void validate() const;
};

// b from (a, m, nu) through the B-cycle monodromy relation
//   e^{2 pi i b} = e^{i nu/2} Gamma(2a-m) Gamma(1-2a) / (Gamma(2a) Gamma(1-m-2a)),
// principal logarithm.
cplx monodromy_b(cplx a, double m, double nu);

struct CMState {
    cplx u, v;
};

// Equations-of-motion right-hand side at (tau, u, v).
CMState eom_rhs(cplx tau, const CMState& state, double m);

// Two-term tau -> i*inf expansion
//   u = a tau + b + m^2/(8 pi i a^2) e^{4 pi i (a tau + b)},  v = 2 pi i u'.
// Refuses when the dropped corrections exceed 1e-10.
CMState seed_at_infinity(const MonodromySeed& seed, cplx tau0);

cplx cm_hamiltonian(cplx tau, const CMState& state, double m);

struct CMSample {
    cplx tau, u, v, H;
};

struct ZeroEvent {
    double s = 0.0;              // path parameter of closest approach
    cplx tau;                    // path point there
    cplx u_reduced;              // u minus the nearest lattice point
    cplx lattice_point;
};

struct CMTrajectory {
    std::vector<CMSample> samples;
    std::vector<ZeroEvent> events;
    OdeTrajectory ode;           // dense machinery
    double m = 0.0;
    bool truncated = false;      // stopped at a singular encounter
    cplx truncation_tau;

    CMState state_at(double s) const;
    cplx tau_at(double s) const { return ode.path_point(s); }
};

struct CMIntegrateSpec {
    double rel_tol = 1e-11;
    double abs_tol = 1e-12;
    long max_steps = 2000000;
    int n_samples = 400;              // uniformly spaced output samples
    double stop_distance = 0.0;       // stop when |u - lattice| drops below (0: off)
};

// Integrates from tau0 along the polygonal path (vertical by default).
CMTrajectory integrate_cm(const MonodromySeed& seed, cplx tau0, cplx tau1,
                          const CMIntegrateSpec& spec,
                          const std::vector<cplx>& waypoints = {});

// Max residual of the Lagrangian action identity and the Hamilton-Jacobi
// z-derivative relation d(phi)/dz = v, probed with a twin trajectory offset
// by db in the b parameter.  window = [s_lo, s_hi] in path parameter.
struct HJResidual {
    double flow_residual = 0.0;    // d(phi)/dtau vs (v^2 + m^2 wp(2u))/(2 pi i)
    double z_residual = 0.0;       // family finite-difference d(phi)/dz vs v
    bool fd_valid = true;
};
HJResidual action_hj_residual(const MonodromySeed& seed, cplx tau0, cplx tau1,
                              const CMIntegrateSpec& spec, double s_lo, double s_hi,
                              cplx db = cplx{1e-5, 0.0});

struct ZeroFit {
    cplx tau_star;
    cplx c1, c2;
    cplx H_star;                  // +/- (c2/c1) * 4 pi i m, branch-resolved
    int branch = 0;               // +1 for e^{-i pi/4}, -1 for e^{+i pi/4}
    double fit_residual = 0.0;
    cplx H_trajectory;            // H extrapolated to tau_star along the path
    bool h_matches_shifted = false;   // H_star matches H + 2 m^2 eta1 better
    double h_rel_diff = 0.0;          // best relative H difference
};

// Fits u ~ c1 (tau - tau*)^{1/2} (1 + (c2/c1)(tau - tau*)) around a detected
// approach event, via a cubic fit of u^2 in tau.
ZeroFit zero_expansion_fit(const CMTrajectory& traj, const ZeroEvent& event,
                           double window = 0.02);

// Runs a trajectory towards a zero of u and reports H(tau*) next to
// 4 * accessory(q*), q* = e^{i pi tau*}; exploratory, no pass/fail.
struct AccessoryHamiltonianReport {
    cplx tau_star;
    cplx q_star;
    cplx H_star;
    cplx four_accessory;
    cplx difference;
};

AccessoryHamiltonianReport accessory_hamiltonian_compare(double alpha0, double P0,
                                                         const MonodromySeed& seed,
                                                         cplx tau0,
                                                         const CMIntegrateSpec& spec);

// CSV wire format: header row, 17 significant digits, columns
// re_tau, im_tau, re_u, im_u, re_v, im_v, re_H, im_H.
std::string trajectory_csv(const CMTrajectory& traj);

} // namespace sclame
