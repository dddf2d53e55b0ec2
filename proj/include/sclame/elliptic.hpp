#pragma once

// Theta functions, Dedekind eta, the Weierstrass wp family and half-period
// roots on the lattice Z + tau*Z, nome convention q = exp(i*pi*tau).
//
// theta1 follows the sign convention
//   theta1(z) = -2 q^{1/4} sin(pi z) prod_k (1-q^{2k})(1 - 2cos(2pi z) q^{2k} + q^{4k}),
// so theta1'(0) = -2*pi*eta(q)^3.

#include "sclame/numerics.hpp"

#include <complex>

namespace sclame {

class EllipticError : public NumericsError {
public:
    using NumericsError::NumericsError;
};

struct Torus {
    cplx tau{0.0, 1.0};
    cplx q{0.0, 0.0};

    static Torus from_tau(cplx tau);
    static Torus from_q(cplx q);

    void validate() const;   // Im(tau) > 0, q = exp(i*pi*tau), |q| < 1
};

// Jacobi theta functions of argument z (periods 1, tau).  The defining
// products are truncated once the tail factor differs from 1 by < 1e-16.
cplx theta1(cplx z, const Torus& torus);
cplx theta2(cplx z, const Torus& torus);
cplx theta3(cplx z, const Torus& torus);

// theta1'(0) = -2*pi*eta(q)^3
cplx theta1_prime0(const Torus& torus);

// Dedekind eta, q^{1/12} prod (1-q^{2k})
cplx dedekind_eta(const Torus& torus);

// d^order/dz^order log theta1(z), order in 1..4.  z must stay away from
// the lattice Z + tau*Z (distance floor 1e-8 in reduced coordinates).
cplx theta1_log_derivative(cplx z, const Torus& torus, int order);

// Weierstrass quasi-period constant: eta1 = -(1/6) theta1'''(0)/theta1'(0),
// the unique constant for which wp = -d^2 log theta1 - 2*eta1 has a pure
// double pole 1/z^2 with no constant term.
cplx weierstrass_eta1(const Torus& torus);

cplx wp(cplx z, const Torus& torus);
cplx wp_prime(cplx z, const Torus& torus);

// Assignment of the half periods {1/2, (1+tau)/2, tau/2} to the labels
// (e1,e2,e3).  Standard is the documented default; SmallT is the permutation
// e1 = wp(tau/2), e2 = wp(1/2), e3 = wp((1+tau)/2), for which the Heun
// cross-ratio T = (e3-e1)/(e2-e1) -> 0 as q -> 0.
enum class RootLabeling { Standard, SmallT };

struct HalfPeriodRoots {
    cplx e1, e2, e3;
    cplx g2, g3;
};

HalfPeriodRoots half_period_roots(const Torus& torus,
                                  RootLabeling labeling = RootLabeling::Standard);

} // namespace sclame
