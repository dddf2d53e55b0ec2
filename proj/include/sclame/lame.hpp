#pragma once

// The explicit semi-classical Lame solution
//   G(z) = e^{P0 z pi/2} exp( -(alpha0/4) * Ilog(z) / I0 ),
//   I0      = int_0^1 theta1(x)^{-alpha0/2} e^{pi P0 x} dx,
//   Ilog(z) = int_0^1 log(theta1(z+x)/theta1(z)) theta1(x)^{-alpha0/2} e^{pi P0 x} dx,
// its analytic log-derivatives, the accessory parameter
//   acc = -G''/G + (alpha0/4)(alpha0/4 - 1) wp(z)
// (z-independent), and the Lame-equation residual diagnostics.
//
// Branch rule: log(theta1(z+x)/theta1(z)) is the continuous continuation in x
// starting from 0 at x = 0.

#include "sclame/elliptic.hpp"
#include "sclame/numerics.hpp"

#include <vector>

namespace sclame {

class LameError : public NumericsError {
public:
    using NumericsError::NumericsError;
};

struct LameParams {
    double alpha0 = 0.0;
    double P0 = 0.0;

    void validate() const;   // alpha0 in (-4, 2), P0 finite
};

struct BaseIntegrals {
    cplx I0;        // weight normalization
    cplx Ilog;      // log-ratio integral at z
    cplx Ilog_d1;   // d/dz Ilog
    cplx Ilog_d2;   // d^2/dz^2 Ilog
};

// All four integrals at once (they share the weight and the quadrature).
BaseIntegrals base_integrals(cplx z, const LameParams& params, const Torus& torus,
                             const QuadratureSpec& spec);

cplx gamma_tilde(cplx z, const LameParams& params, const Torus& torus,
                 const QuadratureSpec& spec);

// d/dz log G and d^2/dz^2 G / G, assembled analytically from the integrals.
struct GammaTildeLogDerivatives {
    cplx log_d1;     // G'/G
    cplx d2_over;    // G''/G
};
GammaTildeLogDerivatives gamma_tilde_log_derivatives(cplx z, const LameParams& params,
                                                     const Torus& torus,
                                                     const QuadratureSpec& spec);

// Accessory parameter pi*i*d_tau(phi)/2 evaluated through the solution at one
// probe point; independent of z up to quadrature error.
cplx accessory_at(cplx z, const LameParams& params, const Torus& torus,
                  const QuadratureSpec& spec);

struct AccessoryReport {
    cplx accessory;                 // mean over probes
    std::vector<cplx> probes;
    double spread = 0.0;            // max pairwise deviation of per-probe values
    double residual = 0.0;          // max normalized Lame residual over probes
    bool valid = false;
    std::vector<cplx> per_probe;
};

// Probe points 0.17+0.23*tau, 0.31+0.11*tau, 0.42+0.37*tau, 0.13+0.41*tau,
// 0.29+0.19*tau.
std::vector<cplx> default_probes(const Torus& torus);

AccessoryReport accessory_report(const LameParams& params, const Torus& torus,
                                 const QuadratureSpec& spec,
                                 std::vector<cplx> probes = {},
                                 double spread_threshold = 1e-7);

// Coefficient of log q in phi(q): (6 P0^2 - alpha0 (alpha0 + 2)) / 12.
double phi_logq_coefficient(const LameParams& params);

} // namespace sclame
