#pragma once

// Algebraic (Heun) form of the Lame equation on singular points {0, 1, T, inf},
//   X(X-1)(X-T) y'' + (3X^2 - 2(T+1)X + T) y' + (A B X - Lambda) y = 0,
// its Floquet series y = sum_n c_n X^{n+w}, the three-term recurrence
//   A_n c_{n-1} - B_n c_n + T C_n c_{n+1} = 0,
//   A_n = (n+w-1)(n+w+1) + AB,  B_n = (n+w+1)(n+w)(T+1) + Lambda,
//   C_n = (n+w+1)^2,
// continued-fraction tails, the n = 0 matching condition, a dense tridiagonal
// eigenvalue oracle, and the q-series of Lambda.

#include "sclame/elliptic.hpp"
#include "sclame/lame.hpp"
#include "sclame/numerics.hpp"

#include <vector>

namespace sclame {

class FloquetError : public NumericsError {
public:
    using NumericsError::NumericsError;
};

struct HeunSpectralProblem {
    cplx A, B;          // exponent parameters, A = -alpha0/4, B = 1 + alpha0/4
    cplx T;             // cross ratio (e3-e1)/(e2-e1)
    cplx e1, e2, e3;    // the half-period roots behind the map
    cplx w{0.0, 0.0};   // Floquet exponent
    int N = 64;         // initial tail truncation
    double tolerance = 1e-12;

    cplx zeta_to_x(cplx zeta) const { return (zeta - e1) / (e2 - e1); }
    cplx x_to_zeta(cplx x) const { return e1 + (e2 - e1) * x; }
};

struct RecurrenceCoeffs {
    cplx a, b, c;   // A_n, B_n, C_n
};

RecurrenceCoeffs recurrence_coeffs(const HeunSpectralProblem& p, cplx lambda, long n);

// Heun data from the Lame parameters.  The half periods are assigned with the
// SmallT labeling (e1 at tau/2, e2 at 1/2, e3 at (1+tau)/2), for which
// T = theta2(0)^4/theta3(0)^4 -> 0 as q -> 0.
HeunSpectralProblem build_heun(const LameParams& params, const Torus& torus);

// Lambda of the algebraic form from the Lame accessory parameter, by direct
// substitution zeta = e1 + (e2-e1) X:  Lambda = -(acc + A*B*e1)/(e2 - e1).
cplx lambda_from_lame_accessory(cplx acc, const HeunSpectralProblem& p);

enum class TailDirection { Plus, Minus };

struct TailResult {
    cplx value;                  // u0 (Plus) or v0 (Minus)
    int truncation = 0;          // N at which the Cauchy criterion was met
    std::vector<cplx> ratios;    // u_n for n = 0..N-1, or v_n likewise
};

TailResult cf_tail(const HeunSpectralProblem& p, TailDirection dir, cplx lambda);

// F(Lambda) = B_0 - T C_0 u0 - T A_0 v0; zero iff the two one-sided minimal
// solutions join into a solution of the full recurrence.
cplx matching(const HeunSpectralProblem& p, cplx lambda);

struct FloquetSolution {
    cplx w;
    cplx lambda;
    int N = 0;                       // coefficients run over n in [-N, N]
    std::vector<cplx> coeff;         // coeff[n + N], c_0 = 1
    double matching_residual = 0.0;
    bool resonant = false;           // w required the epsilon shift

    cplx c(long n) const { return coeff[static_cast<std::size_t>(n + N)]; }
    cplx series_eval(cplx x) const;  // sum c_n x^{n+w}
};

FloquetSolution solve_lambda(const HeunSpectralProblem& p, cplx lambda_guess);
FloquetSolution solve_w(const HeunSpectralProblem& p, cplx lambda, cplx w_guess);

// Eigenvalues of the (2N+1)x(2N+1) tridiagonal matrix with diagonal
// -(n+w+1)(n+w)(T+1), subdiagonal A_n, superdiagonal T C_n; these are the
// Lambda values for which the truncated recurrence has a solution.
std::vector<cplx> tridiag_oracle(const HeunSpectralProblem& p, int N);

struct OdeResidual {
    double max_normalized = 0.0;     // over 16 points on |X| = r
    double mode0_normalized = 0.0;   // X^w Fourier mode of the residual
    double radius = 0.0;
};

// Evaluates the full operator on the reconstructed series at 16 points of
// |X| = r.  The two-sided series converges on the annulus |T| < |X| < 1;
// radii outside it are rejected (coefficient decay check).
OdeResidual ode_residual(const FloquetSolution& sol, const HeunSpectralProblem& p,
                         double r);

// A radius well inside the annulus of convergence.
double interior_radius(const HeunSpectralProblem& p);

struct QSeriesResult {
    std::vector<cplx> coeffs;        // Lambda_0 .. Lambda_deg
    double loo_spread = 0.0;         // max leave-one-out coefficient variation
    bool stable = false;
    std::vector<cplx> lambda_values; // Lambda(q) on the grid
};

QSeriesResult lambda_qseries(const LameParams& params, cplx w,
                             const std::vector<double>& q_grid, int degree);

} // namespace sclame
