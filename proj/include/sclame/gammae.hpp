#pragma once

// Log-Gamma, double-Gamma ratios through the first-order shift relation
//   G_{chi}(z + chi) = sqrt(2 pi) chi^{chi z - 1/2} / Gamma(chi z) * G_{chi}(z),
// and the semi-classical quantities built from chains of such shifts.

#include "sclame/numerics.hpp"

#include <vector>

namespace sclame {

class GammaError : public NumericsError {
public:
    using NumericsError::NumericsError;
};

// Principal-branch log Gamma (Lanczos; reflection for Re z < 0.5), the
// analytic continuation that is real on the positive axis.  Relative
// accuracy ~1e-13 for |z| < 100.
cplx log_gamma(cplx z);

struct GammaRatioChain {
    cplx z{1.0, 0.0};   // base argument
    double chi = 0.5;   // shift, gamma/2 or 2/gamma
    int k = 0;          // number of shifts

    void validate() const;   // no Gamma pole along the chain
};

// log of  G_{chi}(z + k*chi) / G_{chi}(z), telescoping the shift relation.
cplx log_shift_ratio(const GammaRatioChain& chain);
cplx shift_ratio(const GammaRatioChain& chain);

// Semi-classical normalization limit B(P0, alpha0): the closed form with
// four finite-range log-Gamma integrals, evaluated verbatim.
cplx semiclassical_B(double alpha0, double P0, const QuadratureSpec& spec);

struct AsymptoteRow {
    double gamma = 0.0;
    cplx finite_side{0.0, 0.0};   // chain-sum value at this gamma
    cplx limit{0.0, 0.0};         // claimed gamma->0 limit
    double gap = 0.0;             // |finite - limit|
};

// Convergence table of the double-Gamma asymptote: at each gamma the
// shift-relation chain of length ~ floor(4 Re(xi)/gamma^2) versus the limit
//   -4 Re(xi) log sqrt(2 pi) + 4 * int_0^{Re xi} log Gamma(xi - s) ds.
std::vector<AsymptoteRow> asymptote_check(cplx xi, const std::vector<double>& gamma_grid);

} // namespace sclame
