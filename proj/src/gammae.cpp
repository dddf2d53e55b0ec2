#include "sclame/gammae.hpp"

#include <cmath>
#include <sstream>

namespace sclame {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kLogSqrt2Pi = 0.91893853320467274178;   // log sqrt(2 pi)

// Lanczos, g = 7, 9 terms.
constexpr double kLanczos[9] = {
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
};

bool near_nonpositive_integer(cplx z, double tol = 1e-13)
{
    if (std::abs(z.imag()) > tol) return false;
    const double r = z.real();
    if (r > 0.5) return false;
    return std::abs(r - std::round(r)) < tol;
}

} // namespace

cplx log_gamma(cplx z)
{
    if (near_nonpositive_integer(z)) {
        std::ostringstream os;
        os << "log_gamma: pole at z = (" << z.real() << "," << z.imag() << ")";
        throw GammaError(os.str());
    }
    if (z.real() < 0.5) {
        // reflection, log sin taken in the principal branch; for real negative
        // sin the cut is approached from above (+i*pi), independent of the
        // sign of an IEEE zero imaginary part
        cplx logsin;
        if (z.imag() == 0.0) {
            const double s = std::sin(kPi * z.real());
            logsin = cplx{std::log(std::abs(s)), s < 0.0 ? kPi : 0.0};
        } else {
            logsin = std::log(std::sin(kPi * z));
        }
        return std::log(kPi) - logsin - log_gamma(1.0 - z);
    }
    cplx x = kLanczos[0];
    const cplx zm1 = z - 1.0;
    for (int i = 1; i < 9; ++i) x += kLanczos[i] / (zm1 + static_cast<double>(i));
    const cplx t = zm1 + 7.5;
    return kLogSqrt2Pi + (zm1 + 0.5) * std::log(t) - t + std::log(x);
}

void GammaRatioChain::validate() const
{
    if (k < 0) throw GammaError("chain length must be >= 0");
    for (int j = 0; j < k; ++j) {
        const cplx arg = chi * (z + static_cast<double>(j) * chi);
        if (near_nonpositive_integer(arg, 1e-12)) {
            std::ostringstream os;
            os << "shift chain crosses a Gamma pole at step j = " << j
               << " (argument " << arg.real() << ")";
            throw GammaError(os.str());
        }
    }
}

cplx log_shift_ratio(const GammaRatioChain& chain)
{
    chain.validate();
    cplx acc = 0.0;
    const double lchi = std::log(chain.chi);
    for (int j = 0; j < chain.k; ++j) {
        const cplx zj = chain.z + static_cast<double>(j) * chain.chi;
        acc += kLogSqrt2Pi + (chain.chi * zj - 0.5) * lchi - log_gamma(chain.chi * zj);
    }
    return acc;
}

cplx shift_ratio(const GammaRatioChain& chain)
{
    return std::exp(log_shift_ratio(chain));
}

// ------------------------------------------------------------ semiclassical B

cplx semiclassical_B(double alpha0, double P0, const QuadratureSpec& spec)
{
    if (!(alpha0 > -4.0 && alpha0 < 2.0))
        throw GammaError("semiclassical_B: alpha0 must lie in (-4, 2)");
    const cplx i{0.0, 1.0};
    const cplx explicit_terms =
        i * kPi * alpha0 * (alpha0 + i * P0) / 2.0 + 4.0 * alpha0 * std::sqrt(2.0 * kPi);

    // Each integral runs over a finite real x-range; map to (0,1).
    auto range_integral = [&](double lo, double hi, const std::function<cplx(double)>& f) {
        if (lo == hi) return cplx{0.0, 0.0};
        QuadratureSpec qs = spec;
        return (hi - lo) * integrate_singular(
            [&](double u) { return f(lo + (hi - lo) * u); }, qs);
    };

    const double a4 = alpha0 / 4.0;
    const cplx iP2 = i * P0 / 2.0;

    const cplx I1 = range_integral(1.0 - a4, 1.0 + a4, [&](double x) {
        return log_gamma(cplx{1.0 - x - a4, 0.0});
    });
    const cplx I2 = range_integral(1.0 + a4, 1.0 + 3.0 * a4, [&](double x) {
        return log_gamma(cplx{1.0 - x + a4, 0.0});
    });
    const cplx I3 = range_integral(1.0 - a4, 1.0 + a4, [&](double x) {
        return log_gamma(1.0 - x - iP2 - a4);
    });
    const cplx I4 = range_integral(1.0 - a4, 1.0 + a4, [&](double x) {
        return log_gamma(1.0 - x + iP2 - a4);
    });

    return explicit_terms - I1 - I2 - I3 - I4;
}

// ------------------------------------------------------------ asymptote check

std::vector<AsymptoteRow> asymptote_check(cplx xi, const std::vector<double>& gamma_grid)
{
    if (!(xi.real() > 0.0))
        throw GammaError("asymptote_check requires Re(xi) > 0");

    // Limit side: -4 Re(xi) log sqrt(2 pi) + 4 * int_0^{Re xi} log Gamma(xi - s) ds.
    // The integrand has an integrable log singularity at s -> Re(xi) when xi is
    // real; tanh-sinh absorbs it.
    QuadratureSpec qs;
    qs.abs_tol = 1e-13;
    qs.rel_tol = 1e-13;
    const double rx = xi.real();
    const cplx integral = rx * integrate_singular(
        [&](double u) { return log_gamma(xi - rx * u); }, qs);
    const cplx limit = -4.0 * rx * kLogSqrt2Pi + 4.0 * integral;

    std::vector<AsymptoteRow> table;
    for (double g : gamma_grid) {
        if (!(g > 0.0)) throw GammaError("gamma grid entries must be positive");
        const double h = g * g / 4.0;
        // chain of shift factors with strictly interior arguments xi - j*h,
        // j = 1..K', K' chosen so the last argument stays off the poles
        long K = static_cast<long>(std::ceil(4.0 * rx / (g * g))) - 1;
        while (K >= 1 && std::abs((xi - static_cast<double>(K) * h).real()) < 0.25 * h &&
               std::abs(xi.imag()) < 1e-12)
            --K;
        cplx sum = 0.0;
        for (long j = 1; j <= K; ++j)
            sum += log_gamma(xi - static_cast<double>(j) * h) - kLogSqrt2Pi;
        AsymptoteRow row;
        row.gamma = g;
        row.finite_side = g * g * sum;
        row.limit = limit;
        row.gap = std::abs(row.finite_side - limit);
        table.push_back(row);
    }
    return table;
}

} // namespace sclame
