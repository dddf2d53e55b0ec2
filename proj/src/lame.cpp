#include "sclame/lame.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sclame {

namespace {

constexpr double kPi = 3.14159265358979323846;
const cplx kI{0.0, 1.0};

// Continuous branch of x -> log theta1(z + x) on x in [0,1], anchored at
// x = 0.  The principal log is corrected by a winding count marched on a
// fine uniform grid; the function is smooth and non-vanishing on the path
// whenever z is off the singular locus, so adjacent-node phase increments
// stay well inside (-pi, pi).
class LogThetaPath {
public:
    LogThetaPath(cplx z, const Torus& torus, int march = 2048)
        : z_(z), torus_(&torus), march_(march)
    {
        anchors_.resize(march_ + 1);
        winding_.resize(march_ + 1, 0);
        cplx prev = theta1(z_, torus);
        check(prev, 0.0);
        anchors_[0] = std::log(prev);
        double arg_prev = std::arg(prev);
        long wind = 0;
        for (int k = 1; k <= march_; ++k) {
            const double x = static_cast<double>(k) / march_;
            const cplx v = theta1(z_ + x, *torus_);
            check(v, x);
            double a = std::arg(v);
            double d = a - arg_prev;
            if (d > kPi) wind -= 1;
            else if (d < -kPi) wind += 1;
            arg_prev = a;
            winding_[k] = wind;
            anchors_[k] = std::log(v) + 2.0 * kPi * kI * static_cast<double>(wind);
        }
    }

    cplx operator()(double x) const
    {
        const int k = std::clamp(static_cast<int>(std::floor(x * march_)), 0, march_);
        const cplx v = theta1(z_ + x, *torus_);
        check(v, x);
        cplx lv = std::log(v) + 2.0 * kPi * kI * static_cast<double>(winding_[k]);
        // the anchor may sit on the other side of the cut within the cell
        const double jump = lv.imag() - anchors_[k].imag();
        if (jump > kPi) lv -= 2.0 * kPi * kI;
        else if (jump < -kPi) lv += 2.0 * kPi * kI;
        return lv;
    }

    cplx at_zero() const { return anchors_[0]; }

private:
    void check(cplx v, double x) const
    {
        if (std::abs(v) < 1e-280) {
            std::ostringstream os;
            os << "log theta1(z+x) hit a zero near x = " << x
               << "; z is on the singular locus";
            throw LameError(os.str());
        }
    }

    cplx z_;
    const Torus* torus_;
    int march_;
    std::vector<cplx> anchors_;
    std::vector<long> winding_;
};

void require_off_singular_locus(cplx z, const Torus& torus)
{
    // z and z + x, x in [0,1], must keep clear of the theta1 zeros Z + tau*Z.
    const double im = z.imag();
    const double im_tau = torus.tau.imag();
    double frac = im / im_tau - std::floor(im / im_tau);
    const double dist = std::min(frac, 1.0 - frac) * im_tau;
    if (dist < 1e-6) {
        std::ostringstream os;
        os << "z = (" << z.real() << "," << z.imag()
           << ") too close to the singular locus (lattice-row distance " << dist << ")";
        throw LameError(os.str());
    }
}

} // namespace

void LameParams::validate() const
{
    if (!(alpha0 > -4.0 && alpha0 < 2.0))
        throw LameError("alpha0 must lie in (-4, 2)");
    if (!std::isfinite(P0)) throw LameError("P0 must be finite");
}

BaseIntegrals base_integrals(cplx z, const LameParams& params, const Torus& torus,
                             const QuadratureSpec& spec)
{
    params.validate();
    torus.validate();

    QuadratureSpec qs = spec;
    qs.exponent_left = -params.alpha0 / 2.0;
    qs.exponent_right = -params.alpha0 / 2.0;

    // weight theta1(x)^{-alpha0/2} e^{pi P0 x}, principal power; the constant
    // phase from theta1 < 0 on (0,1) cancels in every ratio used downstream
    auto weight = [&](double x) -> cplx {
        return std::pow(theta1(cplx{x, 0.0}, torus), -params.alpha0 / 2.0) *
               std::exp(kPi * params.P0 * x);
    };

    BaseIntegrals out;
    out.I0 = integrate_singular([&](double x) { return weight(x); }, qs);

    if (z == cplx{0.0, 0.0}) {
        // limiting branch at z = 0: the log-ratio integrand is taken as 0
        out.Ilog = 0.0;
        out.Ilog_d1 = 0.0;
        out.Ilog_d2 = 0.0;
        return out;
    }
    require_off_singular_locus(z, torus);

    LogThetaPath logtheta(z, torus);
    const cplx log_at_z = logtheta.at_zero();
    out.Ilog = integrate_singular(
        [&](double x) { return (logtheta(x) - log_at_z) * weight(x); }, qs);

    const cplx psi_z = theta1_log_derivative(z, torus, 1);
    out.Ilog_d1 = integrate_singular(
        [&](double x) {
            return (theta1_log_derivative(z + x, torus, 1) - psi_z) * weight(x);
        },
        qs);

    const cplx psi2_z = theta1_log_derivative(z, torus, 2);
    out.Ilog_d2 = integrate_singular(
        [&](double x) {
            return (theta1_log_derivative(z + x, torus, 2) - psi2_z) * weight(x);
        },
        qs);
    return out;
}

cplx gamma_tilde(cplx z, const LameParams& params, const Torus& torus,
                 const QuadratureSpec& spec)
{
    const BaseIntegrals bi = base_integrals(z, params, torus, spec);
    return std::exp(params.P0 * z * kPi / 2.0 -
                    (params.alpha0 / 4.0) * bi.Ilog / bi.I0);
}

GammaTildeLogDerivatives gamma_tilde_log_derivatives(cplx z, const LameParams& params,
                                                     const Torus& torus,
                                                     const QuadratureSpec& spec)
{
    const BaseIntegrals bi = base_integrals(z, params, torus, spec);
    GammaTildeLogDerivatives out;
    const cplx g1 = kPi * params.P0 / 2.0 - (params.alpha0 / 4.0) * bi.Ilog_d1 / bi.I0;
    const cplx g2 = -(params.alpha0 / 4.0) * bi.Ilog_d2 / bi.I0;
    out.log_d1 = g1;
    out.d2_over = g2 + g1 * g1;
    return out;
}

cplx accessory_at(cplx z, const LameParams& params, const Torus& torus,
                  const QuadratureSpec& spec)
{
    const GammaTildeLogDerivatives d = gamma_tilde_log_derivatives(z, params, torus, spec);
    const double a4 = params.alpha0 / 4.0;
    return -d.d2_over + a4 * (a4 - 1.0) * wp(z, torus);
}

std::vector<cplx> default_probes(const Torus& torus)
{
    return {cplx{0.17, 0.0} + 0.23 * torus.tau, cplx{0.31, 0.0} + 0.11 * torus.tau,
            cplx{0.42, 0.0} + 0.37 * torus.tau, cplx{0.13, 0.0} + 0.41 * torus.tau,
            cplx{0.29, 0.0} + 0.19 * torus.tau};
}

AccessoryReport accessory_report(const LameParams& params, const Torus& torus,
                                 const QuadratureSpec& spec, std::vector<cplx> probes,
                                 double spread_threshold)
{
    if (probes.empty()) probes = default_probes(torus);
    if (probes.size() < 3)
        throw LameError("accessory_report needs at least 3 probe points");

    AccessoryReport rep;
    rep.probes = probes;
    const double a4 = params.alpha0 / 4.0;
    constexpr double eps = 1e-30;

    std::vector<cplx> acc(probes.size());
    std::vector<GammaTildeLogDerivatives> derivs(probes.size());
    for (std::size_t i = 0; i < probes.size(); ++i) {
        derivs[i] = gamma_tilde_log_derivatives(probes[i], params, torus, spec);
        acc[i] = -derivs[i].d2_over + a4 * (a4 - 1.0) * wp(probes[i], torus);
    }
    rep.per_probe = acc;

    cplx mean = 0.0;
    for (const cplx& a : acc) mean += a;
    mean /= static_cast<double>(acc.size());
    rep.accessory = mean;

    for (std::size_t i = 0; i < acc.size(); ++i)
        for (std::size_t j = i + 1; j < acc.size(); ++j)
            rep.spread = std::max(rep.spread, std::abs(acc[i] - acc[j]));

    // normalized residual of G'' - (a0/4)(a0/4-1) wp G + acc G, divided through
    // by G (nonzero), with the mean accessory
    for (std::size_t i = 0; i < probes.size(); ++i) {
        const cplx lhs = derivs[i].d2_over - a4 * (a4 - 1.0) * wp(probes[i], torus) + mean;
        const double denom = std::abs(derivs[i].d2_over) + std::abs(mean) + eps;
        rep.residual = std::max(rep.residual, std::abs(lhs) / denom);
    }

    rep.valid = rep.spread < spread_threshold * (1.0 + std::abs(mean));
    return rep;
}

double phi_logq_coefficient(const LameParams& params)
{
    params.validate();
    return (6.0 * params.P0 * params.P0 -
            params.alpha0 * (params.alpha0 + 2.0)) / 12.0;
}

} // namespace sclame
