#include "sclame/elliptic.hpp"

#include <cmath>
#include <sstream>

namespace sclame {

namespace {

constexpr double kPi = 3.14159265358979323846;
const cplx kI{0.0, 1.0};

// Reduce z modulo the lattice to |Re| <= 1/2, |Im| <= Im(tau)/2, returning
// the number of tau-steps removed (needed for the quasi-periodicity factors).
struct Reduced {
    cplx z;
    long m;   // z_orig = z + n*1 + m*tau
    long n;
};

Reduced reduce_lattice(cplx z, const Torus& t)
{
    Reduced r;
    const double im_tau = t.tau.imag();
    r.m = std::lround(z.imag() / im_tau);
    r.z = z - static_cast<double>(r.m) * t.tau;
    r.n = std::lround(r.z.real());
    r.z -= static_cast<double>(r.n);
    return r;
}

void check_q(const Torus& t)
{
    if (std::abs(t.q) >= 1.0 - 1e-6)
        throw EllipticError("nome too close to the unit circle; theta products "
                            "cannot reach the required precision");
}

double lattice_distance(cplx zr, const Torus& t)
{
    // zr already reduced; nearest lattice point is one of the 4 cell corners
    double best = std::abs(zr);
    for (int dn = -1; dn <= 1; ++dn)
        for (int dm = -1; dm <= 1; ++dm)
            best = std::min(best, std::abs(zr + static_cast<double>(dn) +
                                           static_cast<double>(dm) * t.tau));
    return best;
}

} // namespace

Torus Torus::from_tau(cplx tau)
{
    if (!(tau.imag() > 0.0))
        throw EllipticError("modular parameter must satisfy Im(tau) > 0");
    Torus t;
    t.tau = tau;
    t.q = std::exp(kI * kPi * tau);
    return t;
}

Torus Torus::from_q(cplx q)
{
    if (!(std::abs(q) < 1.0) || std::abs(q) == 0.0)
        throw EllipticError("nome must satisfy 0 < |q| < 1");
    Torus t;
    t.q = q;
    t.tau = std::log(q) / (kI * kPi);
    return t;
}

void Torus::validate() const
{
    if (!(tau.imag() > 0.0)) throw EllipticError("torus: Im(tau) must be positive");
    if (!(std::abs(q) < 1.0)) throw EllipticError("torus: |q| must be < 1");
    if (std::abs(q - std::exp(kI * kPi * tau)) > 1e-12 * (1.0 + std::abs(q)))
        throw EllipticError("torus: q != exp(i*pi*tau)");
}

// --------------------------------------------------------------------- theta

cplx theta1(cplx z, const Torus& t)
{
    check_q(t);
    const Reduced r = reduce_lattice(z, t);
    const cplx q2 = t.q * t.q;
    const cplx two_cos = 2.0 * std::cos(2.0 * kPi * r.z);

    cplx prod = 1.0;
    cplx qk = 1.0;   // q^{2k}
    for (int k = 1; k <= 4000; ++k) {
        qk *= q2;
        const cplx f = (1.0 - qk) * (1.0 - two_cos * qk + qk * qk);
        prod *= f;
        if (std::abs(qk) * (2.0 + std::abs(two_cos)) < 1e-17) break;
    }
    cplx val = -2.0 * std::pow(t.q, 0.25) * std::sin(kPi * r.z) * prod;

    // undo the reduction: theta1(z+1) = -theta1, theta1(z+m*tau) picks up
    // (-1)^m q^{-m^2} e^{-2 pi i m z_red}... applied in the forward direction.
    if (r.n & 1L) val = -val;
    if (r.m != 0) {
        const double m = static_cast<double>(r.m);
        cplx factor = std::pow(t.q, -m * m) *
                      std::exp(-2.0 * kPi * kI * m * (r.z + static_cast<double>(r.n)));
        if (r.m & 1L) factor = -factor;
        val *= factor;
    }
    return val;
}

cplx theta2(cplx z, const Torus& t)
{
    check_q(t);
    const Reduced r = reduce_lattice(z, t);
    const cplx q2 = t.q * t.q;
    const cplx two_cos = 2.0 * std::cos(2.0 * kPi * r.z);
    cplx prod = 1.0;
    cplx qk = 1.0;
    for (int k = 1; k <= 4000; ++k) {
        qk *= q2;
        prod *= (1.0 - qk) * (1.0 + two_cos * qk + qk * qk);
        if (std::abs(qk) * (2.0 + std::abs(two_cos)) < 1e-17) break;
    }
    cplx val = 2.0 * std::pow(t.q, 0.25) * std::cos(kPi * r.z) * prod;
    if (r.n & 1L) val = -val;   // theta2(z+1) = -theta2(z)
    if (r.m != 0) {             // theta2(z+m*tau) = q^{-m^2} e^{-2 pi i m z} theta2(z)
        const double m = static_cast<double>(r.m);
        val *= std::pow(t.q, -m * m) * std::exp(-2.0 * kPi * kI * m * r.z);
    }
    return val;
}

cplx theta3(cplx z, const Torus& t)
{
    check_q(t);
    const Reduced r = reduce_lattice(z, t);
    const cplx q2 = t.q * t.q;
    const cplx two_cos = 2.0 * std::cos(2.0 * kPi * r.z);
    cplx prod = 1.0;
    cplx qk = 1.0;       // q^{2k}
    cplx qodd = t.q;     // q^{2k-1}
    for (int k = 1; k <= 4000; ++k) {
        qk *= q2;
        prod *= (1.0 - qk) * (1.0 + two_cos * qodd + qodd * qodd);
        qodd *= q2;
        if (std::abs(qk) * (2.0 + std::abs(two_cos)) < 1e-17) break;
    }
    cplx val = prod;            // theta3(z+1) = theta3(z)
    if (r.m != 0) {
        const double m = static_cast<double>(r.m);
        val *= std::pow(t.q, -m * m) * std::exp(-2.0 * kPi * kI * m * r.z);
    }
    return val;
}

cplx dedekind_eta(const Torus& t)
{
    check_q(t);
    const cplx q2 = t.q * t.q;
    cplx prod = 1.0;
    cplx qk = 1.0;
    for (int k = 1; k <= 4000; ++k) {
        qk *= q2;
        prod *= (1.0 - qk);
        if (std::abs(qk) < 1e-17) break;
    }
    return std::pow(t.q, 1.0 / 12.0) * prod;
}

cplx theta1_prime0(const Torus& t)
{
    const cplx eta = dedekind_eta(t);
    return -2.0 * kPi * eta * eta * eta;
}

// ------------------------------------------------------- log derivatives

cplx theta1_log_derivative(cplx z, const Torus& t, int order)
{
    check_q(t);
    if (order < 1 || order > 4)
        throw EllipticError("theta1_log_derivative: order must be in 1..4");

    const Reduced r = reduce_lattice(z, t);
    const double dist = lattice_distance(r.z, t);
    if (dist < 1e-8) {
        std::ostringstream os;
        os << "theta1_log_derivative: z within " << dist << " of the lattice";
        throw EllipticError(os.str());
    }

    // d/dz log theta1 = pi cot(pi z) + 4 pi sum_m q^{2m}/(1-q^{2m}) sin(2 pi m z),
    // differentiated term by term for higher orders.  Valid for |Im z| < Im tau,
    // guaranteed by the lattice reduction.
    const cplx q2 = t.q * t.q;
    const cplx piz = kPi * r.z;

    cplx sum = 0.0;
    cplx qm = 1.0;
    for (int m = 1; m <= 4000; ++m) {
        qm *= q2;
        const cplx coef = qm / (1.0 - qm);
        const double mm = static_cast<double>(m);
        cplx term;
        switch (order) {
            case 1: term = coef * std::sin(2.0 * kPi * mm * r.z); break;
            case 2: term = coef * 2.0 * kPi * mm * std::cos(2.0 * kPi * mm * r.z); break;
            case 3: term = -coef * 4.0 * kPi * kPi * mm * mm *
                           std::sin(2.0 * kPi * mm * r.z); break;
            default: term = -coef * 8.0 * kPi * kPi * kPi * mm * mm * mm *
                            std::cos(2.0 * kPi * mm * r.z); break;
        }
        sum += term;
        // tail bound: |q|^{2m} e^{2 pi m |Im z|} decays geometrically
        if (std::abs(qm) * std::exp(2.0 * kPi * mm * std::abs(r.z.imag())) *
                (order == 1 ? 1.0 : 40.0 * mm * mm) < 1e-18 && m > 4)
            break;
    }

    cplx val;
    const cplx s = std::sin(piz);
    const cplx c = std::cos(piz);
    const double pi2 = kPi * kPi;
    switch (order) {
        case 1: val = kPi * c / s + 4.0 * kPi * sum; break;
        case 2: val = -pi2 / (s * s) + 4.0 * kPi * sum; break;
        case 3: val = 2.0 * pi2 * kPi * c / (s * s * s) + 4.0 * kPi * sum; break;
        default:
            val = -2.0 * pi2 * pi2 * (2.0 * c * c + 1.0) / (s * s * s * s) +
                  4.0 * kPi * sum;
            break;
    }
    // order-1 shifts by -2 pi i per tau period; orders 2,3 are fully periodic
    if (order == 1 && r.m != 0)
        val -= 2.0 * kPi * kI * static_cast<double>(r.m);
    return val;
}

cplx weierstrass_eta1(const Torus& t)
{
    // theta1(z) = t1p0 * z * (1 + (t1ppp0/t1p0) z^2/6 + ...) with the series
    // read off the product form:
    //   theta1'''(0)/theta1'(0) = -pi^2 - 24 pi^2 sum q^{2m}/(1-q^{2m})^2 *...
    // Use the identity via the order-2 log-derivative Laurent tail instead:
    //   eta1 = (pi^2/6) E2, E2 = 1 - 24 sum_m m q^{2m}/(1-q^{2m}).
    const cplx q2 = t.q * t.q;
    cplx sum = 0.0;
    cplx qm = 1.0;
    for (int m = 1; m <= 4000; ++m) {
        qm *= q2;
        sum += static_cast<double>(m) * qm / (1.0 - qm);
        if (std::abs(qm) * m < 1e-18 && m > 4) break;
    }
    return kPi * kPi / 6.0 * (1.0 - 24.0 * sum);
}

cplx wp(cplx z, const Torus& t)
{
    return -theta1_log_derivative(z, t, 2) - 2.0 * weierstrass_eta1(t);
}

cplx wp_prime(cplx z, const Torus& t)
{
    return -theta1_log_derivative(z, t, 3);
}

HalfPeriodRoots half_period_roots(const Torus& t, RootLabeling labeling)
{
    t.validate();
    const cplx at_half = wp(cplx{0.5, 0.0}, t);
    const cplx at_half_sum = wp(0.5 * (1.0 + t.tau), t);
    const cplx at_half_tau = wp(0.5 * t.tau, t);

    HalfPeriodRoots r;
    if (labeling == RootLabeling::Standard) {
        r.e1 = at_half;
        r.e2 = at_half_sum;
        r.e3 = at_half_tau;
    } else {
        r.e1 = at_half_tau;
        r.e2 = at_half;
        r.e3 = at_half_sum;
    }
    r.g2 = -4.0 * (r.e1 * r.e2 + r.e2 * r.e3 + r.e3 * r.e1);
    r.g3 = 4.0 * r.e1 * r.e2 * r.e3;
    return r;
}

} // namespace sclame
