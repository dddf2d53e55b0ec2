#include "doctest.h"

#include "sclame/elliptic.hpp"

#include <cmath>

using namespace sclame;

namespace {
constexpr double kPi = 3.14159265358979323846;
const cplx kI{0.0, 1.0};

// truncated Eisenstein sum over |m|,|n| <= R
cplx wp_lattice_sum(cplx z, const Torus& t, int R)
{
    cplx sum = 1.0 / (z * z);
    for (int m = -R; m <= R; ++m)
        for (int n = -R; n <= R; ++n) {
            if (m == 0 && n == 0) continue;
            const cplx w = static_cast<double>(n) + static_cast<double>(m) * t.tau;
            sum += 1.0 / ((z - w) * (z - w)) - 1.0 / (w * w);
        }
    return sum;
}
} // namespace

TEST_CASE("theta1 vanishes at the origin and is odd")
{
    const Torus t = Torus::from_q(cplx{0.2, 0.0});
    CHECK(std::abs(theta1(cplx{0.0, 0.0}, t)) < 1e-14);
    const cplx z{0.31, 0.17};
    CHECK(std::abs(theta1(-z, t) + theta1(z, t)) < 1e-12 * std::abs(theta1(z, t)));
}

TEST_CASE("theta1 periodicities")
{
    const Torus t = Torus::from_q(cplx{0.2, 0.0});
    const cplx z{0.3, 0.1};
    CHECK(std::abs(theta1(z + 1.0, t) + theta1(z, t)) < 1e-12);
    const cplx lhs = theta1(z + t.tau, t);
    const cplx rhs = -std::exp(-2.0 * kPi * kI * z) / t.q * theta1(z, t);
    CHECK(std::abs(lhs - rhs) < 1e-10 * std::abs(rhs));
}

TEST_CASE("theta1 small-nome leading term")
{
    const Torus t = Torus::from_q(cplx{0.01, 0.0});
    const cplx approx = -2.0 * std::pow(t.q, 0.25) * std::sin(0.3 * kPi);
    const cplx v = theta1(cplx{0.3, 0.0}, t);
    CHECK(std::abs(v - approx) / std::abs(v) < 3e-4);
}

TEST_CASE("theta1 refuses |q| ~ 1")
{
    CHECK_THROWS_AS(theta1(cplx{0.3, 0.0}, Torus::from_q(cplx{0.9999999, 0.0})),
                    EllipticError);
}

TEST_CASE("dedekind eta: truncated product and theta1'(0) identity")
{
    const Torus t = Torus::from_q(cplx{0.1, 0.0});
    cplx prod = std::pow(cplx{0.1, 0.0}, 1.0 / 12.0);
    double qk = 1.0;
    for (int k = 1; k < 40; ++k) {
        qk *= 0.01;
        prod *= (1.0 - qk);
    }
    CHECK(std::abs(dedekind_eta(t) - prod) < 1e-14);

    // theta1'(0) by centered finite differences vs -2 pi eta^3
    const double h = 1e-5;
    const cplx fd = (theta1(cplx{h, 0.0}, t) - theta1(cplx{-h, 0.0}, t)) / (2.0 * h);
    CHECK(std::abs(fd - theta1_prime0(t)) < 1e-9);
}

TEST_CASE("eta from theta1'(0), real-positive branch on the imaginary axis")
{
    const Torus t = Torus::from_tau(cplx{0.0, 1.3});
    const cplx eta = dedekind_eta(t);
    const cplx cubed = theta1_prime0(t) / (-2.0 * kPi);
    CHECK(std::abs(std::pow(cubed, 1.0 / 3.0) - eta) < 1e-12);
    CHECK(eta.imag() < 1e-15);
    CHECK(eta.real() > 0.0);
}

TEST_CASE("theta1 log derivative: half-period zero and finite differences")
{
    const Torus t = Torus::from_q(cplx{0.15, 0.0});
    CHECK(std::abs(theta1_log_derivative(cplx{0.5, 0.0}, t, 1)) < 1e-13);

    const cplx z{0.27, 0.21};
    const double h = 1e-5;
    auto logt = [&](cplx w) { return std::log(theta1(w, t)); };
    const cplx fd1 = (logt(z + h) - logt(z - h)) / (2.0 * h);
    CHECK(std::abs(fd1 - theta1_log_derivative(z, t, 1)) < 1e-8);

    const cplx fd2 = (logt(z + h) - 2.0 * logt(z) + logt(z - h)) / (h * h);
    CHECK(std::abs(fd2 - theta1_log_derivative(z, t, 2)) < 1e-5);
}

TEST_CASE("theta1 log derivative order 2: q -> 0 limit is -pi^2 csc^2")
{
    const Torus t = Torus::from_q(cplx{1e-4, 0.0});
    const cplx z{0.37, 0.0};
    const cplx expect = -kPi * kPi / std::pow(std::sin(kPi * z), 2.0);
    const cplx got = theta1_log_derivative(z, t, 2);
    CHECK(std::abs(got - expect) < 1e-6 * std::abs(expect));
}

TEST_CASE("wp: evenness, double pole, lattice-sum oracle")
{
    const Torus t = Torus::from_q(cplx{0.15, 0.0});
    const cplx z{0.2, 0.1};
    CHECK(std::abs(wp(-z, t) - wp(z, t)) < 1e-11 * std::abs(wp(z, t)));

    const Torus t2 = Torus::from_q(cplx{0.1, 0.0});
    const cplx near{0.01, 0.0};
    CHECK(std::abs(wp(near, t2) * near * near - 1.0) < 1e-3);

    for (cplx zp : {cplx{0.11, 0.05}, cplx{0.09, -0.03}, cplx{0.13, 0.02}}) {
        const cplx oracle = wp_lattice_sum(zp, t2, 40);
        CHECK(std::abs(wp(zp, t2) - oracle) < 1e-6 * std::abs(oracle));
    }
}

TEST_CASE("wp double periodicity")
{
    const Torus t = Torus::from_q(cplx{0.2, 0.0});
    const cplx z{0.31, 0.23};
    const cplx v = wp(z, t);
    CHECK(std::abs(wp(z + 1.0, t) - v) < 1e-9 * std::abs(v));
    CHECK(std::abs(wp(z + t.tau, t) - v) < 1e-9 * std::abs(v));
}

TEST_CASE("wp_prime: oddness and finite differences of wp")
{
    const Torus t = Torus::from_q(cplx{0.15, 0.0});
    const cplx z{0.23, 0.11};
    CHECK(std::abs(wp_prime(-z, t) + wp_prime(z, t)) < 1e-10 * std::abs(wp_prime(z, t)));
    const double h = 1e-5;
    const cplx fd = (wp(z + h, t) - wp(z - h, t)) / (2.0 * h);
    CHECK(std::abs(fd - wp_prime(z, t)) < 1e-7 * (1.0 + std::abs(wp_prime(z, t))));
}

TEST_CASE("half-period roots: sum, cubic, wp'' identity")
{
    const Torus t = Torus::from_q(cplx{0.2, 0.0});
    const HalfPeriodRoots r = half_period_roots(t);
    const double scale = std::max({std::abs(r.e1), std::abs(r.e2), std::abs(r.e3)});
    CHECK(std::abs(r.e1 + r.e2 + r.e3) < 1e-10 * scale);

    const cplx z = 0.23 + 0.31 * t.tau;
    const cplx p = wp(z, t);
    const cplx dp = wp_prime(z, t);
    const cplx cubic = 4.0 * p * p * p - r.g2 * p - r.g3;
    CHECK(std::abs(dp * dp - cubic) < 1e-9 * std::abs(cubic));

    // each root satisfies the cubic
    for (cplx e : {r.e1, r.e2, r.e3}) {
        const cplx val = 4.0 * e * e * e - r.g2 * e - r.g3;
        CHECK(std::abs(val) < 1e-9 * std::max(1.0, std::abs(4.0 * e * e * e)));
    }

    // wp'' = (wp'^2/2) sum 1/(wp - e_i), the curvature identity
    const cplx ddp = -theta1_log_derivative(z, t, 4);
    const cplx rhs = dp * dp / 2.0 *
                     (1.0 / (p - r.e1) + 1.0 / (p - r.e2) + 1.0 / (p - r.e3));
    CHECK(std::abs(ddp - rhs) < 1e-8 * std::abs(rhs));
}

TEST_CASE("SmallT labeling sends T to zero with q")
{
    const Torus t = Torus::from_q(cplx{1e-4, 0.0});
    const HalfPeriodRoots r = half_period_roots(t, RootLabeling::SmallT);
    const cplx T = (r.e3 - r.e1) / (r.e2 - r.e1);
    CHECK(std::abs(T) < 0.05);
}

TEST_CASE("torus consistency checks")
{
    CHECK_THROWS_AS(Torus::from_tau(cplx{0.3, -1.0}), EllipticError);
    const Torus t = Torus::from_tau(cplx{0.3, 1.1});
    t.validate();
    const Torus t2 = Torus::from_q(t.q);
    CHECK(std::abs(t2.tau - t.tau) < 1e-12);
}
