#pragma once

// Numerical kernel: singular-endpoint quadrature on (0,1), complex root
// finding, adaptive complex ODE integration along polygonal paths, complex
// polynomial least squares, and counter-indexed Gaussian streams.

#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sclame {

using cplx = std::complex<double>;

class NumericsError : public std::runtime_error {
public:
    explicit NumericsError(const std::string& msg) : std::runtime_error(msg) {}
};

// ---------------------------------------------------------------- quadrature

struct QuadratureSpec {
    enum class Method { TanhSinh, AdaptiveMidpoint };
    Method method = Method::TanhSinh;
    double abs_tol = 1e-12;
    double rel_tol = 1e-12;
    int max_level = 12;
    // Known power-law singularity strengths at the endpoints, f ~ x^a near 0
    // and (1-x)^b near 1.  Informational for TanhSinh (which absorbs any
    // integrable algebraic or log endpoint singularity); used by the
    // adaptive-midpoint method to decide grading depth.
    double exponent_left = 0.0;
    double exponent_right = 0.0;

    void validate() const;
};

struct QuadratureResult {
    cplx value{0.0, 0.0};
    double error_estimate = 0.0;
    int levels_used = 0;
    long evaluations = 0;
    bool converged = false;
    cplx previous_estimate{0.0, 0.0};   // next-to-last refinement, for diagnostics
};

// Integrates f over the open interval (0,1).  Endpoints are never evaluated.
// A NaN/inf integrand value aborts immediately, naming the abscissa.
QuadratureResult quadrature(const std::function<cplx(double)>& f,
                            const QuadratureSpec& spec);

// Same, but throws NumericsError when the refinement fails to converge.
cplx integrate_singular(const std::function<cplx(double)>& f,
                        const QuadratureSpec& spec);

// ---------------------------------------------------------------- root finding

struct RootSpec {
    cplx guess{0.0, 0.0};
    cplx secant_step{1e-4, 0.0};
    double f_tol = 1e-12;
    double step_tol = 1e-14;
    int max_iterations = 60;

    void validate() const;
};

struct RootResult {
    cplx root{0.0, 0.0};
    int iterations = 0;
    double residual = 0.0;
    std::vector<cplx> trace;
};

// Secant iteration in the complex plane; Newton steps when df is supplied.
RootResult find_root(const std::function<cplx(cplx)>& f, const RootSpec& spec,
                     const std::function<cplx(cplx)>* df = nullptr);

// ---------------------------------------------------------------- ODE

struct OdeSpec {
    cplx t0{0.0, 0.0};
    cplx t1{1.0, 0.0};
    std::vector<cplx> y0;
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    long max_steps = 1000000;
    bool dense_output = false;
    // Optional interior waypoints; the path is the polygon t0 -> w[0] -> ... -> t1.
    std::vector<cplx> waypoints;
    // Checked after each accepted step; returning true ends the integration
    // gracefully with stopped_early set.
    std::function<bool(const cplx& t, const std::vector<cplx>& y)> stop_condition;
    // When set, a step-size underflow (approach to a singularity) ends the
    // integration with underflow set instead of throwing.
    bool stop_on_underflow = false;

    void validate() const;
};

using OdeRhs = std::function<void(const cplx& t, const std::vector<cplx>& y,
                                  std::vector<cplx>& dydt)>;

struct OdeStepRecord {
    double s0 = 0.0, s1 = 0.0;      // path parameter of step ends, in [0,1]
    cplx t0, t1;
    std::vector<cplx> y0, y1;
    // Dense coefficients (5th-order method, 4th-order dense interpolant):
    // y(s0 + u*(s1-s0)) = y0 + u*(d1 + (1-u)*(d2 + u*(d3 + (1-u)*d4)))
    std::vector<cplx> d1, d2, d3, d4;
};

struct OdeTrajectory {
    std::vector<cplx> path_nodes;            // t0, waypoints..., t1
    std::vector<OdeStepRecord> steps;        // empty unless dense_output
    std::vector<cplx> t_samples;
    std::vector<std::vector<cplx>> y_samples;
    long total_steps = 0;
    long rejected_steps = 0;
    bool stopped_early = false;
    bool underflow = false;
    cplx stop_location{0.0, 0.0};

    const std::vector<cplx>& final_state() const { return y_samples.back(); }
    // Dense evaluation at path parameter s in [0,1] (requires dense_output).
    std::vector<cplx> dense_eval(double s) const;
    cplx path_point(double s) const;
    double path_length() const;
};

// Embedded Dormand-Prince 5(4) with PI step-size control over the straight
// segment(s) of spec, complex state.  Local error kept below
// abs_tol + rel_tol*|y| per component.
OdeTrajectory integrate_ode(const OdeRhs& rhs, const OdeSpec& spec);

// ---------------------------------------------------------------- least squares

// Least-squares coefficients c0..c_degree of p(x) = sum c_k x^k minimizing
// sum |y_i - p(x_i)|^2.  Exact interpolation when samples.size() == degree+1.
std::vector<cplx> fit_polynomial(const std::vector<std::pair<cplx, cplx>>& samples,
                                 int degree);

cplx eval_polynomial(const std::vector<cplx>& coeffs, cplx x);

// ---------------------------------------------------------------- random streams

// Counter-based stream: draw i of stream (seed, index) is a pure function of
// (seed, index, i), so streams are indexable, mergeable and reproducible.
struct RandomStream {
    std::uint64_t seed = 0;
    std::uint64_t index = 0;

    // i.i.d. standard normal draw number i (0-based) of this stream.
    double gaussian(std::uint64_t i) const;
    // uniform in (0,1)
    double uniform(std::uint64_t i) const;
    RandomStream substream(std::uint64_t shift) const {
        return RandomStream{seed, index + shift};
    }
};

std::vector<double> gaussian_stream(const RandomStream& stream, std::size_t count);

} // namespace sclame
