#pragma once

// Finite-mode sampling of the log-correlated fields
//   Y_N(x)    = sum_{n<=N} sqrt(2/n) (a_n cos 2 pi n x + b_n sin 2 pi n x),
//   Y_N(x;q)  = Y_N(x) + 2 sum_{n,m>=1} q^{nm}/sqrt(n) (a_nm cos 2 pi n x + b_nm sin 2 pi n x),
// renormalized chaos integrals, the exact covariance kernels, and moment
// validation against iterated quadrature and the Dotsenko-Fadeev constant.
//
// Draw order (wire contract): for n = 1..N the pair (a_n, b_n); then the
// doubly-indexed block row-major, i.e. for n ascending, for m = 1..floor(K/n)
// with K = log(1e-16)/log|q|, the pair (a_nm, b_nm).

#include "sclame/elliptic.hpp"
#include "sclame/numerics.hpp"

#include <optional>
#include <vector>

namespace sclame {

class GmcError : public NumericsError {
public:
    using NumericsError::NumericsError;
};

struct FieldConfig {
    double gamma = 0.5;               // in (0, 2)
    int modes = 2000;                 // N, cosine/sine mode cutoff
    std::optional<Torus> torus;       // nullopt: the q-independent field
    RandomStream stream;

    void validate() const;
    // kept (n,m) pairs of the q-block: |q|^{nm} >= 1e-16
    std::vector<std::pair<int, int>> q_block_pairs() const;
    // exact variance of the truncated field (x-independent)
    double field_variance() const;
};

// One realization of the field on the given grid, drawn from config.stream.
std::vector<double> sample_field(const FieldConfig& config,
                                 const std::vector<double>& grid);

// Exact covariance kernel of the infinite-mode field:
//   -2 log|e^{2 pi i x} - e^{2 pi i y}|                       (no torus)
//   -2 log|theta1(x-y)| + 2 log|q^{1/6} eta(q)|               (torus)
double covariance(double x, double y, const std::optional<Torus>& torus);

// One sample of int_0^1 theta1(x)^{-alpha*gamma/2} e^{pi gamma P x}
//   * exp((gamma/2) Y_N(x;q) - (gamma^2/8) E[Y_N^2]) dx.
// `draw` selects the stream substream (sample index).
cplx gmc_integral(const FieldConfig& config, double alpha, double P,
                  std::uint64_t draw, const QuadratureSpec& spec);

// Dotsenko-Fadeev constant C for the N-th integer moment, verbatim.
cplx df_constant(int N, double gamma, double P, const Torus& torus);

struct MomentCheck {
    int order = 0;
    cplx mc_estimate;
    double std_error = 0.0;
    cplx oracle;
    double z_score = 0.0;
    long samples = 0;
    bool flagged = false;            // SE/mean above 0.2: demand more samples
    cplx df_ratio;                   // exploratory: MC / (DF integral / C)
};

// Monte-Carlo N-th moment of the renormalized chaos integral versus the
// N-fold iterated-quadrature Gaussian-moment oracle
//   int prod f(x_i) exp((gamma^2/4) sum_{i<j} cov(x_i, x_j)) dx,
// with alpha = -N*gamma.  N in {1, 2}.  `jobs` shards the sampling across
// threads; the reduction is deterministic regardless of job count.
MomentCheck moment_check(int order, double gamma, double P, const Torus& torus,
                         long samples, const FieldConfig& base_config, int jobs = 1);

// Mean of int f dmu_gamma over `samples` draws minus int f dx, in units of
// the standard error (unit-mean martingale normalization check).
struct UnitMeanCheck {
    cplx mc_mean;
    cplx exact;
    double std_error = 0.0;
    double z_score = 0.0;
};
UnitMeanCheck unit_mean_check(const FieldConfig& config, double alpha, double P,
                              long samples, int jobs = 1);

} // namespace sclame
