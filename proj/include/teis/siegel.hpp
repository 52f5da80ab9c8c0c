#ifndef TEIS_SIEGEL_HPP
#define TEIS_SIEGEL_HPP

#include "teis/halfint.hpp"
#include "teis/iwasawa.hpp"
#include <vector>
#include <functional>

namespace teis {

/// [zZ^l^n + Z^n : Z^n] for a symmetric rational matrix z with l-power
/// denominators, via elementary-divisor valuations.
mpz_class nu_level(const std::vector<std::vector<mpq_class>>& z, long ell);

struct SiegelOptions {
    long budget = 100000000;  // enumeration budget (terms / lattice cells)
    int threads = 0;          // 0 = library default
};

/// j-th coefficient of the Siegel series b_l(B, s) = sum_j c_j l^{-js}, by
/// the spec's naive enumeration over Sym_n(l^{-j}Z/Z) filtered by nu = l^j,
/// with the character sum accumulated in Q(zeta_{l^j}) and asserted rational.
mpq_class siegel_coefficient(const HalfIntegralMatrix& B, long ell, long j,
                             const SiegelOptions& opt = {});

/// Same coefficients via the image-lattice kernel (used by siegel_polynomial).
/// Returns c_0..c_J.  `parallel` selects the OpenMP path; the serial path is
/// the reference twin used in tests and benchmarks.
std::vector<mpz_class> siegel_series_kernel(const HalfIntegralMatrix& B, long ell, long J,
                                            const SiegelOptions& opt = {}, bool parallel = true);

/// Aggregated subgroup sums G_0..G_A with b-series = G(t) * prod_{i<n}(1-l^i t).
std::vector<mpz_class> siegel_subgroup_sums(const HalfIntegralMatrix& B, long ell, long A,
                                            const SiegelOptions& opt = {}, bool parallel = true);

struct SiegelPolynomial {
    long ell = 0;
    std::vector<mpz_class> coeff; // F_{B,l}, constant term 1
    long verified_extra = 0;      // beyond-degree coefficients checked zero
    long id = 0;                  // stable identity for evaluation caches

    long degree() const { return long(coeff.size()) - 1; }
    Padic eval(const Padic& x) const;
    IwasawaSeries eval(const IwasawaSeries& x) const;
    mpq_class eval(const mpq_class& x) const;
};

/// F_{B,l} with the series identity checked at the spec bound
/// J = v_l(16 |det 2B|) + 4 (strict mode), or adaptively to the budget with
/// at least three beyond-degree zeros where affordable (strict=false).
SiegelPolynomial siegel_polynomial(const HalfIntegralMatrix& B, long ell,
                                   const SiegelOptions& opt = {}, bool strict = true);

/// Product over l | det(2B), l not in `excluded`, of F_{B,l}(x_l).
Padic a_B_scalar(const HalfIntegralMatrix& B, const std::vector<long>& excluded,
                 const std::function<Padic(long)>& eval_at, long p, long prec,
                 const SiegelOptions& opt = {});
IwasawaSeries a_B_series(const HalfIntegralMatrix& B, const std::vector<long>& excluded,
                         const std::function<IwasawaSeries(long)>& eval_at, long p, Caps caps,
                         long prec, const SiegelOptions& opt = {});

std::vector<long> prime_factors(const mpz_class& n);

} // namespace teis

#endif
