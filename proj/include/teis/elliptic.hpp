#ifndef TEIS_ELLIPTIC_HPP
#define TEIS_ELLIPTIC_HPP

#include "teis/localfactors.hpp"
#include "teis/cyclotomic.hpp"
#include <map>
#include <optional>
#include <variant>

namespace teis {

enum class ReductionP { GoodOrdinary, SplitMult, NonsplitMult };

/// local data of one elliptic curve in a triple
struct EllipticCurveData {
    long conductor = 1;                 // square-free
    ReductionP reduction = ReductionP::GoodOrdinary;
    long ap = 0;                        // a_p; for multiplicative curves +-1
    std::map<long, int> a_ell;          // a_l in {+-1} at primes l | conductor
    std::optional<Padic> alpha;         // unit root for good ordinary (else from ap)
};

struct EllipticTriple {
    std::array<EllipticCurveData, 3> E;
    long p = 5;
    long prec = 30;

    void validate() const;
    /// unit root alpha_i (good ordinary: unit root of X^2 - a_p X + p)
    Padic unit_root(int i) const;
    bool mult_at_p(int i) const;
};

enum class TrivialZeroCase { None, CaseI, CaseII, Other };

/// which of the four central-point equations beta1 beta2 beta3 = p^2, ... hold
std::array<bool, 4> r82_equations(const EllipticTriple& T, long eq_prec);

TrivialZeroCase trivial_zero_classify(const EllipticTriple& T);

struct EpsilonSigns {
    int eps = 0;     // global sign epsilon(E)
    int eps_p = 0;   // p-adic sign
    std::vector<long> sigma_minus;
};

EpsilonSigns epsilon_signs(const EllipticTriple& T);

/// adjoint modified Euler factor of a p-stabilized form (weight k, level
/// exponent n, U_p-eigenvalue alpha); the ramified-nebentypus branch returns
/// a Gauss sum in Z_p[zeta_p]
std::variant<Padic, CycP> ep_adjoint(long k, long n, const Padic& alpha, long chi_teich_exp,
                                     long p, long prec);

struct LInvariants {
    std::array<std::optional<Padic>, 3> ell; // l_i where defined
    Padic script_L;                          // -8 l1 l2 l3 or 4 l1^2
    std::optional<Padic> case_ii_factor;     // (-p alpha2^{-2})(1 - alpha2^{-2})^2
    bool degenerate = false;
};

/// l_i = -(1/2) log_p q / ord_p q for split-multiplicative curves with the
/// supplied Tate periods
LInvariants l_invariants(const EllipticTriple& T,
                         const std::array<std::optional<Padic>, 3>& tate_periods);

/// local representation data at p for the E_p machinery
std::array<LocalRepP, 3> local_reps_at_p(const EllipticTriple& T);

} // namespace teis

#endif
