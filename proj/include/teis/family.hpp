#ifndef TEIS_FAMILY_HPP
#define TEIS_FAMILY_HPP

#include "teis/halfint.hpp"
#include "teis/iwasawa.hpp"
#include "teis/siegel.hpp"
#include <map>
#include <vector>

namespace teis {

/// character of Z_p^*: z -> omega(z)^teich * z^cyc (trivial finite part)
struct PadicCharacter {
    long teich = 0;
    long cyc = 0;
    Padic value(const mpz_class& z, long p, long prec) const;
};

struct FamilyConfig {
    long p = 5;
    long N = 1;            // square-free tame level, p coprime to N
    long a = 0;            // twist exponent in Z/(p-1)
    long a1 = 0, a2 = 0, a3 = 0; // chi_i = omega^{a_i}
    Caps caps{3, 3, 3, 3};
    long prec = 30;
    SiegelOptions siegel;

    void validate() const;
};

/// Q_B(chi0, chi1, chi2, chi3): chi0(8 y1 y2 y3) chi1(2y1) chi2(2y2) chi3(2y3)
/// times the Xi_p indicator, with 2y1 = c23, 2y2 = c13, 2y3 = c12.
Padic q_B_value(const HalfIntegralMatrix& B, const PadicCharacter& chi0,
                const PadicCharacter& chi1, const PadicCharacter& chi2,
                const PadicCharacter& chi3, long p, long prec);

/// all B in T_3^+ with the given diagonal and off-diagonals prime to p
std::vector<HalfIntegralMatrix> enumerate_matrices(std::array<long, 3> diag, long p);

/// one summand c * prod <z_i>_{var_i}^{m_i} of a family coefficient; its
/// specialization is exact (integer powers of one-units)
struct GroupLikeAtom {
    Padic scalar;
    struct Factor {
        mpz_class z;
        Var var;
        long mult;
    };
    std::vector<Factor> factors;
    // combined one-unit base per variable: W_v = prod <z_f>^{mult_f}
    std::array<Padic, 4> base;
    bool base_ready = false;
    void prepare(long p, long prec);
    Padic specialize(const ArithmeticPoint& pt) const;
    IwasawaSeries expand(Caps caps, long prec) const;
};

struct EulerFactorAt {
    long ell = 0;
    long c_exp = 0;        // omega-exponent of the scalar c_l (mod p-1)
    Padic c;               // c_l = omega(l)^{c_exp} l^{-4}
    SiegelPolynomial F;
};

struct FamilyCoefficient {
    IwasawaSeries series;             // truncated table (spec representation)
    std::vector<GroupLikeAtom> exact; // exact group-like decomposition
    GroupLikeAtom qatom;              // Q_B^(a) part
    std::vector<EulerFactorAt> euler; // F_B^(a) part, unexpanded
    bool in_xi = false;
    Padic specialize_exact(const ArithmeticPoint& pt) const;
};

/// the unit-character/diamond-bracket factor Q_B^(a); zero series off Xi_p
IwasawaSeries q_b_character_factor(const HalfIntegralMatrix& B, const FamilyConfig& cfg);

/// Q_B^(a) * F_B^(a) with F evaluated at <l>^(a) l^{-2}
FamilyCoefficient family_coefficient(const HalfIntegralMatrix& B, const FamilyConfig& cfg,
                                    bool with_series = true);

/// classical-side coefficient of G^{[kP]}_{k1,k2,k3} at B (Cor.-style direct
/// evaluation); requires a balanced critical point
Padic direct_coefficient(const HalfIntegralMatrix& B, const ArithmeticPoint& pt,
                         const FamilyConfig& cfg);

struct QExpansion {
    long p = 5;
    Caps caps{3, 3, 3, 3};
    long prec = 30;
    long diag_bound = 0;
    std::map<std::array<long, 3>, IwasawaSeries> terms;
};

QExpansion q_expansion(const FamilyConfig& cfg, long diag_bound);

/// direct (classical) expansion at a point, same diagonal grouping
std::map<std::array<long, 3>, Padic> direct_expansion(const FamilyConfig& cfg, long diag_bound,
                                                      const ArithmeticPoint& pt);

} // namespace teis

#endif
