#ifndef TEIS_LOCALFACTORS_HPP
#define TEIS_LOCALFACTORS_HPP

#include "teis/padic.hpp"
#include "teis/halfint.hpp"
#include <array>
#include <optional>
#include <vector>

namespace teis {

/// element a + b sqrt(q) of the quadratic extension Q(sqrt q)
struct QuadExt {
    mpq_class a = 0, b = 0;
    long q = 0;

    QuadExt() = default;
    QuadExt(mpq_class a_, long q_) : a(std::move(a_)), q(q_) {}
    QuadExt(mpq_class a_, mpq_class b_, long q_) : a(std::move(a_)), b(std::move(b_)), q(q_) {}
    static QuadExt sqrt_q(long q) { return QuadExt(0, 1, q); }

    bool is_zero() const { return a == 0 && b == 0; }
    QuadExt operator+(const QuadExt& o) const;
    QuadExt operator-(const QuadExt& o) const;
    QuadExt operator*(const QuadExt& o) const;
    QuadExt inv() const;
    QuadExt operator/(const QuadExt& o) const { return *this * o.inv(); }
    bool operator==(const QuadExt& o) const;
    QuadExt pow(long e) const;
    std::string str() const;
};

/// polynomial in t over Q(sqrt q)
struct PolyT {
    std::vector<QuadExt> c;
    long q = 0;

    static PolyT one(long q);
    static PolyT linear(const QuadExt& a0, const QuadExt& a1); // a0 + a1 t
    long deg() const { return long(c.size()) - 1; }
    void trim();
    PolyT operator+(const PolyT& o) const;
    PolyT operator-(const PolyT& o) const;
    PolyT operator*(const PolyT& o) const;
    bool is_zero() const;
    QuadExt eval(const QuadExt& t) const;
};

PolyT poly_gcd(PolyT A, PolyT B);

/// rational function in t = q^{-s}, reduced canonical form
struct RationalFunctionT {
    PolyT num, den;

    static RationalFunctionT one(long q);
    static RationalFunctionT from_poly(PolyT p);
    RationalFunctionT operator*(const RationalFunctionT& o) const;
    RationalFunctionT inv() const;
    void reduce(); // divide by gcd, normalize den (unit constant term or lead)
    bool equals(const RationalFunctionT& o) const;
    /// substitute t -> q^{-1} t^{-1} (i.e. s -> 1-s)
    RationalFunctionT subs_s_to_1ms() const;
    QuadExt eval(const QuadExt& t) const;
    std::string str() const;
};

/// unramified principal series I(mu, nu) or unramified twist of Steinberg;
/// uniformized as a subrepresentation of I(mu, nu) with mu unramified,
/// mu(pi) = alpha q^{-1/2}, nu(pi) = beta q^{-1/2} in the arithmetic scale
struct LocalRepGL2 {
    long q = 0;
    bool steinberg = false;
    QuadExt alpha, beta; // arithmetic Satake values; Steinberg: beta = q alpha

    static LocalRepGL2 principal_series(long q, const mpq_class& alpha, const mpq_class& beta);
    static LocalRepGL2 steinberg_twist(long q, const mpq_class& xi); // xi = +-1 etc.

    QuadExt mu() const;      // mu(pi)
    QuadExt nu() const;      // nu(pi)
    QuadExt omega() const;   // central character at pi
};

/// L(s, pi1 x pi2 x pi3 (x) chi) for unramified chi with chi(pi) = c
RationalFunctionT triple_L(const std::array<LocalRepGL2, 3>& reps, const QuadExt& c);

/// epsilon factor (monomial) per the multiplicative degeneration table
RationalFunctionT triple_epsilon(const std::array<LocalRepGL2, 3>& reps, const QuadExt& c);

/// gamma(s, chi, psi) for unramified chi with chi(pi) = c, psi of order 0
RationalFunctionT gamma_gl1(const QuadExt& c, long q);

/// modified Euler factor E_p of the triple product
RationalFunctionT modified_euler_Ep(const std::array<LocalRepGL2, 3>& reps, const QuadExt& c);

/// E_p(1-s, dual twist) == omega_hat(-1) E_p(s) eps(s) as reduced rational
/// functions
bool functional_equation_check(const std::array<LocalRepGL2, 3>& reps, const QuadExt& c);

// --- p-adic side (exact value and vanishing order at the central point) ---

/// unit-times-half-power coefficient u p^(h/2); products only
struct PadicHalf {
    Padic u;
    long h = 0;
    PadicHalf mul(const PadicHalf& o) const;
    PadicHalf inv() const;
};

/// E_p as a factored product prod (1 - V_f t^{eps_f})^{e_f}
struct FactoredEp {
    struct Factor {
        PadicHalf V;
        int tpow; // +1: coefficient of t, -1: of t^{-1}
        int exp;  // +-1
    };
    std::vector<Factor> factors;
    long p = 0;
    long prec = 0;

    /// order of vanishing at t = p^{-1/2} and the nonvanishing part's value
    std::pair<long, Padic> central_order_and_leading(long eq_prec) const;
};

struct LocalRepP {
    bool steinberg = false;
    Padic alpha; // unit root (good ordinary) or +-1 (multiplicative)
};

FactoredEp modified_euler_Ep_padic(const std::array<LocalRepP, 3>& reps, long p, long prec);

/// degenerate Whittaker value of the p-adic section attached to
/// D = (chi, omega1, omega2, omega3) given by Teichmueller exponents,
/// computed through explicit Fourier transforms in Z_p[zeta_p]
Padic whittaker_value_p(const HalfIntegralMatrix& B, std::array<long, 4> teich_exps, long p,
                        long prec);

} // namespace teis

#endif
