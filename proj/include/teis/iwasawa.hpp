#ifndef TEIS_IWASAWA_HPP
#define TEIS_IWASAWA_HPP

#include "teis/padic.hpp"
#include <array>
#include <vector>

namespace teis {

enum class Var { X1 = 0, X2 = 1, X3 = 2, T = 3 };

using Caps = std::array<long, 4>;

/// Arithmetic point: weights (k1,k2,k3) >= 2 and cyclotomic weight kP,
/// trivial finite parts in this build.
struct ArithmeticPoint {
    long k1 = 2, k2 = 2, k3 = 2, kP = 2;
    bool trivial_eps = true;

    long kmax() const;
    bool balanced() const;
    bool critical() const; // kmax <= kP <= k1+k2+k3-kmax-2
};

/// Truncated formal power series in X1,X2,X3,T over Q_p; multiplication
/// truncates to the per-variable degree caps.
class IwasawaSeries {
public:
    IwasawaSeries(long p, Caps caps, long prec);

    long p() const { return p_; }
    long prec() const { return prec_; }
    const Caps& caps() const { return caps_; }

    static IwasawaSeries constant(const Padic& c, Caps caps);
    static IwasawaSeries one(long p, Caps caps, long prec);

    const Padic& at(long e1, long e2, long e3, long eT) const;
    void set(long e1, long e2, long e3, long eT, const Padic& c);

    IwasawaSeries operator+(const IwasawaSeries& o) const;
    IwasawaSeries operator-(const IwasawaSeries& o) const;
    IwasawaSeries operator*(const IwasawaSeries& o) const;
    IwasawaSeries scale(const Padic& c) const;

    /// inverse of a series with unit constant term
    IwasawaSeries inv() const;
    IwasawaSeries pow(long e) const;

    /// substitute X_i -> u^{k_i} eps_i(u) - 1, T -> u^{kP} eps_P(u) - 1 and
    /// evaluate.  Exact only up to the truncation's declared precision.
    Padic specialize(const ArithmeticPoint& pt) const;

    /// entries as (e1,e2,e3,eT,coeff), lexicographic, zeros skipped
    std::vector<std::pair<std::array<long, 4>, Padic>> entries() const;

    bool equals_mod(const IwasawaSeries& o, long m) const;

private:
    long p_, prec_;
    Caps caps_;
    std::vector<Padic> c_;
    size_t idx(long e1, long e2, long e3, long eT) const;
};

/// The group-like element <z>_var = (1+var)^{log_p<z>/log_p u}, truncated.
IwasawaSeries diamond_bracket(const mpz_class& z, Var var, long p, Caps caps, long prec);

/// s = log_p<z> / log_p(1+p), memoized
Padic diamond_exponent(const mpz_class& z, long p, long prec);

/// binomial coefficient C(s, j) for p-adic s
Padic padic_binomial(const Padic& s, long j);

} // namespace teis

#endif
