#ifndef TEIS_PADIC_HPP
#define TEIS_PADIC_HPP

#include <gmpxx.h>
#include <stdexcept>
#include <string>

namespace teis {

struct domain_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct unsupported_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct resource_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct internal_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

long valuation(const mpz_class& n, long p);
mpz_class pow_z(long p, long e);
mpz_class inv_mod(const mpz_class& a, const mpz_class& m);

/// Element of Q_p at fixed relative precision: p^val * unit with unit in
/// [0, p^prec) coprime to p. Zero is unit == 0; val then records the
/// absolute precision O(p^val) to which the value is known to vanish.
class Padic {
public:
    Padic() : p_(0), val_(0), prec_(0), unit_(0) {}
    Padic(long p, long val, mpz_class unit, long prec);

    static Padic zero(long p, long abs_prec);
    static Padic from_integer(const mpz_class& n, long p, long prec);
    static Padic from_rational(const mpq_class& q, long p, long prec);

    long p() const { return p_; }
    /// context (relative) precision; for a zero value this is the absolute
    /// precision to which it is known to vanish
    long prec() const { return is_zero() ? val_ : prec_; }
    const mpz_class& unit() const { return unit_; }
    bool is_zero() const { return unit_ == 0; }
    long val() const;
    /// exponent A such that the value is only known modulo p^A
    long abs_prec() const { return is_zero() ? val_ : val_ + prec_; }
    bool is_unit() const { return !is_zero() && val_ == 0; }

    Padic operator-() const;
    Padic operator+(const Padic& o) const;
    Padic operator-(const Padic& o) const;
    Padic operator*(const Padic& o) const;
    Padic operator/(const Padic& o) const;
    Padic inv() const;
    Padic pow(const mpz_class& e) const;

    /// canonical representative in [0, p^A) of the value mod p^A
    mpz_class lift(long A) const;
    /// v_p(x - y) >= m, with both known to at least O(p^m)
    bool equals_mod(const Padic& o, long m) const;

    std::string str() const;

private:
    long p_;
    long val_;
    long prec_;
    mpz_class unit_;
    void normalize();
};

/// Teichmueller lift: the unique (p-1)-st root of unity congruent to a mod p.
Padic teichmuller(const mpz_class& a, long p, long prec);

/// Iwasawa-branch p-adic logarithm: log(p) = 0, log(x) = log<x> for the
/// 1+pZ_p part <x> = x * omega(x)^{-1} of a unit.  Input must be nonzero.
Padic padic_log(const Padic& x);

/// <z> = z * omega(z)^{-1} in 1 + pZ_p, for a p-adic unit z.
Padic one_unit_part(const Padic& z);
Padic one_unit_part(const mpz_class& z, long p, long prec);

} // namespace teis

#endif
