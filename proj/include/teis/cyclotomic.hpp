#ifndef TEIS_CYCLOTOMIC_HPP
#define TEIS_CYCLOTOMIC_HPP

#include "teis/padic.hpp"
#include <vector>
#include <optional>

namespace teis {

/// Element of K[x]/(Phi_m(x)) for m = q^r a prime power, stored in the
/// group-ring basis 1, z, ..., z^{m-1} (z the chosen primitive m-th root)
/// and reduced through x^m = 1.  Canonical form divides out Phi_m.
/// K is mpq_class or Padic.
template <class K>
class Cyclotomic {
public:
    Cyclotomic(long q, long r, K zero);

    long modulus() const { return m_; }
    long phi() const { return phi_; }

    static Cyclotomic root_power(long q, long r, long e, const K& one, const K& zero);

    void add_root_power(long e, const K& c); // += c * z^e
    Cyclotomic operator+(const Cyclotomic& o) const;
    Cyclotomic operator-(const Cyclotomic& o) const;
    Cyclotomic operator*(const Cyclotomic& o) const;
    Cyclotomic scale(const K& c) const;

    /// canonical coefficients of degree < phi(m) after reduction mod Phi_m
    std::vector<K> canonical() const;
    /// the rational (degree-zero) value, if all higher canonical
    /// coefficients vanish
    std::optional<K> rational_value() const;

private:
    long q_, r_, m_, phi_;
    K zero_;
    std::vector<K> c_; // size m_, exponents of z
};

using CycQ = Cyclotomic<mpq_class>;
using CycP = Cyclotomic<Padic>;

bool cyc_is_zero(const mpq_class& x);
bool cyc_is_zero(const Padic& x);

} // namespace teis

#endif
