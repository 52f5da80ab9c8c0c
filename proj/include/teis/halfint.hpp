#ifndef TEIS_HALFINT_HPP
#define TEIS_HALFINT_HPP

#include "teis/padic.hpp"
#include <array>
#include <string>

namespace teis {

/// Half-integral symmetric matrix of size n <= 3: integer diagonal b_ii and
/// integer doubled off-diagonals c_ij = 2 b_ij.  For n < 3 trailing entries
/// are zero and ignored.
struct HalfIntegralMatrix {
    int n = 3;
    std::array<long, 3> b{0, 0, 0};   // b11, b22, b33
    std::array<long, 3> c{0, 0, 0};   // c23, c13, c12

    static HalfIntegralMatrix rank1(long b11);
    static HalfIntegralMatrix rank2(long b11, long b22, long c12);
    static HalfIntegralMatrix rank3(long b11, long b22, long b33, long c23, long c13, long c12);

    /// integer matrix 2B
    std::array<std::array<mpz_class, 3>, 3> doubled() const;
    mpz_class det2B() const;
    bool positive_definite() const; // of 2B, by leading principal minors
    /// diagonal in pZ, off-diagonals p-units (n = 3 only)
    bool in_Xi_p(long p) const;

    /// value of the quadratic form: v^t B v (integral for integer v)
    mpz_class qform(const std::array<mpz_class, 3>& v) const;
    /// v^t (2B) w
    mpz_class bilinear2(const std::array<mpz_class, 3>& v, const std::array<mpz_class, 3>& w) const;

    bool operator==(const HalfIntegralMatrix& o) const = default;
    std::string str() const;
};

} // namespace teis

#endif
