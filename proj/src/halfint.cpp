#include "teis/halfint.hpp"
#include <sstream>

namespace teis {

HalfIntegralMatrix HalfIntegralMatrix::rank1(long b11) {
    HalfIntegralMatrix m;
    m.n = 1;
    m.b = {b11, 0, 0};
    return m;
}

HalfIntegralMatrix HalfIntegralMatrix::rank2(long b11, long b22, long c12) {
    HalfIntegralMatrix m;
    m.n = 2;
    m.b = {b11, b22, 0};
    m.c = {0, 0, c12};
    return m;
}

HalfIntegralMatrix HalfIntegralMatrix::rank3(long b11, long b22, long b33, long c23, long c13, long c12) {
    HalfIntegralMatrix m;
    m.n = 3;
    m.b = {b11, b22, b33};
    m.c = {c23, c13, c12};
    return m;
}

std::array<std::array<mpz_class, 3>, 3> HalfIntegralMatrix::doubled() const {
    std::array<std::array<mpz_class, 3>, 3> M;
    for (auto& row : M) row = {mpz_class(0), mpz_class(0), mpz_class(0)};
    for (int i = 0; i < n; ++i) M[i][i] = 2 * b[i];
    if (n >= 2) M[0][1] = M[1][0] = c[2];
    if (n >= 3) {
        M[0][2] = M[2][0] = c[1];
        M[1][2] = M[2][1] = c[0];
    }
    return M;
}

mpz_class HalfIntegralMatrix::det2B() const {
    auto M = doubled();
    if (n == 1) return M[0][0];
    if (n == 2) return M[0][0] * M[1][1] - M[0][1] * M[1][0];
    return M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1])
         - M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0])
         + M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0]);
}

bool HalfIntegralMatrix::positive_definite() const {
    auto M = doubled();
    if (M[0][0] <= 0) return false;
    if (n == 1) return true;
    mpz_class m2 = M[0][0] * M[1][1] - M[0][1] * M[1][0];
    if (m2 <= 0) return false;
    if (n == 2) return true;
    return det2B() > 0;
}

bool HalfIntegralMatrix::in_Xi_p(long p) const {
    if (n != 3) return false;
    for (int i = 0; i < 3; ++i) {
        if (b[i] % p != 0) return false;
        if (c[i] % p == 0) return false;
    }
    return true;
}

mpz_class HalfIntegralMatrix::qform(const std::array<mpz_class, 3>& v) const {
    mpz_class s = 0;
    for (int i = 0; i < n; ++i) s += b[i] * v[i] * v[i];
    if (n >= 2) s += c[2] * v[0] * v[1];
    if (n >= 3) {
        s += c[1] * v[0] * v[2];
        s += c[0] * v[1] * v[2];
    }
    return s;
}

mpz_class HalfIntegralMatrix::bilinear2(const std::array<mpz_class, 3>& v, const std::array<mpz_class, 3>& w) const {
    auto M = doubled();
    mpz_class s = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) s += v[i] * M[i][j] * w[j];
    return s;
}

std::string HalfIntegralMatrix::str() const {
    std::ostringstream os;
    os << "[n=" << n << "; b=" << b[0] << "," << b[1] << "," << b[2]
       << "; c=" << c[0] << "," << c[1] << "," << c[2] << "]";
    return os.str();
}

} // namespace teis
