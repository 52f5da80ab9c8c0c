#include "teis/iwasawa.hpp"
#include <algorithm>
#include <map>
#include <tuple>

namespace teis {

long ArithmeticPoint::kmax() const { return std::max(k1, std::max(k2, k3)); }

bool ArithmeticPoint::balanced() const { return k1 + k2 + k3 > 2 * kmax(); }

bool ArithmeticPoint::critical() const {
    return kmax() <= kP && kP <= k1 + k2 + k3 - kmax() - 2;
}

IwasawaSeries::IwasawaSeries(long p, Caps caps, long prec)
    : p_(p), prec_(prec), caps_(caps) {
    for (long d : caps_)
        if (d < 0) throw domain_error("IwasawaSeries: negative cap");
    size_t n = 1;
    for (long d : caps_) n *= size_t(d + 1);
    c_.assign(n, Padic::zero(p, prec));
}

size_t IwasawaSeries::idx(long e1, long e2, long e3, long eT) const {
    return ((size_t(e1) * (caps_[1] + 1) + e2) * (caps_[2] + 1) + e3) * (caps_[3] + 1) + eT;
}

IwasawaSeries IwasawaSeries::constant(const Padic& c, Caps caps) {
    IwasawaSeries f(c.p(), caps, c.prec());
    f.set(0, 0, 0, 0, c);
    return f;
}

IwasawaSeries IwasawaSeries::one(long p, Caps caps, long prec) {
    return constant(Padic(p, 0, 1, prec), caps);
}

const Padic& IwasawaSeries::at(long e1, long e2, long e3, long eT) const {
    return c_[idx(e1, e2, e3, eT)];
}

void IwasawaSeries::set(long e1, long e2, long e3, long eT, const Padic& c) {
    c_[idx(e1, e2, e3, eT)] = c;
}

IwasawaSeries IwasawaSeries::operator+(const IwasawaSeries& o) const {
    if (caps_ != o.caps_) throw domain_error("IwasawaSeries: cap mismatch");
    IwasawaSeries r = *this;
    for (size_t i = 0; i < c_.size(); ++i) r.c_[i] = r.c_[i] + o.c_[i];
    return r;
}

IwasawaSeries IwasawaSeries::operator-(const IwasawaSeries& o) const {
    if (caps_ != o.caps_) throw domain_error("IwasawaSeries: cap mismatch");
    IwasawaSeries r = *this;
    for (size_t i = 0; i < c_.size(); ++i) r.c_[i] = r.c_[i] - o.c_[i];
    return r;
}

IwasawaSeries IwasawaSeries::operator*(const IwasawaSeries& o) const {
    if (caps_ != o.caps_) throw domain_error("IwasawaSeries: cap mismatch");
    IwasawaSeries r(p_, caps_, std::min(prec_, o.prec_));
    for (long a1 = 0; a1 <= caps_[0]; ++a1)
    for (long a2 = 0; a2 <= caps_[1]; ++a2)
    for (long a3 = 0; a3 <= caps_[2]; ++a3)
    for (long aT = 0; aT <= caps_[3]; ++aT) {
        const Padic& x = at(a1, a2, a3, aT);
        for (long b1 = 0; a1 + b1 <= caps_[0]; ++b1)
        for (long b2 = 0; a2 + b2 <= caps_[1]; ++b2)
        for (long b3 = 0; a3 + b3 <= caps_[2]; ++b3)
        for (long bT = 0; aT + bT <= caps_[3]; ++bT) {
            const Padic& y = o.at(b1, b2, b3, bT);
            size_t k = r.idx(a1 + b1, a2 + b2, a3 + b3, aT + bT);
            r.c_[k] = r.c_[k] + x * y;
        }
    }
    return r;
}

IwasawaSeries IwasawaSeries::scale(const Padic& c) const {
    IwasawaSeries r = *this;
    for (auto& x : r.c_) x = x * c;
    return r;
}

IwasawaSeries IwasawaSeries::inv() const {
    const Padic& c0 = at(0, 0, 0, 0);
    if (c0.is_zero() || c0.val() != 0)
        throw domain_error("IwasawaSeries::inv: constant term not a unit");
    // Newton iteration g <- g(2 - fg) doubles correct total degree
    IwasawaSeries g = constant(c0.inv(), caps_);
    long total = caps_[0] + caps_[1] + caps_[2] + caps_[3];
    IwasawaSeries two = constant(Padic(p_, 0, 2, prec_), caps_);
    long got = 0;
    while (got < total) {
        g = g * (two - *this * g);
        got = got * 2 + 1;
    }
    return g;
}

IwasawaSeries IwasawaSeries::pow(long e) const {
    if (e < 0) return inv().pow(-e);
    IwasawaSeries r = one(p_, caps_, prec_);
    IwasawaSeries b = *this;
    while (e > 0) {
        if (e & 1) r = r * b;
        b = b * b;
        e >>= 1;
    }
    return r;
}

Padic IwasawaSeries::specialize(const ArithmeticPoint& pt) const {
    if (!pt.trivial_eps)
        throw unsupported_error("specialize: nontrivial finite parts not supported in v1");
    // values u^k - 1 with u = 1+p
    mpz_class u = mpz_class(1) + p_;
    auto value = [&](long k) {
        mpz_class uk;
        mpz_powm_ui(uk.get_mpz_t(), u.get_mpz_t(), (unsigned long)k, pow_z(p_, prec_ + 2).get_mpz_t());
        return Padic::from_integer(uk - 1, p_, prec_);
    };
    std::array<Padic, 4> x = {value(pt.k1), value(pt.k2), value(pt.k3), value(pt.kP)};
    Padic acc = Padic::zero(p_, prec_);
    for (long e1 = 0; e1 <= caps_[0]; ++e1)
    for (long e2 = 0; e2 <= caps_[1]; ++e2)
    for (long e3 = 0; e3 <= caps_[2]; ++e3)
    for (long eT = 0; eT <= caps_[3]; ++eT) {
        const Padic& co = at(e1, e2, e3, eT);
        if (co.is_zero()) continue;
        Padic m = co;
        m = m * x[0].pow(e1) * x[1].pow(e2) * x[2].pow(e3) * x[3].pow(eT);
        acc = acc + m;
    }
    return acc;
}

std::vector<std::pair<std::array<long, 4>, Padic>> IwasawaSeries::entries() const {
    std::vector<std::pair<std::array<long, 4>, Padic>> out;
    for (long e1 = 0; e1 <= caps_[0]; ++e1)
    for (long e2 = 0; e2 <= caps_[1]; ++e2)
    for (long e3 = 0; e3 <= caps_[2]; ++e3)
    for (long eT = 0; eT <= caps_[3]; ++eT) {
        const Padic& co = at(e1, e2, e3, eT);
        if (co.is_zero()) continue;
        out.push_back({{e1, e2, e3, eT}, co});
    }
    return out;
}

bool IwasawaSeries::equals_mod(const IwasawaSeries& o, long m) const {
    if (caps_ != o.caps_) return false;
    for (long e1 = 0; e1 <= caps_[0]; ++e1)
    for (long e2 = 0; e2 <= caps_[1]; ++e2)
    for (long e3 = 0; e3 <= caps_[2]; ++e3)
    for (long eT = 0; eT <= caps_[3]; ++eT)
        if (!at(e1, e2, e3, eT).equals_mod(o.at(e1, e2, e3, eT), m)) return false;
    return true;
}

Padic padic_binomial(const Padic& s, long j) {
    long p = s.p();
    Padic r(p, 0, 1, s.prec());
    for (long i = 0; i < j; ++i)
        r = r * (s - Padic::from_integer(i, p, s.prec()));
    mpz_class fact = 1;
    for (long i = 2; i <= j; ++i) fact *= i;
    return r / Padic::from_integer(fact, p, s.prec());
}

Padic diamond_exponent(const mpz_class& z, long p, long prec) {
    if (z == 0 || valuation(z, p) != 0) throw domain_error("diamond_exponent: not a unit");
    static std::map<std::tuple<long, long, mpz_class>, Padic> memo;
    mpz_class zr = z % pow_z(p, prec);
    if (zr < 0) zr += pow_z(p, prec);
    auto key = std::make_tuple(p, prec, zr);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    Padic zu = one_unit_part(z, p, prec);
    Padic lu = padic_log(Padic::from_integer(mpz_class(1) + p, p, prec));
    Padic s = padic_log(zu) / lu;
    memo.emplace(key, s);
    return s;
}

IwasawaSeries diamond_bracket(const mpz_class& z, Var var, long p, Caps caps, long prec) {
    Padic s = diamond_exponent(z, p, prec);
    IwasawaSeries f(p, caps, prec);
    long d = caps[size_t(var)];
    for (long j = 0; j <= d; ++j) {
        Padic c = padic_binomial(s, j);
        long e[4] = {0, 0, 0, 0};
        e[size_t(var)] = j;
        f.set(e[0], e[1], e[2], e[3], c);
    }
    return f;
}

} // namespace teis
