#include "teis/padic.hpp"
#include <map>
#include <tuple>

namespace teis {

long valuation(const mpz_class& n, long p) {
    if (n == 0) throw domain_error("valuation of zero");
    mpz_class m = n;
    long v = 0;
    while (mpz_divisible_ui_p(m.get_mpz_t(), p)) {
        mpz_divexact_ui(m.get_mpz_t(), m.get_mpz_t(), p);
        ++v;
    }
    return v;
}

const mpz_class& pow_z_cached(long p, long e) {
    static std::map<std::pair<long, long>, mpz_class> memo;
    auto key = std::make_pair(p, e);
    auto it = memo.find(key);
    if (it == memo.end()) {
        mpz_class r;
        mpz_ui_pow_ui(r.get_mpz_t(), p, e);
        it = memo.emplace(key, r).first;
    }
    return it->second;
}

mpz_class pow_z(long p, long e) {
    if (e < 0) throw domain_error("pow_z: negative exponent");
    return pow_z_cached(p, e);
}

mpz_class inv_mod(const mpz_class& a, const mpz_class& m) {
    mpz_class r;
    if (mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t()) == 0)
        throw domain_error("inv_mod: not invertible");
    return r;
}

Padic::Padic(long p, long val, mpz_class unit, long prec)
    : p_(p), val_(val), prec_(prec), unit_(std::move(unit)) {
    if (p < 3) throw domain_error("Padic: prime must be odd");
    if (prec < 1) throw domain_error("Padic: precision must be positive");
    normalize();
}

void Padic::normalize() {
    mpz_class pN = pow_z(p_, prec_);
    unit_ = ((unit_ % pN) + pN) % pN;
    if (unit_ == 0) {
        val_ += prec_;
        prec_ = 1;
        return;
    }
    long v = valuation(unit_, p_);
    if (v > 0) {
        // shift p-part of the residue into the valuation; relative
        // precision drops: the value was known mod p^(val+prec) only
        mpz_divexact(unit_.get_mpz_t(), unit_.get_mpz_t(), pow_z(p_, v).get_mpz_t());
        val_ += v;
        prec_ -= v;
        if (prec_ <= 0) {
            // indistinguishable from zero at this precision
            long abs = val_ + prec_;
            unit_ = 0;
            val_ = abs;
            prec_ = 1;
            return;
        }
        unit_ %= pow_z(p_, prec_);
    }
}

Padic Padic::zero(long p, long abs_prec) {
    Padic z;
    z.p_ = p;
    z.val_ = abs_prec;
    z.prec_ = 1;
    z.unit_ = 0;
    return z;
}

Padic Padic::from_integer(const mpz_class& n, long p, long prec) {
    if (n == 0) return zero(p, prec);
    long v = valuation(n, p);
    mpz_class u = n / pow_z(p, v);
    return Padic(p, v, u % pow_z(p, prec), prec);
}

Padic Padic::from_rational(const mpq_class& q, long p, long prec) {
    if (q == 0) return zero(p, prec);
    mpz_class num = q.get_num(), den = q.get_den();
    long v = valuation(num, p) - valuation(den, p);
    mpz_class pv;
    num /= pow_z(p, valuation(num, p));
    den /= pow_z(p, valuation(den, p));
    mpz_class pN = pow_z(p, prec);
    mpz_class u = (num % pN) * inv_mod(den % pN, pN) % pN;
    return Padic(p, v, u, prec);
}

long Padic::val() const {
    if (is_zero()) throw domain_error("val of (indistinguishable-from-)zero");
    return val_;
}

Padic Padic::operator-() const {
    if (is_zero()) return *this;
    return Padic(p_, val_, pow_z(p_, prec_) - unit_, prec_);
}

Padic Padic::operator+(const Padic& o) const {
    if (p_ != o.p_) throw domain_error("mixed primes");
    long A = std::min(abs_prec(), o.abs_prec());
    if (is_zero() && o.is_zero()) return zero(p_, A);
    if (is_zero()) {
        Padic r = o;
        if (r.val_ + r.prec_ > A) r.prec_ = A - r.val_;
        if (r.prec_ <= 0) return zero(p_, A);
        r.unit_ %= pow_z(p_, r.prec_);
        r.normalize();
        return r;
    }
    if (o.is_zero()) return o + *this;
    long v = std::min(val_, o.val_);
    if (A - v <= 0) return zero(p_, A);
    mpz_class mod = pow_z(p_, A - v);
    mpz_class s = unit_ * pow_z(p_, val_ - v) + o.unit_ * pow_z(p_, o.val_ - v);
    s %= mod;
    if (s == 0) return zero(p_, A);
    return Padic(p_, v, s, A - v);
}

Padic Padic::operator-(const Padic& o) const { return *this + (-o); }

Padic Padic::operator*(const Padic& o) const {
    if (p_ != o.p_) throw domain_error("mixed primes");
    if (is_zero() || o.is_zero()) {
        // v(xy) >= v-bound(x) + val(y) etc.; conservative absolute bound
        long a = is_zero() ? val_ : val_;
        long b = o.is_zero() ? o.val_ : o.val_;
        return zero(p_, a + b);
    }
    long N = std::min(prec_, o.prec_);
    mpz_class u = unit_ * o.unit_ % pow_z(p_, N);
    return Padic(p_, val_ + o.val_, u, N);
}

Padic Padic::inv() const {
    if (is_zero()) throw domain_error("inverse of zero");
    return Padic(p_, -val_, inv_mod(unit_, pow_z(p_, prec_)), prec_);
}

Padic Padic::operator/(const Padic& o) const { return *this * o.inv(); }

Padic Padic::pow(const mpz_class& e) const {
    if (e < 0) return inv().pow(-e);
    if (e == 0) {
        if (p_ == 0) throw domain_error("pow of uninitialized");
        return Padic(p_, 0, 1, is_zero() ? 1 : prec_);
    }
    if (is_zero()) return zero(p_, val_); // crude; enough for e >= 1
    mpz_class u;
    mpz_powm(u.get_mpz_t(), unit_.get_mpz_t(), e.get_mpz_t(), pow_z(p_, prec_).get_mpz_t());
    mpz_class v = val_ * e;
    if (!v.fits_slong_p()) throw resource_error("pow: valuation overflow");
    return Padic(p_, v.get_si(), u, prec_);
}

mpz_class Padic::lift(long A) const {
    if (is_zero()) {
        if (val_ < A) throw domain_error("lift: zero not known to requested precision");
        return 0;
    }
    if (val_ < 0) throw domain_error("lift: negative valuation");
    if (abs_prec() < A) throw domain_error("lift: insufficient precision");
    mpz_class r = unit_ * pow_z(p_, val_);
    return r % pow_z(p_, A);
}

bool Padic::equals_mod(const Padic& o, long m) const {
    Padic d = *this - o;
    if (d.is_zero()) return d.val_ >= m;
    return d.val_ >= m;
}

std::string Padic::str() const {
    if (is_zero()) return "O(" + std::to_string(p_) + "^" + std::to_string(val_) + ")";
    return unit_.get_str() + "*" + std::to_string(p_) + "^" + std::to_string(val_) +
           " + O(" + std::to_string(p_) + "^" + std::to_string(abs_prec()) + ")";
}

Padic teichmuller(const mpz_class& a, long p, long prec) {
    if (mpz_divisible_ui_p(a.get_mpz_t(), p)) throw domain_error("teichmuller: not a unit");
    mpz_class pN = pow_z(p, prec);
    mpz_class x = ((a % pN) + pN) % pN;
    static std::map<std::tuple<long, long, mpz_class>, Padic> memo;
    auto key = std::make_tuple(p, prec, x);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    const mpz_class x0 = x;
    for (long i = 0; i <= prec + 1; ++i) {
        mpz_class y;
        mpz_powm_ui(y.get_mpz_t(), x.get_mpz_t(), p, pN.get_mpz_t());
        if (y == x) break;
        x = y;
    }
    Padic r(p, 0, x, prec);
    memo.emplace(std::make_tuple(p, prec, x0), r);
    return r;
}

Padic one_unit_part(const Padic& z) {
    if (z.is_zero() || z.val() != 0) throw domain_error("one_unit_part: not a unit");
    Padic w = teichmuller(z.unit(), z.p(), z.prec());
    return z * w.inv();
}

Padic one_unit_part(const mpz_class& z, long p, long prec) {
    if (z == 0) throw domain_error("one_unit_part: zero");
    if (valuation(z, p) != 0) throw domain_error("one_unit_part: not a unit");
    return one_unit_part(Padic(p, 0, z, prec));
}

Padic padic_log(const Padic& x0) {
    if (x0.is_zero()) throw domain_error("padic_log: zero");
    long p = x0.p();
    long N = x0.prec();
    // Iwasawa branch: drop p^val and the Teichmueller root of unity
    Padic u = Padic(p, 0, x0.unit(), N);
    Padic x = one_unit_part(u);
    // now x = 1 + t with v(t) >= 1
    Padic t = x - Padic(p, 0, 1, N);
    if (t.is_zero()) return Padic::zero(p, t.abs_prec());
    if (t.val() < 1) throw domain_error("padic_log: not in 1+pZ_p after unit split");
    long guard = 2;
    while (pow_z(p, guard) < N + 2 * guard + 4) ++guard; // log_p bound on term count
    long Nw = N + guard;
    Padic tw(p, t.val(), t.unit(), std::min<long>(t.prec(), Nw));
    long nmax = Nw + guard + 2;
    Padic acc = Padic::zero(p, Nw);
    Padic tn = tw;
    for (long n = 1; n <= nmax; ++n) {
        Padic term = tn / Padic::from_integer(n, p, Nw);
        if (n % 2 == 0) term = -term;
        acc = acc + term;
        tn = tn * tw;
        if (tn.is_zero() || tn.val() > Nw) break;
    }
    // report at the requested absolute precision
    if (acc.is_zero()) return Padic::zero(p, N);
    long keep = std::min<long>(acc.prec(), N);
    return Padic(p, acc.val(), acc.unit() % pow_z(p, keep), keep);
}

} // namespace teis
