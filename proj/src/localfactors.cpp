#include "teis/localfactors.hpp"
#include "teis/cyclotomic.hpp"
#include "teis/family.hpp"
#include <sstream>

namespace teis {

QuadExt QuadExt::operator+(const QuadExt& o) const {
    if (q != o.q && !is_zero() && !o.is_zero()) throw domain_error("QuadExt: mixed q");
    return QuadExt(a + o.a, b + o.b, q ? q : o.q);
}
QuadExt QuadExt::operator-(const QuadExt& o) const {
    if (q != o.q && !is_zero() && !o.is_zero()) throw domain_error("QuadExt: mixed q");
    return QuadExt(a - o.a, b - o.b, q ? q : o.q);
}
QuadExt QuadExt::operator*(const QuadExt& o) const {
    if (q != o.q && !is_zero() && !o.is_zero()) throw domain_error("QuadExt: mixed q");
    long qq = q ? q : o.q;
    return QuadExt(a * o.a + mpq_class(qq) * b * o.b, a * o.b + b * o.a, qq);
}
QuadExt QuadExt::inv() const {
    mpq_class n = a * a - mpq_class(q) * b * b;
    if (n == 0) throw domain_error("QuadExt: inverse of zero");
    return QuadExt(a / n, -b / n, q);
}
bool QuadExt::operator==(const QuadExt& o) const { return a == o.a && b == o.b; }
QuadExt QuadExt::pow(long e) const {
    if (e < 0) return inv().pow(-e);
    QuadExt r(1, q);
    QuadExt x = *this;
    while (e) {
        if (e & 1) r = r * x;
        x = x * x;
        e >>= 1;
    }
    return r;
}
std::string QuadExt::str() const {
    std::ostringstream os;
    os << a;
    if (b != 0) os << "+" << b << "*sqrt(" << q << ")";
    return os.str();
}

PolyT PolyT::one(long q) { return PolyT{{QuadExt(1, q)}, q}; }
PolyT PolyT::linear(const QuadExt& a0, const QuadExt& a1) {
    PolyT p{{a0, a1}, a0.q ? a0.q : a1.q};
    p.trim();
    return p;
}
void PolyT::trim() {
    while (!c.empty() && c.back().is_zero()) c.pop_back();
}
bool PolyT::is_zero() const { return c.empty(); }
PolyT PolyT::operator+(const PolyT& o) const {
    PolyT r = *this;
    if (o.c.size() > r.c.size()) r.c.resize(o.c.size(), QuadExt(0, q));
    for (size_t i = 0; i < o.c.size(); ++i) r.c[i] = r.c[i] + o.c[i];
    r.trim();
    return r;
}
PolyT PolyT::operator-(const PolyT& o) const {
    PolyT r = *this;
    if (o.c.size() > r.c.size()) r.c.resize(o.c.size(), QuadExt(0, q));
    for (size_t i = 0; i < o.c.size(); ++i) r.c[i] = r.c[i] - o.c[i];
    r.trim();
    return r;
}
PolyT PolyT::operator*(const PolyT& o) const {
    if (is_zero() || o.is_zero()) return PolyT{{}, q};
    PolyT r{std::vector<QuadExt>(c.size() + o.c.size() - 1, QuadExt(0, q)), q};
    for (size_t i = 0; i < c.size(); ++i)
        for (size_t j = 0; j < o.c.size(); ++j) r.c[i + j] = r.c[i + j] + c[i] * o.c[j];
    r.trim();
    return r;
}
QuadExt PolyT::eval(const QuadExt& t) const {
    QuadExt r(0, q);
    for (long i = deg(); i >= 0; --i) r = r * t + c[i];
    return r;
}

namespace {
PolyT poly_mod(PolyT A, const PolyT& B) {
    if (B.is_zero()) throw domain_error("poly_mod by zero");
    while (!A.is_zero() && A.deg() >= B.deg()) {
        QuadExt f = A.c.back() / B.c.back();
        long shift = A.deg() - B.deg();
        for (long i = 0; i <= B.deg(); ++i) A.c[i + shift] = A.c[i + shift] - f * B.c[i];
        A.trim();
    }
    return A;
}
} // namespace

PolyT poly_gcd(PolyT A, PolyT B) {
    while (!B.is_zero()) {
        PolyT r = poly_mod(A, B);
        A = B;
        B = r;
    }
    if (!A.is_zero()) {
        QuadExt lead = A.c.back();
        for (auto& x : A.c) x = x / lead;
    }
    return A;
}

RationalFunctionT RationalFunctionT::one(long q) { return {PolyT::one(q), PolyT::one(q)}; }
RationalFunctionT RationalFunctionT::from_poly(PolyT p) {
    long q = p.q;
    return {std::move(p), PolyT::one(q)};
}
RationalFunctionT RationalFunctionT::operator*(const RationalFunctionT& o) const {
    RationalFunctionT r{num * o.num, den * o.den};
    r.reduce();
    return r;
}
RationalFunctionT RationalFunctionT::inv() const {
    if (num.is_zero()) throw domain_error("RationalFunctionT: inverse of zero");
    return {den, num};
}
void RationalFunctionT::reduce() {
    if (num.is_zero()) {
        den = PolyT::one(den.q);
        return;
    }
    PolyT g = poly_gcd(num, den);
    if (g.deg() >= 1) {
        // exact division by g
        auto divex = [&](const PolyT& A) {
            PolyT Q{{}, A.q};
            PolyT R = A;
            Q.c.assign(A.deg() - g.deg() + 1, QuadExt(0, A.q));
            while (!R.is_zero() && R.deg() >= g.deg()) {
                QuadExt f = R.c.back() / g.c.back();
                long shift = R.deg() - g.deg();
                Q.c[shift] = f;
                for (long i = 0; i <= g.deg(); ++i) R.c[i + shift] = R.c[i + shift] - f * g.c[i];
                R.trim();
            }
            if (!R.is_zero()) throw internal_error("RationalFunctionT: non-exact division");
            Q.trim();
            return Q;
        };
        num = divex(num);
        den = divex(den);
    }
    // canonical: make the lowest nonzero coefficient of den equal 1
    for (auto& x : den.c)
        if (!x.is_zero()) {
            QuadExt f = x.inv();
            for (auto& y : num.c) y = y * f;
            for (auto& y : den.c) y = y * f;
            break;
        }
}
bool RationalFunctionT::equals(const RationalFunctionT& o) const {
    PolyT lhs = num * o.den;
    PolyT rhs = o.num * den;
    return (lhs - rhs).is_zero();
}
RationalFunctionT RationalFunctionT::subs_s_to_1ms() const {
    // t -> 1/(q t): f(t) = N(t)/D(t) |-> N(1/(qt)) / D(1/(qt)); clear t-powers
    long q = num.q ? num.q : den.q;
    auto sub = [&](const PolyT& P, long degmax) {
        // t^degmax * P(1/(q t)) = sum_i c_i q^{-i} t^{degmax - i}
        PolyT R{std::vector<QuadExt>(degmax + 1, QuadExt(0, q)), q};
        QuadExt qinv = QuadExt(mpq_class(1, q), q);
        QuadExt w(1, q);
        for (long i = 0; i <= P.deg(); ++i) {
            R.c[degmax - i] = P.c[i] * w;
            w = w * qinv;
        }
        R.trim();
        return R;
    };
    long m = std::max(num.deg(), den.deg());
    RationalFunctionT r{sub(num, m), sub(den, m)};
    r.reduce();
    return r;
}
QuadExt RationalFunctionT::eval(const QuadExt& t) const {
    QuadExt d = den.eval(t);
    if (d.is_zero()) throw domain_error("RationalFunctionT: pole at evaluation point");
    return num.eval(t) / d;
}
std::string RationalFunctionT::str() const {
    std::ostringstream os;
    os << "(";
    for (long i = 0; i <= num.deg(); ++i) os << (i ? " + " : "") << num.c[i].str() << "*t^" << i;
    os << ") / (";
    for (long i = 0; i <= den.deg(); ++i) os << (i ? " + " : "") << den.c[i].str() << "*t^" << i;
    os << ")";
    return os.str();
}

LocalRepGL2 LocalRepGL2::principal_series(long q, const mpq_class& alpha, const mpq_class& beta) {
    LocalRepGL2 r;
    r.q = q;
    r.steinberg = false;
    r.alpha = QuadExt(alpha, q);
    r.beta = QuadExt(beta, q);
    return r;
}
LocalRepGL2 LocalRepGL2::steinberg_twist(long q, const mpq_class& xi) {
    LocalRepGL2 r;
    r.q = q;
    r.steinberg = true;
    r.alpha = QuadExt(xi, q);
    r.beta = QuadExt(xi * q, q);
    return r;
}
QuadExt LocalRepGL2::mu() const {
    // alpha q^{-1/2} = alpha sqrt(q)/q
    return alpha * QuadExt(0, mpq_class(1, q), q);
}
QuadExt LocalRepGL2::nu() const { return beta * QuadExt(0, mpq_class(1, q), q); }
QuadExt LocalRepGL2::omega() const { return alpha * beta * QuadExt(mpq_class(1, q), q); }

namespace {

int count_st(const std::array<LocalRepGL2, 3>& reps) {
    int n = 0;
    for (auto& r : reps) n += r.steinberg;
    return n;
}

// xi(pi) of the Steinberg twist in arithmetic scale: alpha
QuadExt xi_of(const LocalRepGL2& r) { return r.alpha; }

} // namespace

RationalFunctionT triple_L(const std::array<LocalRepGL2, 3>& reps, const QuadExt& c) {
    long q = reps[0].q;
    QuadExt sq_inv(0, mpq_class(1, q), q); // q^{-1/2}
    int nst = count_st(reps);
    PolyT den = PolyT::one(q);
    auto lin = [&](const QuadExt& coeff) {
        return PolyT::linear(QuadExt(1, q), QuadExt(0, q) - coeff);
    };
    if (nst == 0) {
        for (int s1 = 0; s1 < 2; ++s1)
            for (int s2 = 0; s2 < 2; ++s2)
                for (int s3 = 0; s3 < 2; ++s3) {
                    QuadExt x1 = (s1 ? reps[0].beta : reps[0].alpha) * sq_inv;
                    QuadExt x2 = (s2 ? reps[1].beta : reps[1].alpha) * sq_inv;
                    QuadExt x3 = (s3 ? reps[2].beta : reps[2].alpha) * sq_inv;
                    den = den * lin(c * x1 * x2 * x3);
                }
    } else if (nst == 1) {
        int i = 0;
        while (!reps[i].steinberg) ++i;
        int j = (i + 1) % 3, k = (i + 2) % 3;
        QuadExt eta = c * xi_of(reps[i]);
        // L(s + 1/2, pi_j x pi_k (x) eta)
        for (int sj = 0; sj < 2; ++sj)
            for (int sk = 0; sk < 2; ++sk) {
                QuadExt xj = (sj ? reps[j].beta : reps[j].alpha) * sq_inv;
                QuadExt xk = (sk ? reps[k].beta : reps[k].alpha) * sq_inv;
                den = den * lin(eta * xj * xk * sq_inv);
            }
    } else if (nst == 2) {
        int j = 0;
        while (reps[j].steinberg) ++j;
        int i = (j + 1) % 3, k = (j + 2) % 3;
        QuadExt eta = c * xi_of(reps[i]) * xi_of(reps[k]);
        // L(s, pi_j (x) eta) L(s+1, pi_j (x) eta)
        for (int sj = 0; sj < 2; ++sj) {
            QuadExt xj = (sj ? reps[j].beta : reps[j].alpha) * sq_inv;
            den = den * lin(eta * xj);
            den = den * lin(eta * xj * QuadExt(mpq_class(1, q), q));
        }
    } else {
        QuadExt eta = c * xi_of(reps[0]) * xi_of(reps[1]) * xi_of(reps[2]);
        // zeta(s + 3/2) zeta(s + 1/2)^2 twisted
        den = den * lin(eta * sq_inv * sq_inv * sq_inv);
        PolyT f = lin(eta * sq_inv);
        den = den * f * f;
    }
    RationalFunctionT L{PolyT::one(q), den};
    L.reduce();
    return L;
}

RationalFunctionT triple_epsilon(const std::array<LocalRepGL2, 3>& reps, const QuadExt& c) {
    long q = reps[0].q;
    int nst = count_st(reps);
    if (nst == 0) return RationalFunctionT::one(q);
    PolyT mono{{}, q};
    if (nst == 3) {
        QuadExt eta = c * xi_of(reps[0]) * xi_of(reps[1]) * xi_of(reps[2]);
        // -eta(pi)^5 q^{(5-10s)/2} = -eta^5 q^2 sqrt(q) t^5
        QuadExt lead = QuadExt(0, q) - eta.pow(5) * QuadExt(0, mpq_class(q * q), q);
        mono.c.assign(6, QuadExt(0, q));
        mono.c[5] = lead;
    } else {
        // one or two Steinberg places: q^{-4s+2} = q^2 t^4, conductor 4
        QuadExt eta = c;
        QuadExt omegas(1, q);
        for (auto& r : reps) {
            if (r.steinberg)
                eta = eta * xi_of(r);
            else
                omegas = omegas * r.omega() * r.omega();
        }
        QuadExt lead = eta.pow(4) * omegas * QuadExt(mpq_class(q) * q, q);
        mono.c.assign(5, QuadExt(0, q));
        mono.c[4] = lead;
    }
    return RationalFunctionT::from_poly(mono);
}

RationalFunctionT gamma_gl1(const QuadExt& c, long q) {
    // gamma(s, chi, psi) = L(1-s, chi^{-1}) / L(s, chi)
    //                    = t (1 - c t) / (t - c^{-1} q^{-1})
    PolyT num = PolyT::linear(QuadExt(0, q), QuadExt(1, q)) *
                PolyT::linear(QuadExt(1, q), QuadExt(0, q) - c);
    PolyT den = PolyT::linear(QuadExt(0, q) - c.inv() * QuadExt(mpq_class(1, q), q), QuadExt(1, q));
    RationalFunctionT g{num, den};
    g.reduce();
    return g;
}

RationalFunctionT modified_euler_Ep(const std::array<LocalRepGL2, 3>& reps, const QuadExt& c) {
    long q = reps[0].q;
    RationalFunctionT Linv = triple_L(reps, c).inv();
    // gamma(s, pi_1 (x) chi mu2 mu3) = gamma(mu1 chi mu2 mu3) gamma(nu1 chi mu2 mu3)
    QuadExt m1 = reps[0].mu(), n1 = reps[0].nu();
    QuadExt m2 = reps[1].mu(), n2 = reps[1].nu();
    QuadExt m3 = reps[2].mu(), n3 = reps[2].nu();
    std::array<QuadExt, 4> etas = {c * m1 * m2 * m3, c * n1 * m2 * m3, c * m1 * m2 * n3,
                                   c * m1 * m3 * n2};
    RationalFunctionT E = Linv;
    for (auto& e : etas) E = E * gamma_gl1(e, q).inv();
    E.reduce();
    return E;
}

bool functional_equation_check(const std::array<LocalRepGL2, 3>& reps, const QuadExt& c) {
    long q = reps[0].q;
    QuadExt omega_hat = reps[0].omega() * reps[1].omega() * reps[2].omega();
    QuadExt c_breve = (c * omega_hat).inv();
    RationalFunctionT lhs = modified_euler_Ep(reps, c_breve).subs_s_to_1ms();
    RationalFunctionT rhs = modified_euler_Ep(reps, c) * triple_epsilon(reps, c);
    // omega_hat(-1) = 1 for unramified characters
    return lhs.equals(rhs);
}

// ---------------------------------------------------------------------------
// p-adic factored E_p and its central behaviour
// ---------------------------------------------------------------------------

PadicHalf PadicHalf::mul(const PadicHalf& o) const { return {u * o.u, h + o.h}; }
PadicHalf PadicHalf::inv() const { return {u.inv(), -h}; }

std::pair<long, Padic> FactoredEp::central_order_and_leading(long eq_prec) const {
    long order = 0;
    Padic lead(p, 0, 1, prec);
    for (const auto& f : factors) {
        // V t^{tpow} at t = p^{-1/2}: half-power h - tpow
        long hh = f.V.h - f.tpow;
        if (hh % 2 != 0)
            throw internal_error("FactoredEp: non-integral half-power at the central point");
        Padic v = f.V.u * Padic::from_integer(p, p, prec).pow(hh / 2);
        Padic one(p, 0, 1, prec);
        Padic val = one - v;
        if (val.is_zero() || (!val.is_zero() && val.val() >= eq_prec)) {
            order += f.exp;
        } else {
            Padic contrib = (f.exp > 0) ? val : val.inv();
            lead = lead * contrib;
        }
    }
    return {order, lead};
}

FactoredEp modified_euler_Ep_padic(const std::array<LocalRepP, 3>& reps, long p, long prec) {
    FactoredEp E;
    E.p = p;
    E.prec = prec;
    Padic one(p, 0, 1, prec);
    Padic pp = Padic::from_integer(p, p, prec);
    auto ph = [&](const Padic& u, long h) { return PadicHalf{u, h}; };
    // arithmetic Satake data: alpha unit, beta = p / alpha
    std::array<PadicHalf, 3> A, Bt;
    int nst = 0;
    for (int i = 0; i < 3; ++i) {
        A[i] = ph(reps[i].alpha, 0);
        Bt[i] = ph(pp * reps[i].alpha.inv(), 0);
        nst += reps[i].steinberg;
    }
    auto add = [&](const PadicHalf& V, int tpow, int exp) { E.factors.push_back({V, tpow, exp}); };
    // L^{-1}: linear factors (1 - V t) with exponent +1 in E_p
    PadicHalf qmh = ph(one, -1); // p^{-1/2}
    if (nst == 0) {
        for (int s1 = 0; s1 < 2; ++s1)
            for (int s2 = 0; s2 < 2; ++s2)
                for (int s3 = 0; s3 < 2; ++s3) {
                    PadicHalf x = (s1 ? Bt[0] : A[0]).mul(s2 ? Bt[1] : A[1]).mul(s3 ? Bt[2] : A[2]);
                    add(x.mul(qmh).mul(qmh).mul(qmh), 1, 1);
                }
    } else if (nst == 1) {
        int i = 0;
        while (!reps[i].steinberg) ++i;
        int j = (i + 1) % 3, k = (i + 2) % 3;
        PadicHalf xi = A[i];
        for (int sj = 0; sj < 2; ++sj)
            for (int sk = 0; sk < 2; ++sk) {
                PadicHalf x = xi.mul(sj ? Bt[j] : A[j]).mul(sk ? Bt[k] : A[k]);
                add(x.mul(qmh).mul(qmh).mul(qmh), 1, 1);
            }
    } else if (nst == 2) {
        int j = 0;
        while (reps[j].steinberg) ++j;
        int i = (j + 1) % 3, k = (j + 2) % 3;
        PadicHalf eta = A[i].mul(A[k]);
        for (int sj = 0; sj < 2; ++sj) {
            PadicHalf xj = (sj ? Bt[j] : A[j]).mul(qmh);
            add(eta.mul(xj), 1, 1);
            add(eta.mul(xj).mul(ph(pp.inv(), 0)), 1, 1);
        }
    } else {
        PadicHalf eta = A[0].mul(A[1]).mul(A[2]);
        add(eta.mul(qmh).mul(qmh).mul(qmh), 1, 1);
        add(eta.mul(qmh), 1, 1);
        add(eta.mul(qmh), 1, 1);
    }
    // gamma_j^{-1} = (1 - eta^{-1} p^{-1} t^{-1}) / (1 - eta t):
    // mu_i = alpha_i p^{-1/2}, nu_i = beta_i p^{-1/2}
    std::array<PadicHalf, 3> mu, nu;
    for (int i = 0; i < 3; ++i) {
        mu[i] = A[i].mul(qmh);
        nu[i] = Bt[i].mul(qmh);
    }
    std::array<PadicHalf, 4> etas = {mu[0].mul(mu[1]).mul(mu[2]), nu[0].mul(mu[1]).mul(mu[2]),
                                     mu[0].mul(mu[1]).mul(nu[2]), mu[0].mul(mu[2]).mul(nu[1])};
    for (auto& e : etas) {
        add(e.inv().mul(ph(pp.inv(), 0)), -1, 1);
        add(e, 1, -1);
    }
    return E;
}

// ---------------------------------------------------------------------------
// degenerate Whittaker value via explicit Fourier transforms
// ---------------------------------------------------------------------------

namespace {

// values of the Fourier transform of phi_mu(x) = mu(x) 1_{Z_p^*}(x) for
// mu = omega^e, on cosets x + Z_p with x = r/p (r = 0 meaning x in Z_p);
// elements of Z_p[zeta_p]
struct TransformTable {
    long p, prec, e;
    // hat(phi)(r/p) for r = 0..p-1 (r = 0: the common value on Z_p)
    std::vector<CycP> val;
};

TransformTable build_phi_hat(long p, long prec, long e) {
    TransformTable T{p, prec, e % (p - 1)};
    Padic zero = Padic::zero(p, prec);
    Padic one(p, 0, 1, prec);
    // phi-hat(x) = int_{Z_p^*} omega^e(a) psi(a x) da
    // on x in Z_p: sum over a of omega^e(a): (p-1)/p * [e == 0] - correction
    for (long r = 0; r < p; ++r) {
        CycP acc(p, 1, zero);
        // integral = (1/p) sum_{a mod p, a != 0} omega^e(a) zeta_p^{a r}
        // (the a-coset a + pZ_p has volume 1/p and psi((a+pb) r/p)=zeta^{ar})
        for (long a = 1; a < p; ++a) {
            Padic w = teichmuller(a, p, prec).pow(T.e);
            acc.add_root_power((a * r) % p, w);
        }
        acc = acc.scale(one / Padic::from_integer(p, p, prec));
        T.val.push_back(acc);
    }
    return T;
}

// double transform of phi_mu at a unit w: int phi-hat(x) psi(x w) dx
// (integral over p^{-1} Z_p; cosets x = r/p + Z_p each of volume 1)
CycP double_transform_at(const TransformTable& T, long w_mod_p, const mpz_class& w, long p, long prec) {
    (void)w_mod_p;
    Padic zero = Padic::zero(p, prec);
    CycP acc(p, 1, zero);
    for (long r = 0; r < p; ++r) {
        // psi((r/p) w) = zeta_p^{r w}
        mpz_class rw = mpz_class(r) * w;
        long ex = mpz_class(rw % p).get_si();
        if (ex < 0) ex += p;
        CycP term = CycP::root_power(p, 1, ex, Padic(p, 0, 1, prec), zero);
        acc = acc + term * T.val[r];
    }
    return acc;
}

} // namespace

Padic whittaker_value_p(const HalfIntegralMatrix& B, std::array<long, 4> teich_exps, long p, long prec) {
    if (B.n != 3) throw domain_error("whittaker_value_p: size-3 matrices only");
    // diagonal factors: transform of 1-hat_{pZ_p} evaluated at -b_ii is
    // 1_{pZ_p}(b_ii)
    for (int i = 0; i < 3; ++i)
        if (B.b[i] % p != 0) return Padic::zero(p, prec);
    // off-diagonal factors: double transform of phi_{chi omega_i} at -2y_i,
    // which must land on chi omega_i(2y_i) 1_{Z_p^*}(2y_i)
    static std::map<std::tuple<long, long, long>, TransformTable> tables;
    Padic r(p, 0, 1, prec);
    for (int i = 0; i < 3; ++i) {
        long e = ((teich_exps[0] + teich_exps[i + 1]) % (p - 1) + (p - 1)) % (p - 1);
        auto key = std::make_tuple(p, prec, e);
        auto it = tables.find(key);
        if (it == tables.end()) it = tables.emplace(key, build_phi_hat(p, prec, e)).first;
        mpz_class w = -mpz_class(B.c[i]); // -2 y_i
        if (mpz_divisible_ui_p(w.get_mpz_t(), p)) return Padic::zero(p, prec);
        CycP v = double_transform_at(it->second, 0, w, p, prec);
        auto rv = v.rational_value();
        if (!rv) throw internal_error("whittaker_value_p: transform value not in Q_p");
        if (rv->is_zero()) return Padic::zero(p, prec);
        r = r * *rv;
    }
    return r;
}

} // namespace teis
