#include "teis/tate.hpp"

namespace teis {

namespace {

// power series over Z, coefficients of q^0..q^(n-1)
using Ser = std::vector<mpz_class>;

Ser mul(const Ser& a, const Ser& b, long n) {
    Ser r(n, 0);
    for (long i = 0; i < n && i < long(a.size()); ++i) {
        if (a[i] == 0) continue;
        for (long j = 0; j + i < n && j < long(b.size()); ++j) r[i + j] += a[i] * b[j];
    }
    return r;
}

Ser eisenstein_E4(long n) {
    Ser e(n, 0);
    e[0] = 1;
    for (long m = 1; m < n; ++m) {
        mpz_class s3 = 0;
        for (long d = 1; d <= m; ++d)
            if (m % d == 0) s3 += mpz_class(d) * d * d;
        e[m] = 240 * s3;
    }
    return e;
}

// q-expansion of Delta / q = prod (1 - q^n)^24
Ser eta24(long n) {
    Ser f(n, 0);
    f[0] = 1;
    for (long m = 1; m < n; ++m) {
        // multiply by (1 - q^m)^24 via repeated binomial factors
        Ser g(n, 0);
        mpz_class binom = 1;
        for (long k = 0; k * m < n && k <= 24; ++k) {
            g[k * m] = ((k % 2) ? -binom : binom);
            binom = binom * (24 - k) / (k + 1);
        }
        f = mul(f, g, n);
    }
    return f;
}

} // namespace

std::vector<mpz_class> j_series(long nterms) {
    // j = E4^3 / Delta = q^{-1} * E4^3 / (Delta/q); return c(-1).. as a plain
    // vector shifted by one
    long n = nterms + 2;
    Ser e4 = eisenstein_E4(n);
    Ser num = mul(mul(e4, e4, n), e4, n);
    Ser den = eta24(n);
    // power series division num/den
    Ser quot(n, 0);
    for (long i = 0; i < n; ++i) {
        mpz_class acc = num[i];
        for (long k = 1; k <= i; ++k) acc -= den[k] * quot[i - k];
        quot[i] = acc; // den[0] = 1
    }
    quot.resize(nterms);
    return quot; // quot[i] = coefficient of q^{i-1} in j
}

Padic j_eval(const Padic& q, long nterms) {
    if (q.is_zero() || q.val() < 1) throw domain_error("j_eval: need v(q) >= 1");
    auto c = j_series(nterms);
    long p = q.p(), prec = q.prec();
    Padic acc = Padic::zero(p, prec + q.val());
    Padic qn(p, 0, 1, prec);
    // j = c0/q + c1 + c2 q + ...
    acc = acc + Padic::from_integer(c[0], p, prec) / q;
    for (long i = 1; i < nterms; ++i) {
        acc = acc + Padic::from_integer(c[i], p, prec) * qn;
        qn = qn * q;
        if (qn.is_zero() || (!qn.is_zero() && qn.val() > prec + 2)) break;
    }
    return acc;
}

Padic tate_period(const Padic& j, long prec) {
    if (j.is_zero() || j.val() >= 0) throw domain_error("tate_period: v_p(j) must be negative");
    long p = j.p();
    long n = -j.val();
    long nterms = std::max<long>(40, prec / n + 6);
    // Newton for f(q) = j(q) - j, start q0 = 1/j (correct to one digit beyond v)
    Padic q = j.inv();
    for (int it = 0; it < 200; ++it) {
        Padic f = j_eval(q, nterms) - j;
        if (f.is_zero()) break;
        // derivative of the truncated series
        auto c = j_series(nterms);
        Padic dv = -Padic::from_integer(c[0], p, prec) / (q * q);
        Padic qn(p, 0, 1, prec);
        for (long i = 2; i < nterms; ++i) {
            dv = dv + Padic::from_integer(mpz_class(i - 1) * c[i], p, prec) * qn;
            qn = qn * q;
            if (qn.is_zero() || qn.val() > prec + 2) break;
        }
        Padic step = f / dv;
        q = q - step;
        if (step.is_zero() || step.val() >= prec + n - 2) break;
    }
    if (q.is_zero() || q.val() != n) throw internal_error("tate_period: Newton failed");
    return q;
}

} // namespace teis
