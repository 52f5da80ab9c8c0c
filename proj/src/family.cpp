#include "teis/family.hpp"
#include <omp.h>
#include <map>
#include <tuple>

namespace teis {

Padic PadicCharacter::value(const mpz_class& z, long p, long prec) const {
    if (z == 0 || valuation(z, p) != 0) throw domain_error("character at a non-unit");
    long te = ((teich % (p - 1)) + (p - 1)) % (p - 1);
    static std::map<std::tuple<long, long, long, long, mpz_class>, Padic> memo;
    auto key = std::make_tuple(p, prec, te, cyc, z);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    Padic w = teichmuller(z, p, prec);
    Padic r = w.pow(te);
    if (cyc != 0) r = r * Padic::from_integer(z, p, prec).pow(cyc);
    memo.emplace(key, r);
    return r;
}

void FamilyConfig::validate() const {
    if (p < 3) throw domain_error("FamilyConfig: p must be an odd prime");
    if (N < 1 || N % p == 0) throw domain_error("FamilyConfig: N must be coprime to p");
    // square-free check
    for (long q = 2; q * q <= N; ++q)
        if (N % (q * q) == 0) throw domain_error("FamilyConfig: N must be square-free");
}

Padic q_B_value(const HalfIntegralMatrix& B, const PadicCharacter& chi0,
                const PadicCharacter& chi1, const PadicCharacter& chi2,
                const PadicCharacter& chi3, long p, long prec) {
    if (!B.in_Xi_p(p)) return Padic::zero(p, prec);
    mpz_class P = mpz_class(B.c[0]) * B.c[1] * B.c[2]; // 8 y1 y2 y3
    Padic r = chi0.value(P, p, prec);
    r = r * chi1.value(B.c[0], p, prec);
    r = r * chi2.value(B.c[1], p, prec);
    r = r * chi3.value(B.c[2], p, prec);
    return r;
}

std::vector<HalfIntegralMatrix> enumerate_matrices(std::array<long, 3> diag, long p) {
    for (long d : diag) {
        if (d <= 0) throw domain_error("enumerate_matrices: diagonal must be positive");
        if (d % p != 0) throw domain_error("enumerate_matrices: diagonal must be divisible by p");
    }
    std::vector<HalfIntegralMatrix> out;
    auto bound = [&](long bi, long bj) {
        long m = 0;
        while ((m + 1) * (m + 1) < 4 * bi * bj) ++m;
        return m; // |c| <= m with c^2 < 4 b_i b_j
    };
    long m23 = bound(diag[1], diag[2]);
    long m13 = bound(diag[0], diag[2]);
    long m12 = bound(diag[0], diag[1]);
    for (long c23 = -m23; c23 <= m23; ++c23) {
        if (c23 % p == 0) continue;
        for (long c13 = -m13; c13 <= m13; ++c13) {
            if (c13 % p == 0) continue;
            for (long c12 = -m12; c12 <= m12; ++c12) {
                if (c12 % p == 0) continue;
                auto B = HalfIntegralMatrix::rank3(diag[0], diag[1], diag[2], c23, c13, c12);
                if (B.positive_definite()) out.push_back(B);
            }
        }
    }
    return out;
}

void GroupLikeAtom::prepare(long p, long prec) {
    for (auto& b : base) b = Padic(p, 0, 1, prec);
    for (const auto& f : factors) {
        Padic zu = one_unit_part(f.z, p, prec);
        auto& b = base[size_t(f.var)];
        b = b * zu.pow(f.mult);
    }
    base_ready = true;
}

Padic GroupLikeAtom::specialize(const ArithmeticPoint& pt) const {
    if (!pt.trivial_eps) throw unsupported_error("specialize: nontrivial finite parts");
    long p = scalar.p(), prec = scalar.prec();
    if (base_ready) {
        return scalar * base[0].pow(pt.k1) * base[1].pow(pt.k2) * base[2].pow(pt.k3) *
               base[3].pow(pt.kP);
    }
    Padic r = scalar;
    for (const auto& f : factors) {
        long k = 0;
        switch (f.var) {
            case Var::X1: k = pt.k1; break;
            case Var::X2: k = pt.k2; break;
            case Var::X3: k = pt.k3; break;
            case Var::T: k = pt.kP; break;
        }
        Padic zu = one_unit_part(f.z, p, prec);
        r = r * zu.pow(mpz_class(f.mult) * k);
    }
    return r;
}

IwasawaSeries GroupLikeAtom::expand(Caps caps, long prec) const {
    // the atom is group-like per variable: collect the total exponent
    // s_v = sum_f mult_f * log<z_f>/log u and expand (1+v)^{s_v} once
    long p = scalar.p();
    std::array<Padic, 4> sv = {Padic::zero(p, prec), Padic::zero(p, prec),
                               Padic::zero(p, prec), Padic::zero(p, prec)};
    for (const auto& f : factors) {
        Padic e = diamond_exponent(f.z, p, prec);
        sv[size_t(f.var)] = sv[size_t(f.var)] + e * Padic::from_integer(f.mult, p, prec);
    }
    std::array<std::vector<Padic>, 4> uni;
    for (int v = 0; v < 4; ++v) {
        uni[v].reserve(caps[v] + 1);
        for (long j = 0; j <= caps[v]; ++j) uni[v].push_back(padic_binomial(sv[v], j));
    }
    IwasawaSeries out(p, caps, prec);
    for (long e1 = 0; e1 <= caps[0]; ++e1)
    for (long e2 = 0; e2 <= caps[1]; ++e2)
    for (long e3 = 0; e3 <= caps[2]; ++e3)
    for (long eT = 0; eT <= caps[3]; ++eT)
        out.set(e1, e2, e3, eT, scalar * uni[0][e1] * uni[1][e2] * uni[2][e3] * uni[3][eT]);
    return out;
}

Padic FamilyCoefficient::specialize_exact(const ArithmeticPoint& pt) const {
    if (!in_xi) return Padic::zero(series.p(), series.prec());
    Padic r = qatom.specialize(pt);
    long w = pt.k1 + pt.k2 + pt.k3 - 2 * pt.kP;
    long p = r.p(), prec = r.prec();
    // each Euler factor specializes to F(c_l <l>^w); these depend only on
    // (F identity, c-exponent, w), shared across matrices in a class
    static std::map<std::tuple<long, long, long, long, long>, Padic> memo;
    for (const auto& e : euler) {
        auto key = std::make_tuple(p, prec, e.F.id, e.c_exp, w);
        auto it = memo.find(key);
        if (it == memo.end()) {
            Padic zu = one_unit_part(e.ell, p, prec);
            Padic x = e.c * zu.pow(w);
            it = memo.emplace(key, e.F.eval(x)).first;
        }
        r = r * it->second;
    }
    return r;
}

namespace {

// Teichmueller power omega(z)^e as a Padic
Padic omega_pow(const mpz_class& z, long e, long p, long prec) {
    Padic w = teichmuller(z, p, prec);
    long m = ((e % (p - 1)) + (p - 1)) % (p - 1);
    return w.pow(m);
}

GroupLikeAtom q_b_atom(const HalfIntegralMatrix& B, const FamilyConfig& cfg) {
    // omega^a(8y1y2y3) <8y1y2y3>_T / prod chi_i(2y_i) <2y_i>_{X_i}
    mpz_class P = mpz_class(B.c[0]) * B.c[1] * B.c[2];
    Padic sc = omega_pow(P, cfg.a, cfg.p, cfg.prec);
    sc = sc * omega_pow(B.c[0], -cfg.a1, cfg.p, cfg.prec);
    sc = sc * omega_pow(B.c[1], -cfg.a2, cfg.p, cfg.prec);
    sc = sc * omega_pow(B.c[2], -cfg.a3, cfg.p, cfg.prec);
    GroupLikeAtom atom;
    atom.scalar = sc;
    atom.factors = {
        {P, Var::T, 1},
        {mpz_class(B.c[0]), Var::X1, -1},
        {mpz_class(B.c[1]), Var::X2, -1},
        {mpz_class(B.c[2]), Var::X3, -1},
    };
    return atom;
}

} // namespace

IwasawaSeries q_b_character_factor(const HalfIntegralMatrix& B, const FamilyConfig& cfg) {
    cfg.validate();
    if (!B.in_Xi_p(cfg.p))
        return IwasawaSeries::constant(Padic::zero(cfg.p, cfg.prec), cfg.caps);
    return q_b_atom(B, cfg).expand(cfg.caps, cfg.prec);
}

FamilyCoefficient family_coefficient(const HalfIntegralMatrix& B, const FamilyConfig& cfg, bool with_series) {
    cfg.validate();
    FamilyCoefficient out{IwasawaSeries::constant(Padic::zero(cfg.p, cfg.prec), cfg.caps), {}, {}, {}, false};
    if (!B.in_Xi_p(cfg.p)) return out;

    out.in_xi = true;
    out.qatom = q_b_atom(B, cfg);
    out.qatom.prepare(cfg.p, cfg.prec);

    // F_B^(a): product over l | det(2B), l != p, l coprime to N of
    // F_{B,l}(c_l <l>_{X1}<l>_{X2}<l>_{X3}<l>_T^{-2}),
    // c_l = omega(l)^{-2a+a1+a2+a3} l^{-4}
    long cexp = ((-2 * cfg.a + cfg.a1 + cfg.a2 + cfg.a3) % (cfg.p - 1) + (cfg.p - 1)) % (cfg.p - 1);
    for (long ell : prime_factors(B.det2B())) {
        if (ell == cfg.p || cfg.N % ell == 0) continue;
        EulerFactorAt e;
        e.ell = ell;
        e.c_exp = cexp;
        e.F = siegel_polynomial(B, ell, cfg.siegel, false);
        e.c = omega_pow(ell, cexp, cfg.p, cfg.prec) *
              Padic::from_integer(ell, cfg.p, cfg.prec).pow(-4);
        out.euler.push_back(std::move(e));
    }

    if (with_series) {
        // materialize the group-like cross product for the truncated table
        std::vector<GroupLikeAtom> atoms = {out.qatom};
        for (const auto& e : out.euler) {
            std::vector<GroupLikeAtom> evald;
            Padic clj(cfg.p, 0, 1, cfg.prec);
            for (long j = 0; j <= e.F.degree(); ++j) {
                if (e.F.coeff[j] != 0) {
                    GroupLikeAtom a;
                    a.scalar = Padic::from_integer(e.F.coeff[j], cfg.p, cfg.prec) * clj;
                    if (j > 0)
                        a.factors = {{e.ell, Var::X1, j}, {e.ell, Var::X2, j}, {e.ell, Var::X3, j}, {e.ell, Var::T, -2 * j}};
                    evald.push_back(a);
                }
                clj = clj * e.c;
            }
            std::vector<GroupLikeAtom> next;
            for (const auto& x : atoms)
                for (const auto& y : evald) {
                    GroupLikeAtom z;
                    z.scalar = x.scalar * y.scalar;
                    z.factors = x.factors;
                    z.factors.insert(z.factors.end(), y.factors.begin(), y.factors.end());
                    next.push_back(z);
                }
            atoms = std::move(next);
        }
        out.exact = atoms;
        IwasawaSeries s = IwasawaSeries::constant(Padic::zero(cfg.p, cfg.prec), cfg.caps);
        for (const auto& a : out.exact) s = s + a.expand(cfg.caps, cfg.prec);
        out.series = s;
    }
    return out;
}

Padic direct_coefficient(const HalfIntegralMatrix& B, const ArithmeticPoint& pt, const FamilyConfig& cfg) {
    cfg.validate();
    if (!pt.balanced() || !pt.critical())
        throw domain_error("direct_coefficient: point not balanced critical");
    if (!pt.trivial_eps) throw unsupported_error("direct_coefficient: nontrivial finite parts");
    if (!B.in_Xi_p(cfg.p)) return Padic::zero(cfg.p, cfg.prec);
    long n = pt.kP;
    // Q_B(eps0 e_cyc^n, eps1 e_cyc^{-k1}, eps2 e_cyc^{-k2}, eps3 e_cyc^{-k3})
    PadicCharacter chi0{cfg.a - n, n};
    PadicCharacter chi1{pt.k1 - cfg.a1, -pt.k1};
    PadicCharacter chi2{pt.k2 - cfg.a2, -pt.k2};
    PadicCharacter chi3{pt.k3 - cfg.a3, -pt.k3};
    Padic q = q_B_value(B, chi0, chi1, chi2, chi3, cfg.p, cfg.prec);

    // a_B(eps0^2 eps1 eps2 eps3, 2n - (k1+k2+k3) + 4), evaluated at
    // x_l = theta(l)^{-1} l^{-m}
    long theta_exp = 2 * (cfg.a - n) + (pt.k1 - cfg.a1) + (pt.k2 - cfg.a2) + (pt.k3 - cfg.a3);
    long m = 2 * n - (pt.k1 + pt.k2 + pt.k3) + 4;
    std::vector<long> excluded = {cfg.p};
    for (long ell : prime_factors(cfg.N)) excluded.push_back(ell);
    static std::map<std::tuple<long, long, long, long, long>, Padic> xmemo;
    Padic ab = a_B_scalar(
        B, excluded,
        [&](long ell) {
            auto key = std::make_tuple(cfg.p, cfg.prec, ell,
                                       ((-theta_exp) % (cfg.p - 1) + (cfg.p - 1)) % (cfg.p - 1), m);
            auto it = xmemo.find(key);
            if (it != xmemo.end()) return it->second;
            Padic x = omega_pow(ell, -theta_exp, cfg.p, cfg.prec);
            x = x * Padic::from_integer(ell, cfg.p, cfg.prec).pow(-m);
            xmemo.emplace(key, x);
            return x;
        },
        cfg.p, cfg.prec, cfg.siegel);
    return q * ab;
}

QExpansion q_expansion(const FamilyConfig& cfg, long diag_bound) {
    cfg.validate();
    if (diag_bound < cfg.p) return QExpansion{cfg.p, cfg.caps, cfg.prec, diag_bound, {}};
    QExpansion out{cfg.p, cfg.caps, cfg.prec, diag_bound, {}};
    for (long d1 = cfg.p; d1 <= diag_bound; d1 += cfg.p)
        for (long d2 = cfg.p; d2 <= diag_bound; d2 += cfg.p)
            for (long d3 = cfg.p; d3 <= diag_bound; d3 += cfg.p) {
                auto Bs = enumerate_matrices({d1, d2, d3}, cfg.p);
                if (Bs.empty()) continue;
                IwasawaSeries sum = IwasawaSeries::constant(Padic::zero(cfg.p, cfg.prec), cfg.caps);
                for (const auto& B : Bs) sum = sum + family_coefficient(B, cfg).series;
                out.terms.insert({{d1, d2, d3}, sum});
            }
    return out;
}

std::map<std::array<long, 3>, Padic> direct_expansion(const FamilyConfig& cfg, long diag_bound,
                                                      const ArithmeticPoint& pt) {
    std::map<std::array<long, 3>, Padic> out;
    if (diag_bound < cfg.p) return out;
    for (long d1 = cfg.p; d1 <= diag_bound; d1 += cfg.p)
        for (long d2 = cfg.p; d2 <= diag_bound; d2 += cfg.p)
            for (long d3 = cfg.p; d3 <= diag_bound; d3 += cfg.p) {
                auto Bs = enumerate_matrices({d1, d2, d3}, cfg.p);
                if (Bs.empty()) continue;
                Padic sum = Padic::zero(cfg.p, cfg.prec);
                for (const auto& B : Bs) sum = sum + direct_coefficient(B, pt, cfg);
                out.insert({{d1, d2, d3}, sum});
            }
    return out;
}

} // namespace teis
