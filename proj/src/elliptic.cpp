#include "teis/elliptic.hpp"
#include "teis/siegel.hpp"
#include <algorithm>

namespace teis {

void EllipticTriple::validate() const {
    for (auto& e : E) {
        if (e.conductor < 1) throw domain_error("conductor must be positive");
        for (long q = 2; q * q <= e.conductor; ++q)
            if (e.conductor % (q * q) == 0) throw domain_error("conductor must be square-free");
        bool mult = e.reduction != ReductionP::GoodOrdinary;
        if (mult && e.ap != 1 && e.ap != -1)
            throw domain_error("multiplicative reduction requires a_p = +-1");
        if (mult && e.conductor % p != 0)
            throw domain_error("multiplicative reduction at p requires p | conductor");
        if (!mult && e.conductor % p == 0)
            throw domain_error("good reduction at p requires p coprime to conductor");
        for (auto& [l, al] : e.a_ell)
            if (al != 1 && al != -1) throw domain_error("a_l must be +-1 at bad primes");
    }
}

bool EllipticTriple::mult_at_p(int i) const {
    return E[i].reduction != ReductionP::GoodOrdinary;
}

Padic EllipticTriple::unit_root(int i) const {
    const auto& e = E[i];
    if (mult_at_p(i)) return Padic::from_integer(e.ap, p, prec);
    if (e.alpha) {
        // must satisfy alpha^2 - a_p alpha + p = 0 and be a unit
        const Padic& a = *e.alpha;
        Padic lhs = a * a - Padic::from_integer(e.ap, p, prec) * a + Padic::from_integer(p, p, prec);
        if (!lhs.is_zero() || a.is_zero() || a.val() != 0)
            throw domain_error("alpha is not the ordinary unit root");
        return a;
    }
    if (e.ap % p == 0) throw domain_error("not ordinary: p | a_p");
    // Hensel-lift the unit root of X^2 - a_p X + p from alpha == a_p (mod p)
    Padic x = Padic::from_integer(e.ap, p, prec);
    Padic ap = x, pp = Padic::from_integer(p, p, prec);
    for (int it = 0; it < 64; ++it) {
        Padic f = x * x - ap * x + pp;
        if (f.is_zero()) break;
        Padic fp = x + x - ap;
        x = x - f / fp;
    }
    return x;
}

std::array<bool, 4> r82_equations(const EllipticTriple& T, long eq_prec) {
    Padic p1 = Padic::from_integer(T.p, T.p, T.prec);
    Padic p2 = p1 * p1;
    std::array<Padic, 3> a, b;
    for (int i = 0; i < 3; ++i) {
        a[i] = T.unit_root(i);
        b[i] = p1 / a[i];
    }
    auto eq = [&](const Padic& x) { return x.equals_mod(p2, eq_prec); };
    return {eq(b[0] * b[1] * b[2]), eq(b[0] * b[1] * a[2]), eq(b[0] * a[1] * b[2]),
            eq(a[0] * b[1] * b[2])};
}

TrivialZeroCase trivial_zero_classify(const EllipticTriple& T) {
    T.validate();
    long eq_prec = T.prec - 2;
    auto eqs = r82_equations(T, eq_prec);
    int nsat = eqs[0] + eqs[1] + eqs[2] + eqs[3];
    if (nsat == 0) return TrivialZeroCase::None;
    int nmult = T.mult_at_p(0) + T.mult_at_p(1) + T.mult_at_p(2);
    if (nmult == 3) {
        // case (i) requires alpha1 alpha2 alpha3 = 1, equivalently the three
        // mixed equations hold
        long prod = T.E[0].ap * T.E[1].ap * T.E[2].ap;
        if (prod == 1) return TrivialZeroCase::CaseI;
        return TrivialZeroCase::Other;
    }
    if (nmult == 1) {
        int i = T.mult_at_p(0) ? 0 : (T.mult_at_p(1) ? 1 : 2);
        int j = (i + 1) % 3, k = (i + 2) % 3;
        // alpha_j = alpha_i alpha_k (equivalently alpha_k = alpha_i alpha_j)
        Padic ai = T.unit_root(i), aj = T.unit_root(j), ak = T.unit_root(k);
        if (aj.equals_mod(ai * ak, eq_prec)) return TrivialZeroCase::CaseII;
        return TrivialZeroCase::Other;
    }
    return TrivialZeroCase::Other;
}

EpsilonSigns epsilon_signs(const EllipticTriple& T) {
    T.validate();
    EpsilonSigns S;
    // M^- = gcd of conductors; Sigma^- = {l | M^- : prod a_l(E_i) = 1}
    long Mm = T.E[0].conductor;
    auto gcd2 = [](long x, long y) {
        while (y) { long t = x % y; x = y; y = t; }
        return x;
    };
    Mm = gcd2(gcd2(T.E[0].conductor, T.E[1].conductor), T.E[2].conductor);
    for (long l : prime_factors(mpz_class(Mm))) {
        int pr = 1;
        for (int i = 0; i < 3; ++i) {
            auto it = T.E[i].a_ell.find(l);
            if (it == T.E[i].a_ell.end()) throw domain_error("missing a_l for l | M^-");
            pr *= it->second;
        }
        if (pr == 1) S.sigma_minus.push_back(l);
    }
    S.eps = -((S.sigma_minus.size() % 2 == 0) ? 1 : -1);
    bool p_in = std::find(S.sigma_minus.begin(), S.sigma_minus.end(), T.p) != S.sigma_minus.end();
    S.eps_p = p_in ? -S.eps : S.eps;
    return S;
}

std::variant<Padic, CycP> ep_adjoint(long k, long n, const Padic& alpha, long chi_teich_exp,
                                     long p, long prec) {
    Padic a2inv = (alpha * alpha).inv();
    Padic scale = alpha.pow(-2 * n);
    if (n == 0) {
        // (1 - alpha^{-2} chi(p) p^{k-1})(1 - alpha^{-2} chi(p) p^{k-2});
        // chi of conductor dividing p is trivial at p unless principal
        Padic one(p, 0, 1, prec);
        Padic chi_p = one; // tame nebentypus of p-power conductor: chi(p) = 1 branch
        if (chi_teich_exp % (p - 1) != 0)
            throw domain_error("ep_adjoint: n = 0 requires unramified chi at p");
        Padic f1 = one - a2inv * chi_p * Padic::from_integer(p, p, prec).pow(k - 1);
        Padic f2 = one - a2inv * chi_p * Padic::from_integer(p, p, prec).pow(k - 2);
        return scale * f1 * f2;
    }
    if (n == 1 && chi_teich_exp % (p - 1) == 0) {
        if (k != 2) throw domain_error("ep_adjoint: n = 1 with trivial chi_(p) forces k = 2");
        return scale * (-Padic(p, 0, 1, prec));
    }
    // n > 0, chi_(p) nontrivial: g(chi_(p)) chi_(p)(-1), a Gauss sum
    long e = ((chi_teich_exp % (p - 1)) + (p - 1)) % (p - 1);
    if (e == 0) throw domain_error("ep_adjoint: inconsistent case");
    Padic zero = Padic::zero(p, prec);
    CycP g(p, 1, zero);
    for (long a = 1; a < p; ++a) g.add_root_power(a, teichmuller(a, p, prec).pow(e));
    Padic chi_m1 = teichmuller(p - 1, p, prec).pow(e); // chi(-1)
    return g.scale(chi_m1 * scale);
}

LInvariants l_invariants(const EllipticTriple& T,
                         const std::array<std::optional<Padic>, 3>& tate_periods) {
    T.validate();
    LInvariants L;
    auto cls = trivial_zero_classify(T);
    Padic half = Padic::from_integer(2, T.p, T.prec).inv();
    for (int i = 0; i < 3; ++i) {
        if (!T.mult_at_p(i)) continue;
        if (T.E[i].ap != 1) continue; // split branch: q_E supplied only there
        if (!tate_periods[i]) throw domain_error("l_invariants: missing Tate period");
        const Padic& qE = *tate_periods[i];
        if (qE.is_zero() || qE.val() <= 0) throw domain_error("l_invariants: bad Tate period");
        Padic lg = padic_log(qE); // Iwasawa branch
        L.ell[i] = -(half * lg / Padic::from_integer(qE.val(), T.p, T.prec));
    }
    if (cls == TrivialZeroCase::CaseI) {
        if (!(L.ell[0] && L.ell[1] && L.ell[2]))
            throw domain_error("l_invariants: case (i) needs all three Tate periods");
        L.script_L = Padic::from_integer(-8, T.p, T.prec) * *L.ell[0] * *L.ell[1] * *L.ell[2];
    } else if (cls == TrivialZeroCase::CaseII) {
        int i = T.mult_at_p(0) ? 0 : (T.mult_at_p(1) ? 1 : 2);
        if (!L.ell[i]) throw domain_error("l_invariants: case (ii) needs the Tate period of E1");
        L.script_L = Padic::from_integer(4, T.p, T.prec) * *L.ell[i] * *L.ell[i];
        // extra factor (-p alpha2^{-2})(1 - alpha2^{-2})^2 with alpha2 a good
        // ordinary unit root among the other two
        int j = (i + 1) % 3;
        Padic a2 = T.unit_root(j);
        Padic a2m2 = (a2 * a2).inv();
        Padic one(T.p, 0, 1, T.prec);
        Padic f = (-Padic::from_integer(T.p, T.p, T.prec) * a2m2) * (one - a2m2) * (one - a2m2);
        L.case_ii_factor = f;
        if (f.is_zero()) L.degenerate = true;
    } else {
        L.script_L = Padic::zero(T.p, T.prec);
    }
    return L;
}

std::array<LocalRepP, 3> local_reps_at_p(const EllipticTriple& T) {
    std::array<LocalRepP, 3> reps;
    for (int i = 0; i < 3; ++i) {
        reps[i].steinberg = T.mult_at_p(i);
        reps[i].alpha = T.unit_root(i);
    }
    return reps;
}

} // namespace teis
