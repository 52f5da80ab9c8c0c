#include "teis/siegel.hpp"
#include "teis/cyclotomic.hpp"
#include <algorithm>
#include <cstdint>
#include <cmath>
#include <map>
#include <tuple>
#include <optional>
#include <omp.h>

namespace teis {

namespace {

using i64 = long long;
using i128 = __int128;
using u128 = unsigned __int128;

i64 pow_i64(long ell, long e) {
    i64 r = 1;
    for (long i = 0; i < e; ++i) r *= ell;
    return r;
}

long val_capped(i64 x, long ell, long cap) {
    if (x == 0) return cap;
    long v = 0;
    while (v < cap && x % ell == 0) {
        x /= ell;
        ++v;
    }
    return v;
}

i64 mulmod(i64 a, i64 b, i64 m) { return i64((i128)a * b % m); }

i64 inv_mod_i64(i64 a, i64 m) {
    // extended euclid; a coprime to m
    i64 t = 0, nt = 1, r = m, nr = a % m;
    while (nr != 0) {
        i64 q = r / nr;
        std::swap(t -= q * nt, nt);
        std::swap(r -= q * nr, nr);
    }
    if (r != 1) throw internal_error("inv_mod_i64: not invertible");
    return ((t % m) + m) % m;
}

// ---------------------------------------------------------------------------
// exact elementary-divisor valuations of an integer symmetric lift (naive ref)
// ---------------------------------------------------------------------------

// valuations (ascending, infinity as -1) of the elementary divisors of an
// integer n x n matrix, via gcds of k x k minors
std::array<long, 3> minor_valuations(const std::array<std::array<mpz_class, 3>, 3>& Y, int n, long ell) {
    std::array<long, 3> dv{-1, -1, -1}; // v(d_k), -1 = infinite (gcd 0)
    // d1: gcd of entries
    {
        mpz_class g = 0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) g = gcd(g, Y[i][j]);
        dv[0] = (g == 0) ? -1 : valuation(g, ell);
    }
    if (n >= 2) {
        mpz_class g = 0;
        for (int i0 = 0; i0 < n; ++i0)
            for (int i1 = i0 + 1; i1 < n; ++i1)
                for (int j0 = 0; j0 < n; ++j0)
                    for (int j1 = j0 + 1; j1 < n; ++j1) {
                        mpz_class m = Y[i0][j0] * Y[i1][j1] - Y[i0][j1] * Y[i1][j0];
                        g = gcd(g, m);
                    }
        dv[1] = (g == 0) ? -1 : valuation(g, ell);
    }
    if (n >= 3) {
        mpz_class det = Y[0][0] * (Y[1][1] * Y[2][2] - Y[1][2] * Y[2][1])
                      - Y[0][1] * (Y[1][0] * Y[2][2] - Y[1][2] * Y[2][0])
                      + Y[0][2] * (Y[1][0] * Y[2][1] - Y[1][1] * Y[2][0]);
        dv[2] = (det == 0) ? -1 : valuation(det, ell);
    }
    std::array<long, 3> a{-1, -1, -1}; // e.d. valuations, -1 = infinite
    long prev = 0;
    for (int k = 0; k < n; ++k) {
        if (dv[k] < 0) {
            a[k] = -1;
        } else {
            a[k] = dv[k] - prev;
            prev = dv[k];
        }
        if (k > 0 && dv[k - 1] < 0) a[k] = -1;
    }
    return a;
}

long nu_exponent_from_lift(const std::array<std::array<mpz_class, 3>, 3>& Y, int n, long ell, long j) {
    auto a = minor_valuations(Y, n, ell);
    long e = 0;
    for (int k = 0; k < n; ++k) {
        long ak = a[k] < 0 ? j : std::min(a[k], j);
        e += j - ak;
    }
    return e;
}

// ---------------------------------------------------------------------------
// fast kernel: aggregated subgroup sums G_a
// ---------------------------------------------------------------------------

struct KernelCtx {
    int n;
    long ell;
    i64 bdiag[3];  // b_ii
    i64 bc[3];     // c23, c13, c12 (doubled off-diagonals)
};

// v^t B v for int64 v, exact in __int128 then reduced mod m
i64 qform_mod(const KernelCtx& K, const i64 v[3], i64 m) {
    i128 s = 0;
    for (int i = 0; i < K.n; ++i) s += (i128)K.bdiag[i] * v[i] % m * v[i];
    if (K.n >= 2) s += (i128)K.bc[2] * v[0] % m * v[1];
    if (K.n >= 3) {
        s += (i128)K.bc[1] * v[0] % m * v[2];
        s += (i128)K.bc[0] * v[1] % m * v[2];
    }
    i64 r = i64(s % m);
    return (r % m + m) % m;
}

// v^t (2B) w mod m
i64 bilin_mod(const KernelCtx& K, const i64 v[3], const i64 w[3], i64 m) {
    i128 s = 0;
    auto add = [&](i64 a, i64 x, i64 y) { s += (i128)a % m * x % m * y; };
    for (int i = 0; i < K.n; ++i) add(2 * K.bdiag[i], v[i], w[i]);
    if (K.n >= 2) { add(K.bc[2], v[0], w[1]); add(K.bc[2], v[1], w[0]); }
    if (K.n >= 3) {
        add(K.bc[1], v[0], w[2]); add(K.bc[1], v[2], w[0]);
        add(K.bc[0], v[1], w[2]); add(K.bc[0], v[2], w[1]);
    }
    i64 r = i64(s % m);
    return (r % m + m) % m;
}

// Smith reduction of an n x n integer matrix mod ell^K, tracking U with
// N = U D V; returns ascending pivot valuations and U mod ell^K.
struct SnfResult {
    long s[3];
    i64 U[3][3];
};

SnfResult snf_mod(i64 (&A)[3][3], int n, long ell, long Kcap, i64 mod) {
    SnfResult R{};
    i64 U[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    for (int d = 0; d < n; ++d) {
        long bestv = Kcap + 1;
        int bi = -1, bj = -1;
        for (int i = d; i < n; ++i)
            for (int j = d; j < n; ++j) {
                long v = val_capped(A[i][j] % mod, ell, Kcap);
                if (v < bestv) { bestv = v; bi = i; bj = j; }
            }
        if (bestv > Kcap) bestv = Kcap;
        if (bi < 0 || bestv >= Kcap) {
            for (int k = d; k < n; ++k) R.s[k] = Kcap;
            break;
        }
        if (bi != d)
            for (int j = 0; j < n; ++j) {
                std::swap(A[bi][j], A[d][j]);
                // U col swap
            }
        if (bi != d)
            for (int i = 0; i < n; ++i) std::swap(U[i][bi], U[i][d]);
        if (bj != d)
            for (int i = 0; i < n; ++i) std::swap(A[i][bj], A[i][d]);
        long pv = bestv;
        i64 punit = (A[d][d] / pow_i64(ell, pv)) % mod;
        if (punit < 0) punit += mod;
        i64 pinv = inv_mod_i64(punit, mod);
        for (int i = d + 1; i < n; ++i) {
            if (A[i][d] % mod == 0) { A[i][d] = 0; continue; }
            i64 q = A[i][d] / pow_i64(ell, pv); // valuation >= pv by pivot choice
            if (A[i][d] % pow_i64(ell, pv) != 0) throw internal_error("snf: pivot valuation");
            i64 m = mulmod(((q % mod) + mod) % mod, pinv, mod);
            for (int j = d; j < n; ++j)
                A[i][j] = ((A[i][j] - mulmod(m, ((A[d][j] % mod) + mod) % mod, mod)) % mod + mod) % mod;
            for (int r = 0; r < n; ++r)
                U[r][d] = (U[r][d] + mulmod(m, ((U[r][i] % mod) + mod) % mod, mod)) % mod;
        }
        for (int j = d + 1; j < n; ++j) {
            if (A[d][j] % mod == 0) { A[d][j] = 0; continue; }
            if (A[d][j] % pow_i64(ell, pv) != 0) throw internal_error("snf: pivot valuation (col)");
            i64 q = A[d][j] / pow_i64(ell, pv);
            i64 m = mulmod(((q % mod) + mod) % mod, pinv, mod);
            for (int i = d; i < n; ++i)
                A[i][j] = ((A[i][j] - mulmod(m, ((A[i][d] % mod) + mod) % mod, mod)) % mod + mod) % mod;
        }
        R.s[d] = pv;
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) R.U[i][j] = ((U[i][j] % mod) + mod) % mod;
    return R;
}

// g(H)-test for the subgroup with column profile e[] and basis-change U:
// returns the exponent of g = ell^(sum_{i<=k} min(e_i,e_k)) or -1 if 0.
long g_exponent(const KernelCtx& K, const long e[3], const i64 U[3][3], long ell) {
    long gexp = 0;
    for (int i = 0; i < K.n; ++i) {
        for (int k = i; k < K.n; ++k) {
            long mi = std::min(e[i], e[k]);
            gexp += mi;
            if (mi == 0) continue;
            i64 m = pow_i64(ell, mi);
            i64 ui[3] = {0, 0, 0}, uk[3] = {0, 0, 0};
            for (int r = 0; r < K.n; ++r) { ui[r] = U[r][i] % m; uk[r] = U[r][k] % m; }
            if (i == k) {
                if (qform_mod(K, ui, m) % m != 0) return -1;
            } else {
                if (bilin_mod(K, ui, uk, m) % m != 0) return -1;
            }
        }
    }
    return gexp;
}

// cyclic test: subgroup <v / ell^a>, v any integer vector (need not be
// primitive); condition Q(v) == 0 mod ell^(a + v_l(content)) with the group
// size ell^(order exponent)
long g_exponent_cyclic(const KernelCtx& K, const i64 v[3], long a, long ell) {
    i64 m = pow_i64(ell, a);
    i64 vv[3] = {v[0] % m, v[1] % m, v[2] % m};
    if (qform_mod(K, vv, m) != 0) return -1;
    return a;
}

mpz_class mpz_from_i128(i128 x) {
    bool neg = x < 0;
    u128 u = neg ? u128(-x) : u128(x);
    mpz_class hi = mpz_class((unsigned long)(u >> 64));
    mpz_class r = (hi << 64) + mpz_class((unsigned long)(u & ~0ULL));
    return neg ? -r : r;
}

// enumerate all index-l^a sublattices (HNF) and accumulate G_a
mpz_class compute_G_a(const KernelCtx& K, long a, long ell, long budget, bool parallel,
                      u128& cells_used) {
    const int n = K.n;
    if (a == 0) return 1;
    long Kcap = a + 2;
    if (Kcap * std::log2((double)ell) > 61) throw resource_error("siegel kernel: modulus overflow");
    i64 mod = pow_i64(ell, Kcap);

    // estimate cells
    u128 est = 0;
    {
        std::function<void(int, long, u128)> rec = [&](int pos, long rem, u128 weight) {
            if (pos == n - 1) {
                // t_last = rem; weight *= prod over earlier pivots
                est += weight;
                return;
            }
            for (long t = 0; t <= rem; ++t) {
                u128 w = weight;
                // pivot col contributes d_pos^(n-1-pos... ) handled below per shape
                for (int q = pos + 1; q < n; ++q) w *= (u128)pow_i64(ell, t);
                rec(pos + 1, rem - t, w);
            }
        };
        rec(0, a, 1);
    }
    if (cells_used + est > (u128)budget) throw resource_error("siegel kernel: enumeration budget exceeded");
    cells_used += est;

    int bad = 0;

    if (n == 1) {
        // single subgroup l^-a Z/Z; g = l^a iff l^a | b
        i64 m = pow_i64(ell, a);
        if (((K.bdiag[0] % m) + m) % m == 0) return pow_z(ell, a);
        return 0;
    }

    mpz_class G = 0;

    // iterate over HNF divisor types (t1, .., tn), sum t = a
    std::vector<std::array<long, 3>> types;
    if (n == 2) {
        for (long t1 = 0; t1 <= a; ++t1) types.push_back({t1, a - t1, 0});
    } else {
        for (long t1 = 0; t1 <= a; ++t1)
            for (long t2 = 0; t1 + t2 <= a; ++t2) types.push_back({t1, t2, a - t1 - t2});
    }

    for (auto& t : types) {
        i64 d1 = pow_i64(ell, t[0]);
        i64 d2 = pow_i64(ell, t[1]);
        i64 d3 = (n == 3) ? pow_i64(ell, t[2]) : 1;

        if (n == 2) {
            // T = [[d1, x12],[0, d2]]; dual basis column scaled by l^a:
            // L = Z^2 + <(d2, -x12)/l^a> + <(0, d1)/l^a>
            // pure cells: (a,0): cyclic v=(1,-x12); (0,a): cyclic v=(0,1)
            if (t[1] == 0) {
                i64 m = pow_i64(ell, a);
                i128 sub = 0;
#pragma omp parallel for reduction(+ : sub) if (parallel && a >= 4)
                for (i64 x12 = 0; x12 < d1; ++x12) {
                    i64 v[3] = {1, ((-x12) % m + m) % m, 0};
                    long ge = g_exponent_cyclic(K, v, a, ell);
                    if (ge >= 0) sub += (i128)pow_i64(ell, ge);
                }
                G += mpz_from_i128(sub);
                continue;
            }
            if (t[0] == 0) {
                i64 v[3] = {0, 1, 0};
                long ge = g_exponent_cyclic(K, v, a, ell);
                if (ge >= 0) G += pow_z(ell, ge);
                continue;
            }
            // mixed 2x2 cells
            i128 sub = 0;
#pragma omp parallel for reduction(+ : sub) if (parallel && t[0] >= 4)
            for (i64 x12 = 0; x12 < d1; ++x12) {
                // N = adj(T)^t = [[d2, 0], [-x12, d1]]
                i64 N[3][3] = {{d2 % mod, 0, 0}, {((-x12) % mod + mod) % mod, d1 % mod, 0}, {0, 0, 1}};
                SnfResult R = snf_mod(N, 2, ell, Kcap, mod);
                long e[3] = {a - R.s[0], a - R.s[1], 0};
                if (e[0] < 0 || e[1] < 0) { bad = 1; continue; }
                long ge = g_exponent(K, e, R.U, ell);
                if (ge >= 0) sub += (i128)pow_i64(ell, ge);
            }
            G += mpz_from_i128(sub);
            continue;
        }

        // n == 3
        bool pure1 = (t[1] == 0 && t[2] == 0);
        bool pure2 = (t[0] == 0 && t[2] == 0);
        bool pure3 = (t[0] == 0 && t[1] == 0);
        i64 m = pow_i64(ell, a);

        if (pure3) {
            i64 v[3] = {0, 0, 1};
            long ge = g_exponent_cyclic(K, v, a, ell);
            if (ge >= 0) G += pow_z(ell, ge);
            continue;
        }
        if (pure2) {
            i128 sub = 0;
#pragma omp parallel for reduction(+ : sub) if (parallel && a >= 4)
            for (i64 x23 = 0; x23 < d2; ++x23) {
                i64 v[3] = {0, 1, ((-x23) % m + m) % m};
                long ge = g_exponent_cyclic(K, v, a, ell);
                if (ge >= 0) sub += (i128)pow_i64(ell, ge);
            }
            G += mpz_from_i128(sub);
            continue;
        }
        if (pure1) {
            i128 sub = 0;
#pragma omp parallel for collapse(2) reduction(+ : sub) if (parallel && a >= 3)
            for (i64 x12 = 0; x12 < d1; ++x12)
                for (i64 x13 = 0; x13 < d1; ++x13) {
                    i64 v[3] = {1, ((-x12) % m + m) % m, ((-x13) % m + m) % m};
                    long ge = g_exponent_cyclic(K, v, a, ell);
                    if (ge >= 0) sub += (i128)pow_i64(ell, ge);
                }
            G += mpz_from_i128(sub);
            continue;
        }

        // mixed 3x3 cells.  N = adj(T)^t for
        // T = [[d1,x12,x13],[0,d2,x23],[0,0,d3]]:
        // adj(T) = [[d2 d3, -x12 d3, x12 x23 - x13 d2],
        //           [0,     d1 d3,   -d1 x23],
        //           [0,     0,       d1 d2]]
        i128 sub = 0;
#pragma omp parallel for collapse(2) reduction(+ : sub) if (parallel)
        for (i64 x12 = 0; x12 < d1; ++x12)
            for (i64 x13 = 0; x13 < d1; ++x13) {
                for (i64 x23 = 0; x23 < d2; ++x23) {
                    // cheap necessary filter: the first dual basis vector
                    // w1 = (d2 d3, -x12 d3, x12 x23 - x13 d2) spans a cyclic
                    // subgroup of order l^(a - v(content)); test it first
                    i64 w1[3] = {mulmod(d2 % mod, d3 % mod, mod),
                                 mulmod(((-x12) % mod + mod) % mod, d3 % mod, mod),
                                 ((mulmod(((x12) % mod) % mod, x23 % mod, mod) - mulmod(x13 % mod, d2 % mod, mod)) % mod + mod) % mod};
                    {
                        long con = std::min({val_capped(w1[0], ell, a), val_capped(w1[1], ell, a), val_capped(w1[2], ell, a)});
                        long ord = a - con;
                        if (ord > 0) {
                            i64 mm = pow_i64(ell, ord);
                            i64 lc = pow_i64(ell, con);
                            i64 vv[3] = {w1[0] / lc % mm, w1[1] / lc % mm, w1[2] / lc % mm};
                            if (qform_mod(K, vv, mm) != 0) continue;
                        }
                    }
                    i64 N[3][3] = {{mulmod(d2, d3, mod), 0, 0},
                                   {mulmod(((-x12) % mod + mod) % mod, d3, mod), mulmod(d1, d3, mod), 0},
                                   {((mulmod(x12, x23, mod) - mulmod(x13, d2, mod)) % mod + mod) % mod,
                                    mulmod(((-x23) % mod + mod) % mod, d1, mod), mulmod(d1, d2, mod)}};
                    SnfResult R = snf_mod(N, 3, ell, Kcap, mod);
                    long e[3] = {a - R.s[0], a - R.s[1], a - R.s[2]};
                    if (e[0] < 0 || e[1] < 0 || e[2] < 0) { bad = 1; continue; }
                    long ge = g_exponent(K, e, R.U, ell);
                    if (ge >= 0) sub += (i128)pow_i64(ell, ge);
                }
            }
        G += mpz_from_i128(sub);
    }
    if (bad) throw internal_error("siegel kernel: inconsistent lattice profile");
    return G;
}

} // namespace

mpz_class nu_level_exp_check(const std::vector<std::vector<mpq_class>>& z, long ell, long& j_out,
                             std::array<std::array<mpz_class, 3>, 3>& Y, int& n_out) {
    size_t n = z.size();
    if (n < 1 || n > 3) throw domain_error("nu_level: size 1..3");
    long j = 0;
    for (size_t i = 0; i < n; ++i) {
        if (z[i].size() != n) throw domain_error("nu_level: not square");
        for (size_t k = 0; k < n; ++k) {
            if (z[i][k] != z[k][i]) throw domain_error("nu_level: not symmetric");
            mpz_class den = z[i][k].get_den();
            if (den != 1) {
                mpz_class d = den;
                long v = 0;
                while (mpz_divisible_ui_p(d.get_mpz_t(), ell)) {
                    mpz_divexact_ui(d.get_mpz_t(), d.get_mpz_t(), ell);
                    ++v;
                }
                if (d != 1) throw domain_error("nu_level: denominator not an ell-power");
                j = std::max(j, v);
            }
        }
    }
    for (auto& row : Y) row = {mpz_class(0), mpz_class(0), mpz_class(0)};
    mpz_class lj = pow_z(ell, j);
    for (size_t i = 0; i < n; ++i)
        for (size_t k = 0; k < n; ++k) {
            mpq_class q = z[i][k] * mpq_class(lj);
            if (q.get_den() != 1) throw internal_error("nu_level: scaling");
            Y[i][k] = q.get_num();
        }
    j_out = j;
    n_out = int(n);
    return 0;
}

mpz_class nu_level(const std::vector<std::vector<mpq_class>>& z, long ell) {
    long j;
    int n;
    std::array<std::array<mpz_class, 3>, 3> Y;
    nu_level_exp_check(z, ell, j, Y, n);
    if (j == 0) return 1;
    long e = nu_exponent_from_lift(Y, n, ell, j);
    return pow_z(ell, e);
}

mpq_class siegel_coefficient(const HalfIntegralMatrix& B, long ell, long j, const SiegelOptions& opt) {
    if (B.det2B() == 0) throw domain_error("siegel_coefficient: det B = 0");
    if (j == 0) return 1;
    int n = B.n;
    int m = n * (n + 1) / 2;
    // term count l^(j*m)
    double logt = j * m * std::log2((double)ell);
    if (logt > 62 || pow_i64(ell, j * m) > (i64)opt.budget)
        throw resource_error("siegel_coefficient: enumeration budget exceeded");
    i64 lj = pow_i64(ell, j);
    std::vector<long long> cnt(lj, 0);

    // iterate y over Sym_n(Z/l^j); t(y) = sum b_ii y_ii + sum c_ij y_ij
    std::array<std::array<mpz_class, 3>, 3> Y;
    std::vector<i64> diag(n), off(m - n);
    std::function<void(int)> recurse;
    std::vector<i64> entries(m, 0);
    auto eval = [&]() {
        // unpack into Y
        for (auto& row : Y) row = {mpz_class(0), mpz_class(0), mpz_class(0)};
        int idx = 0;
        for (int i = 0; i < n; ++i) Y[i][i] = (long)entries[idx++];
        if (n >= 2) { Y[0][1] = Y[1][0] = (long)entries[idx]; ++idx; }
        if (n >= 3) {
            Y[0][2] = Y[2][0] = (long)entries[idx]; ++idx;
            Y[1][2] = Y[2][1] = (long)entries[idx]; ++idx;
        }
        long e = nu_exponent_from_lift(Y, n, ell, j);
        if (e != j) return;
        i128 t = 0;
        int k = 0;
        for (int i = 0; i < n; ++i) t += (i128)B.b[i] * entries[k++];
        if (n >= 2) t += (i128)B.c[2] * entries[k++];
        if (n >= 3) {
            t += (i128)B.c[1] * entries[k++];
            t += (i128)B.c[0] * entries[k++];
        }
        i64 tm = i64(((t % lj) + lj) % lj);
        // psi(-tr(Bz)) = zeta^(-t)
        cnt[(lj - tm) % lj] += 1;
    };
    recurse = [&](int pos) {
        if (pos == m) { eval(); return; }
        for (i64 x = 0; x < lj; ++x) {
            entries[pos] = x;
            recurse(pos + 1);
        }
    };
    recurse(0);

    // assemble in Q(zeta_{l^j}) and assert rationality
    CycQ s(ell, j, mpq_class(0));
    for (i64 t = 0; t < lj; ++t)
        if (cnt[t]) s.add_root_power(t, mpq_class((long)cnt[t]));
    auto r = s.rational_value();
    if (!r) throw internal_error("siegel_coefficient: non-rational orbit sum");
    return *r;
}

std::vector<mpz_class> siegel_subgroup_sums(const HalfIntegralMatrix& B, long ell, long A,
                                            const SiegelOptions& opt, bool parallel) {
    KernelCtx K{B.n, ell, {B.b[0], B.b[1], B.b[2]}, {B.c[0], B.c[1], B.c[2]}};
    std::vector<mpz_class> G(A + 1);
    u128 used = 0;
    if (opt.threads > 0) omp_set_num_threads(opt.threads);
    for (long a = 0; a <= A; ++a) G[a] = compute_G_a(K, a, ell, opt.budget, parallel, used);
    return G;
}

std::vector<mpz_class> siegel_series_kernel(const HalfIntegralMatrix& B, long ell, long J,
                                            const SiegelOptions& opt, bool parallel) {
    auto G = siegel_subgroup_sums(B, ell, J, opt, parallel);
    // multiply by prod_{i=0}^{n-1} (1 - l^i t)
    std::vector<mpz_class> c(G.begin(), G.end());
    for (int i = 0; i < B.n; ++i) {
        mpz_class li = pow_z(ell, i);
        for (long j = long(c.size()) - 1; j >= 1; --j) c[j] -= li * c[j - 1];
    }
    return c;
}

namespace {

// quadratic character chi_l(d): 1 square, -1 unramified nonsquare, 0 ramified
int quad_char(const mpz_class& d, long ell) {
    if (d == 0) throw domain_error("quad_char of 0");
    mpz_class u = d < 0 ? -d : d;
    long v = valuation(u, ell);
    mpz_class w = (d < 0 ? -d : d) / pow_z(ell, v);
    if (d < 0) w = -w;
    if (v % 2 == 1) return 0;
    if (ell == 2) {
        mpz_class r = ((w % 8) + 8) % 8;
        if (r == 1) return 1;
        if (r == 5) return -1;
        return 0;
    }
    mpz_class lz = ell;
    int k = mpz_legendre(w.get_mpz_t(), lz.get_mpz_t());
    return k;
}

// divide the c-series by the universal factor for rank n; returns the
// quotient coefficients (power-series division)
std::vector<mpq_class> divide_universal(const std::vector<mpz_class>& c, int n, long ell, int xi) {
    // universal factor gamma_n(t):
    //   n=1: (1-t); n=2: (1-t)(1-xi l t); n=3: (1-t)(1-l^2 t^2)
    std::vector<mpz_class> gamma = {1};
    auto mul_lin = [&](const mpz_class& a1, const mpz_class& a2) {
        // multiply by (1 + a1 t + a2 t^2)
        std::vector<mpz_class> r(gamma.size() + 2, 0);
        for (size_t i = 0; i < gamma.size(); ++i) {
            r[i] += gamma[i];
            r[i + 1] += a1 * gamma[i];
            r[i + 2] += a2 * gamma[i];
        }
        gamma = std::move(r);
    };
    mul_lin(-1, 0);
    if (n == 2) mul_lin(mpz_class(-xi) * ell, 0);
    if (n == 3) mul_lin(0, -pow_z(ell, 2));
    // power-series division c / gamma
    std::vector<mpq_class> q(c.size());
    for (size_t j = 0; j < c.size(); ++j) {
        mpq_class acc = mpq_class(c[j]);
        for (size_t i = 1; i < gamma.size() && i <= j; ++i) acc -= mpq_class(gamma[i]) * q[j - i];
        q[j] = acc; // gamma[0] = 1
    }
    return q;
}

} // namespace

namespace {
struct FCacheKey {
    int n;
    std::array<long, 3> b, c;
    long ell;
    bool operator<(const FCacheKey& o) const {
        return std::tie(n, b, c, ell) < std::tie(o.n, o.b, o.c, o.ell);
    }
};
std::map<FCacheKey, SiegelPolynomial> f_cache;

// Jordan class of the lattice at an odd prime: diagonalize the Gram matrix
// 2B over Z_(l) and record sorted (scale, square-class) pairs.  F_{B,l}
// depends only on this class, so it keys a shared cache.
std::optional<std::array<long, 6>> jordan_key(const HalfIntegralMatrix& B, long ell) {
    if (ell == 2 || B.n != 3) return std::nullopt;
    long v = valuation(B.det2B(), ell);
    long Kc = v + 3;
    if (Kc * std::log2((double)ell) > 60) return std::nullopt;
    i64 mod = pow_i64(ell, Kc);
    auto M0 = B.doubled();
    i64 A[3][3];
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            mpz_class r = M0[i][j] % mpz_class((long)mod);
            if (r < 0) r += mpz_class((long)mod);
            A[i][j] = r.get_si();
        }
    std::array<long, 6> key{};
    for (int d = 0; d < 3; ++d) {
        // find entry of minimal valuation in the trailing block
        long bestv = Kc + 1;
        int bi = -1, bj = -1;
        for (int i = d; i < 3; ++i)
            for (int j = d; j < 3; ++j) {
                long vv = val_capped(A[i][j], ell, Kc);
                if (vv < bestv) { bestv = vv; bi = i; bj = j; }
            }
        if (bi < 0 || bestv > Kc) return std::nullopt;
        if (bi != bj) {
            // make it diagonal: e_bi += e_bj (or -=), keeping min valuation
            for (int s : {1, -1}) {
                i64 q = (A[bi][bi] + 2LL * s * A[bi][bj] % mod + A[bj][bj]) % mod;
                q = ((q % mod) + mod) % mod;
                if (val_capped(q, ell, Kc) == bestv) {
                    for (int j = 0; j < 3; ++j)
                        A[bi][j] = ((A[bi][j] + s * A[bj][j]) % mod + mod) % mod;
                    for (int i = 0; i < 3; ++i)
                        A[i][bi] = ((A[i][bi] + s * A[i][bj]) % mod + mod) % mod;
                    break;
                }
            }
            if (val_capped(A[bi][bi], ell, Kc) != bestv) return std::nullopt;
            bj = bi;
        }
        if (bi != d) {
            for (int j = 0; j < 3; ++j) std::swap(A[bi][j], A[d][j]);
            for (int i = 0; i < 3; ++i) std::swap(A[i][bi], A[i][d]);
        }
        // clear row/col d with the diagonal pivot
        i64 pv = pow_i64(ell, bestv);
        i64 punit = (A[d][d] / pv) % mod;
        i64 pinv = inv_mod_i64(((punit % mod) + mod) % mod, mod);
        for (int i = d + 1; i < 3; ++i) {
            if (A[i][d] % mod == 0) continue;
            i64 q = mulmod(((A[i][d] / pv) % mod + mod) % mod, pinv, mod);
            for (int j = 0; j < 3; ++j)
                A[i][j] = ((A[i][j] - mulmod(q, A[d][j], mod)) % mod + mod) % mod;
            for (int j = 0; j < 3; ++j)
                A[j][i] = ((A[j][i] - mulmod(q, A[j][d], mod)) % mod + mod) % mod;
        }
        long scale = bestv;
        i64 unit = (A[d][d] / pow_i64(ell, scale)) % ell;
        mpz_class u((long)unit), lz(ell);
        int chi = mpz_legendre(u.get_mpz_t(), lz.get_mpz_t());
        key[2 * d] = scale;
        key[2 * d + 1] = chi;
    }
    // sort by scale for canonicity
    std::array<std::pair<long, long>, 3> parts = {
        std::make_pair(key[0], key[1]), std::make_pair(key[2], key[3]), std::make_pair(key[4], key[5])};
    std::sort(parts.begin(), parts.end());
    return std::array<long, 6>{parts[0].first, parts[0].second, parts[1].first,
                               parts[1].second, parts[2].first, parts[2].second};
}

std::map<std::array<long, 7>, SiegelPolynomial> f_class_cache;
} // namespace

SiegelPolynomial siegel_polynomial(const HalfIntegralMatrix& B, long ell, const SiegelOptions& opt, bool strict) {
    FCacheKey key{B.n, B.b, B.c, ell};
    std::optional<std::array<long, 7>> ckey;
    if (!strict) {
        auto it = f_cache.find(key);
        if (it != f_cache.end()) return it->second;
        if (auto jk = jordan_key(B, ell)) {
            ckey = std::array<long, 7>{ell, (*jk)[0], (*jk)[1], (*jk)[2], (*jk)[3], (*jk)[4], (*jk)[5]};
            auto cit = f_class_cache.find(*ckey);
            if (cit != f_class_cache.end()) {
                f_cache.emplace(key, cit->second);
                return cit->second;
            }
        }
    }
    mpz_class d = B.det2B();
    if (d == 0) throw domain_error("siegel_polynomial: det B = 0");
    long v = valuation(d, ell);
    long Jspec = valuation(mpz_class(16) * abs(d), ell) + 4;
    long dhat = v; // degree estimate (observed: = v for odd l, v-1 for l = 2)
    long J = Jspec;
    if (!strict) {
        // adaptive: at least through the degree estimate, then as many
        // verification coefficients as a small cell budget affords
        // (the l = 2 kernel is cheap per cell but runs once per matrix;
        // odd-l results are shared through the Jordan-class cache)
        double verify_cells = std::min((double)opt.budget, ell == 2 ? 2.5e3 : 2.5e5);
        J = dhat;
        for (long j = dhat + 1; j <= Jspec; ++j) {
            double cost = 2.1 * std::pow((double)ell, 2.0 * j) * (B.n == 3 ? 1.0 : 0.1);
            if (cost > verify_cells) break;
            J = j;
        }
    }
    auto c = siegel_series_kernel(B, ell, J, opt, true);
    int xi = (B.n == 2) ? -quad_char(-d, ell) : 0;
    auto q = divide_universal(c, B.n, ell, xi);
    // locate degree: last nonzero
    long deg = -1;
    for (long j = 0; j < long(q.size()); ++j)
        if (q[j] != 0) deg = j;
    if (deg < 0) throw internal_error("siegel_polynomial: zero series");
    long extra = long(q.size()) - 1 - deg;
    if (strict && extra < 3)
        throw internal_error("siegel_polynomial: series did not stabilize within J; partial degree " + std::to_string(deg));
    if (!strict && deg > dhat)
        throw internal_error("siegel_polynomial: degree bound " + std::to_string(dhat) +
                             " violated (got " + std::to_string(deg) + ") for " + B.str());
    SiegelPolynomial F;
    F.ell = ell;
    F.verified_extra = extra;
    F.coeff.resize(deg + 1);
    for (long j = 0; j <= deg; ++j) {
        if (q[j].get_den() != 1)
            throw internal_error("siegel_polynomial: non-integral coefficient");
        F.coeff[j] = q[j].get_num();
    }
    if (F.coeff[0] != 1) throw internal_error("siegel_polynomial: F(0) != 1");
    if (!strict) {
        static long next_id = 1;
        F.id = next_id++;
        f_cache.emplace(key, F);
        if (ckey) f_class_cache.emplace(*ckey, F);
    }
    return F;
}

Padic SiegelPolynomial::eval(const Padic& x) const {
    Padic r = Padic::zero(x.p(), x.prec());
    for (long j = long(coeff.size()) - 1; j >= 0; --j)
        r = r * x + Padic::from_integer(coeff[j], x.p(), x.prec());
    return r;
}

IwasawaSeries SiegelPolynomial::eval(const IwasawaSeries& x) const {
    IwasawaSeries r = IwasawaSeries::constant(Padic::zero(x.p(), x.prec()), x.caps());
    for (long j = long(coeff.size()) - 1; j >= 0; --j) {
        r = r * x;
        r = r + IwasawaSeries::constant(Padic::from_integer(coeff[j], x.p(), x.prec()), x.caps());
    }
    return r;
}

mpq_class SiegelPolynomial::eval(const mpq_class& x) const {
    mpq_class r = 0;
    for (long j = long(coeff.size()) - 1; j >= 0; --j) r = r * x + mpq_class(coeff[j]);
    return r;
}

std::vector<long> prime_factors(const mpz_class& n) {
    static std::map<mpz_class, std::vector<long>> memo;
    auto mit = memo.find(n);
    if (mit != memo.end()) return mit->second;
    std::vector<long> out;
    mpz_class m = abs(n);
    if (m <= 1) return out;
    mpz_class f = 2;
    while (f * f <= m) {
        if (mpz_divisible_p(m.get_mpz_t(), f.get_mpz_t())) {
            out.push_back(f.get_si());
            while (mpz_divisible_p(m.get_mpz_t(), f.get_mpz_t())) m /= f;
        }
        f += (f == 2) ? 1 : 2;
    }
    if (m > 1) {
        if (!m.fits_slong_p()) throw resource_error("prime_factors: factor too large");
        out.push_back(m.get_si());
    }
    memo.emplace(n, out);
    return out;
}

Padic a_B_scalar(const HalfIntegralMatrix& B, const std::vector<long>& excluded,
                 const std::function<Padic(long)>& eval_at, long p, long prec,
                 const SiegelOptions& opt) {
    if (B.det2B() == 0) throw domain_error("a_B: det B = 0");
    Padic r(p, 0, 1, prec);
    static std::map<std::tuple<long, long, mpz_class>, Padic> eval_memo;
    for (long ell : prime_factors(B.det2B())) {
        if (std::find(excluded.begin(), excluded.end(), ell) != excluded.end()) continue;
        SiegelPolynomial F = siegel_polynomial(B, ell, opt, false);
        Padic x = eval_at(ell);
        if (F.id != 0 && !x.is_zero()) {
            auto key = std::make_tuple(F.id, x.val(), x.unit());
            auto it = eval_memo.find(key);
            if (it == eval_memo.end()) it = eval_memo.emplace(key, F.eval(x)).first;
            r = r * it->second;
        } else {
            r = r * F.eval(x);
        }
    }
    return r;
}

IwasawaSeries a_B_series(const HalfIntegralMatrix& B, const std::vector<long>& excluded,
                         const std::function<IwasawaSeries(long)>& eval_at, long p, Caps caps,
                         long prec, const SiegelOptions& opt) {
    if (B.det2B() == 0) throw domain_error("a_B: det B = 0");
    IwasawaSeries r = IwasawaSeries::one(p, caps, prec);
    for (long ell : prime_factors(B.det2B())) {
        if (std::find(excluded.begin(), excluded.end(), ell) != excluded.end()) continue;
        SiegelPolynomial F = siegel_polynomial(B, ell, opt, false);
        r = r * F.eval(eval_at(ell));
    }
    return r;
}

} // namespace teis
