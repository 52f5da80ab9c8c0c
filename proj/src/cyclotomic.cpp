#include "teis/cyclotomic.hpp"

namespace teis {

bool cyc_is_zero(const mpq_class& x) { return x == 0; }
bool cyc_is_zero(const Padic& x) { return x.is_zero(); }

template <class K>
Cyclotomic<K>::Cyclotomic(long q, long r, K zero)
    : q_(q), r_(r), zero_(std::move(zero)) {
    if (q < 2 || r < 1) throw domain_error("Cyclotomic: bad prime power");
    m_ = 1;
    for (long i = 0; i < r; ++i) m_ *= q;
    phi_ = m_ / q * (q - 1);
    c_.assign(m_, zero_);
}

template <class K>
Cyclotomic<K> Cyclotomic<K>::root_power(long q, long r, long e, const K& one, const K& zero) {
    Cyclotomic<K> x(q, r, zero);
    x.add_root_power(e, one);
    return x;
}

template <class K>
void Cyclotomic<K>::add_root_power(long e, const K& c) {
    e %= m_;
    if (e < 0) e += m_;
    c_[e] = c_[e] + c;
}

template <class K>
Cyclotomic<K> Cyclotomic<K>::operator+(const Cyclotomic& o) const {
    if (m_ != o.m_) throw domain_error("Cyclotomic: mixed moduli");
    Cyclotomic r = *this;
    for (long i = 0; i < m_; ++i) r.c_[i] = r.c_[i] + o.c_[i];
    return r;
}

template <class K>
Cyclotomic<K> Cyclotomic<K>::operator-(const Cyclotomic& o) const {
    if (m_ != o.m_) throw domain_error("Cyclotomic: mixed moduli");
    Cyclotomic r = *this;
    for (long i = 0; i < m_; ++i) r.c_[i] = r.c_[i] - o.c_[i];
    return r;
}

template <class K>
Cyclotomic<K> Cyclotomic<K>::operator*(const Cyclotomic& o) const {
    if (m_ != o.m_) throw domain_error("Cyclotomic: mixed moduli");
    Cyclotomic r(q_, r_, zero_);
    for (long i = 0; i < m_; ++i) {
        if (cyc_is_zero(c_[i])) continue;
        for (long j = 0; j < m_; ++j) {
            if (cyc_is_zero(o.c_[j])) continue;
            long e = (i + j) % m_;
            r.c_[e] = r.c_[e] + c_[i] * o.c_[j];
        }
    }
    return r;
}

template <class K>
Cyclotomic<K> Cyclotomic<K>::scale(const K& c) const {
    Cyclotomic r = *this;
    for (long i = 0; i < m_; ++i) r.c_[i] = r.c_[i] * c;
    return r;
}

template <class K>
std::vector<K> Cyclotomic<K>::canonical() const {
    // reduce through x^(phi + s) = - sum_{i<q-1} x^(i*q^(r-1) + s)
    std::vector<K> a = c_;
    long step = m_ / q_;
    for (long e = m_ - 1; e >= phi_; --e) {
        if (cyc_is_zero(a[e])) continue;
        long s = e - phi_;
        for (long i = 0; i + 1 < q_; ++i) {
            long t = i * step + s;
            a[t] = a[t] - a[e];
        }
        a[e] = zero_;
    }
    a.resize(phi_, zero_);
    return a;
}

template <class K>
std::optional<K> Cyclotomic<K>::rational_value() const {
    std::vector<K> a = canonical();
    for (long i = 1; i < phi_; ++i)
        if (!cyc_is_zero(a[i])) return std::nullopt;
    return a[0];
}

template class Cyclotomic<mpq_class>;
template class Cyclotomic<Padic>;

} // namespace teis
