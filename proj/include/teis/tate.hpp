#ifndef TEIS_TATE_HPP
#define TEIS_TATE_HPP

#include "teis/padic.hpp"
#include <vector>

namespace teis {

/// coefficients c(-1)..c(nterms-2) of the j-series q^{-1} + 744 + 196884 q + ...,
/// built from E4^3 / Delta with Delta the eta-product expansion
std::vector<mpz_class> j_series(long nterms);

/// evaluate the truncated j-series at a p-adic q with v(q) >= 1
Padic j_eval(const Padic& q, long nterms);

/// invert j(q) = j for v_p(j) < 0 by Newton iteration; v_p(q) = -v_p(j)
Padic tate_period(const Padic& j, long prec);

} // namespace teis

#endif
