#include "lmio/waves.hpp"

#include <cmath>

namespace lmio {

static void check_mode(int n, double lambda, double r) {
    if (n < 0) throw std::domain_error("vector wave: azimuthal order must be >= 0");
    if (!(lambda >= 0.0)) throw std::domain_error("vector wave: lambda must be >= 0");
    if (!(r >= 0.0)) throw std::domain_error("vector wave: radius must be >= 0");
}

MProfile m_profile(int n, Parity parity, double lambda, double r, double psi) {
    check_mode(n, lambda, r);
    const double x = lambda * r;
    const BesselJ bj = bessel_j(n, x);
    // n J_n(lambda r)/r = n lambda J_n(x)/x ; dJ_n(lambda r)/dr = lambda J_n'(x)
    const double nj_over_r = (n == 0) ? 0.0 : double(n) * lambda * jn_over_x(n, x);
    const double djdr = lambda * bj.jp;
    const double cn = std::cos(n * psi), sn = std::sin(n * psi);
    MProfile p;
    if (parity == Parity::Even)
        p.v = {cplx(-nj_over_r * sn), cplx(-djdr * cn), cplx(0.0)};
    else
        p.v = {cplx(+nj_over_r * cn), cplx(-djdr * sn), cplx(0.0)};
    return p;
}

NProfile n_profile(int n, Parity parity, double lambda, double r, double psi) {
    check_mode(n, lambda, r);
    const double x = lambda * r;
    const BesselJ bj = bessel_j(n, x);
    const double nj_over_r = (n == 0) ? 0.0 : double(n) * lambda * jn_over_x(n, x);
    const double djdr = lambda * bj.jp;
    const double l2j = lambda * lambda * bj.j;
    const double cn = std::cos(n * psi), sn = std::sin(n * psi);
    NProfile p;
    if (parity == Parity::Even) {
        p.t = {cplx(djdr * cn), cplx(-nj_over_r * sn), cplx(0.0)};
        p.z = {cplx(0.0), cplx(0.0), cplx(l2j * cn)};
    } else {
        p.t = {cplx(djdr * sn), cplx(+nj_over_r * cn), cplx(0.0)};
        p.z = {cplx(0.0), cplx(0.0), cplx(l2j * sn)};
    }
    return p;
}

CVec3 vector_wave_M(const ModeIndex& mode, cplx h, const CylPoint& p) {
    const MProfile mp = m_profile(mode.n, mode.parity, mode.lambda, p.r, p.psi);
    const cplx ph = std::exp(cplx(0.0, 1.0) * h * p.z);
    return {mp.v[0] * ph, mp.v[1] * ph, mp.v[2] * ph};
}

CVec3 vector_wave_N(const ModeIndex& mode, cplx h, cplx k, const CylPoint& p) {
    if (std::abs(k) < 1e-30)
        throw std::domain_error("vector_wave_N: |k| below 1e-30 is degenerate");
    const NProfile np = n_profile(mode.n, mode.parity, mode.lambda, p.r, p.psi);
    const cplx ih = cplx(0.0, 1.0) * h;
    const cplx ph = std::exp(cplx(0.0, 1.0) * h * p.z) / k;
    return {(ih * np.t[0] + np.z[0]) * ph,
            (ih * np.t[1] + np.z[1]) * ph,
            (ih * np.t[2] + np.z[2]) * ph};
}

CVec3 cyl_to_cart(const CVec3& v, double psi) {
    const double c = std::cos(psi), s = std::sin(psi);
    return {v[0] * c - v[1] * s, v[0] * s + v[1] * c, v[2]};
}

} // namespace lmio
