#include "lmio/green.hpp"

#include <cmath>

namespace lmio {

Complex3Tensor free_green(cplx eps, double omega, const Vec3& r, const Vec3& s,
                          const Units& units) {
    const double dx = r.x - s.x, dy = r.y - s.y, dz = r.z - s.z;
    const double R = std::sqrt(dx * dx + dy * dy + dz * dz);
    if (R < 1e-12)
        throw std::domain_error("free_green: coincident field and source points");
    const cplx k = wavenumber(eps, omega, units.c);
    const cplx kR = k * R;
    if (std::abs(kR) < 1e-150)
        throw std::domain_error("free_green: k R too small");
    const cplx I(0.0, 1.0);
    const cplx g = std::exp(I * kR) / (4.0 * pi * R);
    const cplx A = 1.0 + I / kR - 1.0 / (kR * kR);
    const cplx B = -1.0 - 3.0 * I / kR + 3.0 / (kR * kR);
    const double n[3] = {dx / R, dy / R, dz / R};
    Complex3Tensor G;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            G(i, j) = g * (A * (i == j ? 1.0 : 0.0) + B * n[i] * n[j]);
    return G;
}

double resolve_lambda_max(const LayerStack& stack, double omega,
                          const QuadratureSpec& quad, const Units& units) {
    if (quad.lambda_max > 0.0) return quad.lambda_max;
    double kmax = 0.0;
    for (int q = 0; q < stack.num_regions(); ++q)
        kmax = std::max(kmax, std::abs(wavenumber(stack.medium(q).permittivity(omega),
                                                  omega, units.c)));
    return 20.0 * kmax;
}

std::vector<double> branch_point_magnitudes(const LayerStack& stack, double omega,
                                            const Units& units) {
    std::vector<double> b;
    for (int q = 0; q < stack.num_regions(); ++q)
        b.push_back(std::abs(wavenumber(stack.medium(q).permittivity(omega),
                                        omega, units.c)));
    return b;
}

namespace {

struct CylCoords {
    double rho, psi;
};

CylCoords about_axis(double x, double y, double ax, double ay) {
    const double dx = x - ax, dy = y - ay;
    const double rho = std::hypot(dx, dy);
    return {rho, rho > 0.0 ? std::atan2(dy, dx) : 0.0};
}

CVec3 n_vector(const NProfile& p, cplx h, cplx k, double psi) {
    const cplx ih = cplx(0.0, 1.0) * h;
    CVec3 v = {(ih * p.t[0] + p.z[0]) / k, (ih * p.t[1] + p.z[1]) / k,
               (ih * p.t[2] + p.z[2]) / k};
    return cyl_to_cart(v, psi);
}

cplx slot_factor(const ScaledAmp& a, cplx extra) {
    if (a.zero()) return {0.0, 0.0};
    return a.mant * std::exp(a.expo + extra);
}

} // namespace

GreenResult scattering_green_about_axis(const LayerStack& stack, double omega,
                                        int F, int S, const Vec3& r, const Vec3& s,
                                        double axis_x, double axis_y, int n_max,
                                        const QuadratureSpec& quad_in,
                                        const Units& units) {
    if (F < 0 || F >= stack.num_regions() || S < 0 || S >= stack.num_regions())
        throw std::invalid_argument("scattering_green: region index out of range");
    const double scale = stack.total_thickness() + units.c / omega;
    const double tol = 1e-9 * scale;
    if (!stack.in_region(r.z, F, tol))
        throw std::invalid_argument("scattering_green: field point not in field region");
    if (!stack.in_region(s.z, S, tol))
        throw std::invalid_argument("scattering_green: source point not in source region");
    if (n_max < 0) throw std::invalid_argument("scattering_green: n_max must be >= 0");

    QuadratureSpec quad = quad_in;
    quad.lambda_max = resolve_lambda_max(stack, omega, quad_in, units);
    quad.validate();

    const CylCoords cr = about_axis(r.x, r.y, axis_x, axis_y);
    const CylCoords cs = about_axis(s.x, s.y, axis_x, axis_y);
    const cplx I(0.0, 1.0);
    const double stop = 0.01 * quad.rel_tol;

    int n_used = 0;
    bool n_capped = false;
    double az_ratio = 0.0;

    auto integrand = [&](double lam) -> Complex3Tensor {
        Complex3Tensor acc{};
        if (lam <= 0.0) return acc;
        StackModeContext cTE(stack, omega, cplx(lam), Pol::TE, units);
        StackModeContext cTM(stack, omega, cplx(lam), Pol::TM, units);
        const RegionAmps aTE = source_amplitudes(cTE, S)[F];
        const RegionAmps aTM = source_amplitudes(cTM, S)[F];
        const cplx hF = cTE.h(F), hS = cTE.h(S);
        const cplx kF = cTM.k(F), kS = cTM.k(S);
        const cplx e_fp = I * hF * r.z, e_fm = -I * hF * r.z;  // field e^{+-i h_F z_r}
        const cplx e_sm = -I * hS * s.z, e_sp = I * hS * s.z;  // source tags

        double prev_norm = -1.0;
        double tail = 0.0;
        int n = 0;
        for (n = 0; n <= n_max; ++n) {
            Complex3Tensor term{};
            const double wn = (n == 0 ? 1.0 : 2.0);
            for (int par = 0; par < (n == 0 ? 1 : 2); ++par) {
                const Parity parity = par == 0 ? Parity::Even : Parity::Odd;
                const cplx w = wn / (lam * hS);
                // TE: the M profile is independent of the propagation direction.
                {
                    const CVec3 mf = cyl_to_cart(m_profile(n, parity, lam, cr.rho, cr.psi).v, cr.psi);
                    const CVec3 ms = cyl_to_cart(m_profile(n, parity, lam, cs.rho, cs.psi).v, cs.psi);
                    const cplx f = slot_factor(aTE.v_minus, e_fm + e_sm) +
                                   slot_factor(aTE.v_plus, e_fm + e_sp) +
                                   slot_factor(aTE.u_minus, e_fp + e_sm) +
                                   slot_factor(aTE.u_plus, e_fp + e_sp);
                    if (f != cplx(0.0)) term += (w * f) * outer(mf, ms);
                }
                // TM: N carries the sign of h.
                {
                    const NProfile nfp = n_profile(n, parity, lam, cr.rho, cr.psi);
                    const NProfile nsp = n_profile(n, parity, lam, cs.rho, cs.psi);
                    const CVec3 nf_p = n_vector(nfp, hF, kF, cr.psi);
                    const CVec3 nf_m = n_vector(nfp, -hF, kF, cr.psi);
                    const CVec3 ns_m = n_vector(nsp, -hS, kS, cs.psi);
                    const CVec3 ns_p = n_vector(nsp, hS, kS, cs.psi);
                    const cplx fA = slot_factor(aTM.v_minus, e_fm + e_sm);
                    const cplx fB = slot_factor(aTM.v_plus, e_fm + e_sp);
                    const cplx fC = slot_factor(aTM.u_minus, e_fp + e_sm);
                    const cplx fD = slot_factor(aTM.u_plus, e_fp + e_sp);
                    if (fA != cplx(0.0)) term += (w * fA) * outer(nf_m, ns_m);
                    if (fB != cplx(0.0)) term += (w * fB) * outer(nf_m, ns_p);
                    if (fC != cplx(0.0)) term += (w * fC) * outer(nf_p, ns_m);
                    if (fD != cplx(0.0)) term += (w * fD) * outer(nf_p, ns_p);
                }
            }
            acc += term;
            const double tn = term.frobenius();
            const double an = acc.frobenius();
            if (n >= 1 && tn <= stop * an && prev_norm >= 0.0 && prev_norm <= stop * an) {
                tail = tn + prev_norm;
                break;
            }
            prev_norm = tn;
            tail = tn + std::max(prev_norm, 0.0);
        }
        if (n > n_max) {
            n_capped = true;
            n = n_max;
        }
        n_used = std::max(n_used, n);
        const double an = acc.frobenius();
        if (an > 0.0) az_ratio = std::max(az_ratio, tail / an);
        return acc;
    };

    auto norm = [](const Complex3Tensor& t) { return t.frobenius(); };
    auto out = detail::adaptive_gk<Complex3Tensor>(
        integrand, 0.0, quad.lambda_max, branch_point_magnitudes(stack, omega, units),
        quad.rel_tol, quad.abs_tol, quad.max_subdivisions, norm);

    const double dx = 0.05 * quad.lambda_max;
    const double tail = detail::tail_bound(integrand(quad.lambda_max - dx).frobenius(),
                                           integrand(quad.lambda_max).frobenius(), dx,
                                           quad.lambda_max);

    GreenResult res;
    res.value = (I / (4.0 * pi)) * out.value;
    res.azimuthal_error = 4.0 * az_ratio * res.value.frobenius();
    res.error_bound = (out.error + tail) / (4.0 * pi) + res.azimuthal_error;
    res.converged = out.converged && !n_capped;
    res.n_used = n_used;
    res.n_truncated = n_capped;
    return res;
}

GreenResult scattering_green(const LayerStack& stack, double omega, int F, int S,
                             const Vec3& r, const Vec3& s, int n_max,
                             const QuadratureSpec& quad, const Units& units) {
    // Axis through the source's transverse position: the azimuthal sum then
    // terminates at n = 1 exactly.
    return scattering_green_about_axis(stack, omega, F, S, r, s, s.x, s.y, n_max,
                                       quad, units);
}

GreenResult green_part(const LayerStack& stack, double omega, const GreenPartLabel& label,
                       const Vec3& r, const Vec3& s, int n_max,
                       const QuadratureSpec& quad, const Units& units) {
    const int P = stack.num_regions() - 1;
    if (label.field_region != 0 && label.field_region != P)
        throw std::invalid_argument("green_part: field region must be a half space");
    const double scale = stack.total_thickness() + units.c / omega;
    const double tol = 1e-9 * scale;
    if (!stack.in_region(r.z, label.field_region, tol))
        throw std::invalid_argument("green_part: field point not in the labelled region");
    if (label.source_region == kFreeSource) {
        if (!stack.in_region(s.z, label.field_region, tol))
            throw std::invalid_argument("green_part: free-part source point must lie in the field region");
        GreenResult res;
        res.value = free_green(stack.medium(label.field_region).permittivity(omega),
                               omega, r, s, units);
        return res;
    }
    if (label.source_region < 0 || label.source_region > P)
        throw std::invalid_argument("green_part: bad source region");
    if (!stack.in_region(s.z, label.source_region, tol))
        throw std::invalid_argument("green_part: source point not in the labelled region");
    return scattering_green(stack, omega, label.field_region, label.source_region,
                            r, s, n_max, quad, units);
}

GreenResult total_green(const LayerStack& stack, double omega, const Vec3& r,
                        const Vec3& s, int n_max, const QuadratureSpec& quad,
                        const Units& units) {
    const int F = stack.region_of(r.z);
    const int S = stack.region_of(s.z);
    GreenResult res = scattering_green(stack, omega, F, S, r, s, n_max, quad, units);
    if (F == S)
        res.value += free_green(stack.medium(F).permittivity(omega), omega, r, s, units);
    return res;
}

} // namespace lmio
