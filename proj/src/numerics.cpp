#include "lmio/numerics.hpp"

#include <cmath>

namespace lmio {

BesselJ bessel_j(int n, double x) {
    if (n < 0) throw std::domain_error("bessel_j: order must be >= 0");
    if (!(x >= 0.0) || !std::isfinite(x))
        throw std::domain_error("bessel_j: argument must be finite and >= 0");
    const double j = std::cyl_bessel_j(double(n), x);
    double jp;
    if (n == 0) {
        jp = -std::cyl_bessel_j(1.0, x);
    } else {
        jp = 0.5 * (std::cyl_bessel_j(double(n - 1), x) - std::cyl_bessel_j(double(n + 1), x));
    }
    return {j, jp};
}

double jn_over_x(int n, double x) {
    if (n < 1) throw std::domain_error("jn_over_x: order must be >= 1");
    if (!(x >= 0.0)) throw std::domain_error("jn_over_x: argument must be >= 0");
    if (x == 0.0) return n == 1 ? 0.5 : 0.0;
    return std::cyl_bessel_j(double(n), x) / x;
}

cplx wavenumber(cplx eps, double omega, double c) {
    cplx k = std::sqrt(eps) * (omega / c);
    if (k.imag() < 0.0) k = -k;
    return k;
}

static cplx branch_sqrt(cplx w) {
    cplx h = std::sqrt(w);
    if (h.imag() < 0.0) h = -h;
    if (h.imag() == 0.0 && h.real() < 0.0) h = -h;
    return h;
}

cplx axial_wavenumber(cplx eps, double omega, double lambda, double c) {
    if (!(omega > 0.0)) throw std::invalid_argument("axial_wavenumber: omega must be > 0");
    if (!(lambda >= 0.0)) throw std::invalid_argument("axial_wavenumber: lambda must be >= 0");
    cplx k = wavenumber(eps, omega, c);
    return branch_sqrt(k * k - cplx(lambda) * lambda);
}

cplx axial_wavenumber_c(cplx eps, double omega, cplx lambda, double c) {
    if (!(omega > 0.0)) throw std::invalid_argument("axial_wavenumber: omega must be > 0");
    cplx k = wavenumber(eps, omega, c);
    return branch_sqrt(k * k - lambda * lambda);
}

void QuadratureSpec::validate() const {
    std::string msg;
    if (!(rel_tol > 0.0)) msg += "rel_tol must be > 0; ";
    if (!(abs_tol > 0.0)) msg += "abs_tol must be > 0; ";
    if (max_subdivisions < 1) msg += "max_subdivisions must be >= 1; ";
    if (!(lambda_max > 0.0)) msg += "lambda_max must be > 0; ";
    if (!msg.empty()) throw std::invalid_argument("QuadratureSpec: " + msg);
}

namespace detail {

double tail_bound(double norm_inner, double norm_end, double dx, double lambda_max) {
    if (norm_end == 0.0) return 0.0;
    if (norm_end < norm_inner) {
        const double rate = std::log(norm_inner / norm_end) / dx;
        return norm_end / rate;
    }
    // No decay detected at the cutoff: charge a full-width block to the bound.
    return std::max(norm_end, norm_inner) * lambda_max;
}

} // namespace detail

SpectralResult integrate_spectral(const std::function<cplx(double)>& f,
                                  const QuadratureSpec& spec,
                                  const std::vector<double>& breakpoints) {
    spec.validate();
    auto norm = [](const cplx& z) { return std::abs(z); };
    auto out = detail::adaptive_gk<cplx>(f, 0.0, spec.lambda_max, breakpoints,
                                         spec.rel_tol, spec.abs_tol,
                                         spec.max_subdivisions, norm);
    const double dx = 0.05 * spec.lambda_max;
    const double tail = detail::tail_bound(std::abs(f(spec.lambda_max - dx)),
                                           std::abs(f(spec.lambda_max)), dx,
                                           spec.lambda_max);
    SpectralResult res;
    res.value = out.value;
    res.error_bound = out.error + tail;
    res.intervals = out.intervals;
    res.converged = out.converged &&
                    res.error_bound <= std::max(spec.abs_tol, spec.rel_tol * std::abs(res.value)) * 10.0;
    return res;
}

RootResult find_root_complex(const std::function<cplx(cplx)>& f, cplx seed,
                             double tol, int max_iter) {
    if (!(tol > 0.0)) throw std::invalid_argument("find_root_complex: tol must be > 0");
    cplx z = seed;
    cplx fz = f(z);
    for (int it = 0; it < max_iter; ++it) {
        if (std::abs(fz) < tol) return {z, std::abs(fz), true, it};
        const double step = 1e-7 * std::max(1.0, std::abs(z));
        cplx d = (f(z + step) - f(z - step)) / (2.0 * step);
        if (!std::isfinite(std::abs(d)) || std::abs(d) == 0.0) {
            // retry with an imaginary-direction stencil
            const cplx istep(0.0, step);
            d = (f(z + istep) - f(z - istep)) / (2.0 * istep);
            if (!std::isfinite(std::abs(d)) || std::abs(d) == 0.0)
                return {z, std::abs(fz), false, it};
        }
        cplx dz = -fz / d;
        double damp = 1.0;
        bool improved = false;
        for (int k = 0; k < 24; ++k, damp *= 0.5) {
            cplx zn = z + damp * dz;
            cplx fn = f(zn);
            if (std::abs(fn) < std::abs(fz)) {
                z = zn;
                fz = fn;
                improved = true;
                break;
            }
        }
        if (!improved) return {z, std::abs(fz), false, it};
    }
    return {z, std::abs(fz), std::abs(fz) < tol, max_iter};
}

} // namespace lmio
