#include "lmio/iorel.hpp"

#include <cmath>
#include <functional>

namespace lmio {

double noise_amplitude(double eps_imag, double omega, const Units& units) {
    if (eps_imag < 0.0) throw std::domain_error("noise_amplitude: eps'' must be >= 0");
    if (!(omega > 0.0)) throw std::domain_error("noise_amplitude: omega must be > 0");
    return omega * std::sqrt(units.hbar * units.eps0 * eps_imag / pi);
}

GreenResult field_kernel(const LayerStack& stack, double omega, Surface surface,
                         KernelPart part, int layer_index, const Vec3& r_surface,
                         const Vec3& s, int n_max, const QuadratureSpec& quad,
                         const Units& units) {
    const int P = stack.num_regions() - 1;
    const int f = (surface == Surface::Left) ? 0 : P;
    const double zsurf = (surface == Surface::Left) ? stack.interface_z(0)
                                                    : stack.interface_z(stack.num_layers());
    const double tol = 1e-9 * (stack.total_thickness() + units.c / omega);
    if (std::abs(r_surface.z - zsurf) > tol)
        throw std::invalid_argument("field_kernel: surface point is not on the requested surface");

    GreenPartLabel label{f, kFreeSource};
    switch (part) {
        case KernelPart::In: label.source_region = kFreeSource; break;
        case KernelPart::Refl: label.source_region = f; break;
        case KernelPart::Transm: label.source_region = (surface == Surface::Left) ? P : 0; break;
        case KernelPart::Layer:
            if (layer_index < 1 || layer_index > stack.num_layers())
                throw std::invalid_argument("field_kernel: bad layer index");
            label.source_region = layer_index;
            break;
    }
    GreenResult res = green_part(stack, omega, label, r_surface, s, n_max, quad, units);
    const cplx iwmu(0.0, omega * units.mu0);
    res.value *= iwmu;
    res.error_bound *= std::abs(iwmu);
    res.azimuthal_error *= std::abs(iwmu);
    return res;
}

static void check_inversion_wellposed(const StackModeContext& ctx) {
    const double L = ctx.stack().total_thickness();
    const int P = ctx.regions() - 1;
    const double att = std::max(ctx.h(0).imag(), ctx.h(P).imag()) * L;
    if (att > 690.0)
        throw IllPosedError("mode inversion ill-posed: free kernel magnitude below 1e-300");
}

cplx reflection_coeff(const LayerStack& stack, const ModeIndex& mode, const Units& units) {
    StackModeContext ctx(stack, mode.omega, cplx(mode.lambda), mode.pol, units);
    check_inversion_wellposed(ctx);
    return ctx.R_right(0);
}

cplx transmission_coeff(const LayerStack& stack, const ModeIndex& mode, Direction dir,
                        const Units& units) {
    StackModeContext ctx(stack, mode.omega, cplx(mode.lambda), mode.pol, units);
    check_inversion_wellposed(ctx);
    const int N = stack.num_layers();
    cplx t(1.0);
    if (dir == Direction::I_to_III) {
        for (int m = 0; m <= N; ++m) {
            cplx denom(1.0);
            if (m + 1 <= N)
                denom = 1.0 + ctx.rt(m).r * ctx.R_right(m + 1) * ctx.phi(m + 1) * ctx.phi(m + 1);
            t *= ctx.rt(m).t / denom;
        }
    } else {
        for (int m = N; m >= 0; --m) {
            cplx denom(1.0);
            if (m >= 1)
                denom = 1.0 - ctx.rt(m).r * ctx.R_left(m) * ctx.phi(m) * ctx.phi(m);
            t *= ctx.t_reverse(m) / denom;
        }
    }
    for (int q = 1; q <= N; ++q) t *= ctx.phi(q);
    return t;
}

ModeCoefficients mode_coefficients(const LayerStack& stack, const ModeIndex& mode,
                                   const Units& units) {
    StackModeContext ctx(stack, mode.omega, cplx(mode.lambda), mode.pol, units);
    check_inversion_wellposed(ctx);
    ModeCoefficients mc;
    mc.mode = mode;
    mc.r = ctx.R_right(0);
    mc.r_rev = ctx.R_left(ctx.regions() - 1);
    mc.t = transmission_coeff(stack, mode, Direction::I_to_III, units);
    mc.t_rev = transmission_coeff(stack, mode, Direction::III_to_I, units);
    return mc;
}

PolarizationMatrix reflection_matrix(const LayerStack& stack, double omega, double lambda,
                                     const Units& units) {
    PolarizationMatrix m;
    ModeIndex mode{omega, lambda};
    mode.pol = Pol::TE;
    m.te = reflection_coeff(stack, mode, units);
    mode.pol = Pol::TM;
    m.tm = reflection_coeff(stack, mode, units);
    return m;   // cross entries stay exactly zero: TE and TM never mix
}

PolarizationMatrix transmission_matrix(const LayerStack& stack, double omega, double lambda,
                                       Direction dir, const Units& units) {
    PolarizationMatrix m;
    ModeIndex mode{omega, lambda};
    mode.pol = Pol::TE;
    m.te = transmission_coeff(stack, mode, dir, units);
    mode.pol = Pol::TM;
    m.tm = transmission_coeff(stack, mode, dir, units);
    return m;
}

// ---------------------------------------------------------------------------
// Closed-form depth integrals of products of e^{+-ihz} over [lo, hi].

namespace {

double int_pp(cplx h, double lo, double hi) {   // |e^{+ihz}|^2
    const double a = 2.0 * h.imag();
    if (a == 0.0) return hi - lo;
    return (std::exp(-a * lo) - std::exp(-a * hi)) / a;
}
double int_mm(cplx h, double lo, double hi) {   // |e^{-ihz}|^2
    const double a = 2.0 * h.imag();
    if (a == 0.0) return hi - lo;
    return (std::exp(a * hi) - std::exp(a * lo)) / a;
}
cplx int_pm(cplx h, double lo, double hi) {     // e^{+ihz} conj(e^{-ihz})
    const double b = 2.0 * h.real();
    if (b == 0.0) return {hi - lo, 0.0};
    const cplx ib(0.0, b);
    return (std::exp(ib * hi) - std::exp(ib * lo)) / ib;
}

// integral of |u e^{ihz} + v e^{-ihz}|^2
double profile_norm2(cplx u, cplx v, cplx h, double lo, double hi) {
    return std::norm(u) * int_pp(h, lo, hi) + std::norm(v) * int_mm(h, lo, hi) +
           2.0 * std::real(u * std::conj(v) * int_pm(h, lo, hi));
}

} // namespace

NoiseKernelSet noise_kernels(const LayerStack& stack, const ModeIndex& mode,
                             const Units& units) {
    if (!(mode.omega > 0.0)) throw std::domain_error("noise_kernels: omega must be > 0");
    NoiseKernelSet set;
    set.mode = mode;
    const int N = stack.num_layers();
    const int P = N + 1;
    if (N == 0) return set;

    StackModeContext cTE(stack, mode.omega, cplx(mode.lambda), Pol::TE, units);
    StackModeContext cTM(stack, mode.omega, cplx(mode.lambda), Pol::TM, units);
    set.h_I = cTE.h(0);
    set.h_III = cTE.h(P);
    const double dn = (mode.n == 0) ? 1.0 : 2.0;

    for (int i = 1; i <= N; ++i) {
        LayerNoiseKernels k;
        k.layer = i;
        k.z_lo = stack.interface_z(i - 1);
        k.z_hi = stack.interface_z(i);
        k.h = cTE.h(i);
        k.k = cTM.k(i);
        k.eps_imag = stack.medium(i).permittivity(mode.omega).imag();
        k.quant_amplitude = noise_amplitude(k.eps_imag, mode.omega, units);
        k.prefactor = -(mode.omega * units.mu0 / (4.0 * pi)) * dn / (mode.lambda * k.h);

        auto aTE = source_amplitudes(cTE, i);
        auto aTM = source_amplitudes(cTM, i);
        k.A_M = aTE[0].v_minus.value();
        k.B_M = aTE[0].v_plus.value();
        k.A_N = aTM[0].v_minus.value();
        k.B_N = aTM[0].v_plus.value();
        k.C_M = aTE[P].u_minus.value();
        k.D_M = aTE[P].u_plus.value();
        k.C_N = aTM[P].u_minus.value();
        k.D_N = aTM[P].u_plus.value();
        set.layers.push_back(k);
    }
    return set;
}

double NoiseKernelSet::aggregate_strength(Surface side, Pol pol, const Units& units) const {
    // Flux-normalized commutator weight of the summed noise field. The
    // kernel profile inside layer i is K(z) = X e^{-i h z} + Y e^{+i h z}
    // with (X, Y) = (A, B) at the left surface and (C, D) at the right one;
    // normalization is the incident-flux weight of the exterior mode.
    const double k0 = mode.omega / units.c;
    const double h_out = (side == Surface::Left) ? h_I.real() : h_III.real();
    double S = 0.0;
    for (const auto& L : layers) {
        const cplx h = L.h;
        cplx X, Y;
        if (side == Surface::Left) {
            X = (pol == Pol::TE) ? L.A_M : L.A_N;
            Y = (pol == Pol::TE) ? L.B_M : L.B_N;
        } else {
            X = (pol == Pol::TE) ? L.C_M : L.C_N;
            Y = (pol == Pol::TE) ? L.D_M : L.D_N;
        }
        // X e^{-ihz} + Y e^{ihz} == (u=Y, v=X) in profile_norm2 terms
        double J;
        if (pol == Pol::TE) {
            J = profile_norm2(Y, X, h, L.z_lo, L.z_hi);
        } else {
            const double a2 = profile_norm2(-Y, X, h, L.z_lo, L.z_hi);  // X e^- - Y e^+
            const double b2 = profile_norm2(Y, X, h, L.z_lo, L.z_hi);   // X e^- + Y e^+
            J = (std::norm(h) * a2 + mode.lambda * mode.lambda * b2) / std::norm(L.k);
        }
        S += L.eps_imag / std::norm(h) * J;
    }
    return S * k0 * k0 * h_out;
}

EnergyBalance energy_balance(const LayerStack& stack, const ModeIndex& mode,
                             const Units& units) {
    const int N = stack.num_layers();
    const int P = N + 1;
    if (!stack.medium(0).lossless() || !stack.medium(P).lossless())
        throw std::invalid_argument("energy_balance: exterior media must be lossless");
    StackModeContext cx(stack, mode.omega, cplx(mode.lambda), mode.pol, units);
    const cplx kI = cx.k(0), kIII = cx.k(P);
    if (std::abs(kI - kIII) > 1e-9 * std::abs(kI))
        throw std::invalid_argument("energy_balance: exterior media must be identical");
    if (!(mode.lambda < kI.real()))
        throw std::invalid_argument("energy_balance: mode must be propagating (lambda < k_I)");

    const double h1 = cx.h(0).real();
    const double k0 = mode.omega / units.c;
    auto amps = unit_incidence_amplitudes(cx);

    double A = 0.0;
    for (int q = 1; q <= N; ++q) {
        const double epp = stack.medium(q).permittivity(mode.omega).imag();
        if (epp == 0.0) continue;
        const cplx u = amps[q].u_minus.value();
        const cplx v = amps[q].v_minus.value();
        const double lo = stack.interface_z(q - 1), hi = stack.interface_z(q);
        const cplx h = cx.h(q);
        if (mode.pol == Pol::TE) {
            A += epp * profile_norm2(u, v, h, lo, hi);
        } else {
            const double a2 = profile_norm2(u, -v, h, lo, hi);   // u e^+ - v e^-
            const double b2 = profile_norm2(u, v, h, lo, hi);
            A += epp / std::norm(cx.k(q)) *
                 (std::norm(h) * a2 + mode.lambda * mode.lambda * b2);
        }
    }
    A *= k0 * k0 / h1;

    const FresnelRT rtv = slab_rt(stack, mode, units);
    EnergyBalance eb;
    eb.R = std::norm(rtv.r);
    eb.T = std::norm(rtv.t);
    eb.absorption = A;
    eb.deficit = 1.0 - eb.R - eb.T;
    eb.residual = std::abs(eb.absorption - eb.deficit);
    return eb;
}

// ---------------------------------------------------------------------------
// Pole search.

namespace {

int winding_number(const std::function<cplx(cplx)>& D, const PoleWindow& w,
                   bool& reliable) {
    const cplx corners[5] = {cplx(w.re_lo, w.im_lo), cplx(w.re_hi, w.im_lo),
                             cplx(w.re_hi, w.im_hi), cplx(w.re_lo, w.im_hi),
                             cplx(w.re_lo, w.im_lo)};
    double total = 0.0;
    std::function<void(cplx, cplx, cplx, cplx, int)> march =
        [&](cplx a, cplx b, cplx Da, cplx Db, int depth) {
            if (std::abs(Da) == 0.0 || std::abs(Db) == 0.0) {
                reliable = false;
                return;
            }
            const double d = std::arg(Db / Da);
            if (std::abs(d) <= 0.8 || depth > 40) {
                if (depth > 40 && std::abs(d) > 2.7) reliable = false;
                total += d;
                return;
            }
            const cplx m = 0.5 * (a + b);
            const cplx Dm = D(m);
            march(a, m, Da, Dm, depth + 1);
            march(m, b, Dm, Db, depth + 1);
        };
    // 64 initial samples per edge so that full phase wraps between the
    // adaptive anchors cannot slip through
    const int K = 64;
    for (int e = 0; e < 4; ++e) {
        cplx prev = corners[e];
        cplx Dprev = D(prev);
        for (int i = 1; i <= K; ++i) {
            const cplx p = corners[e] + (corners[e + 1] - corners[e]) * (double(i) / K);
            const cplx Dp = D(p);
            march(prev, p, Dprev, Dp, 0);
            prev = p;
            Dprev = Dp;
        }
    }
    return static_cast<int>(std::lround(total / (2.0 * pi)));
}

bool inside(const PoleWindow& w, cplx z, double margin) {
    return z.real() >= w.re_lo - margin && z.real() <= w.re_hi + margin &&
           z.imag() >= w.im_lo - margin && z.imag() <= w.im_hi + margin;
}

} // namespace

PoleSearchResult find_surface_poles(const LayerStack& stack, double omega, Pol pol,
                                    const PoleWindow& w, const Units& units) {
    if (!(w.re_hi > w.re_lo) || w.im_hi < w.im_lo)
        throw std::invalid_argument("find_surface_poles: bad window");
    const int P = stack.num_regions() - 1;
    const cplx kI = wavenumber(stack.medium(0).permittivity(omega), omega, units.c);
    const cplx kIII = wavenumber(stack.medium(P).permittivity(omega), omega, units.c);
    const double margin = 1e-9 * (std::abs(kI) + std::abs(kIII));
    for (cplx bp : {kI, kIII, -kI, -kIII})
        if (inside(w, bp, margin))
            throw std::invalid_argument(
                "find_surface_poles: window must exclude the exterior branch points");

    auto D = [&](cplx lam) {
        return StackModeContext(stack, omega, lam, pol, units).dispersion_denominator();
    };

    // scale from boundary samples
    double Dscale = 0.0;
    for (int i = 0; i <= 16; ++i) {
        const double t = double(i) / 16.0;
        Dscale = std::max(Dscale, std::abs(D(cplx(w.re_lo + t * (w.re_hi - w.re_lo), w.im_lo))));
        Dscale = std::max(Dscale, std::abs(D(cplx(w.re_lo + t * (w.re_hi - w.re_lo), w.im_hi))));
    }
    if (Dscale == 0.0) Dscale = 1.0;
    auto Dn = [&](cplx lam) { return D(lam) / Dscale; };

    PoleSearchResult out;
    const double diag = std::hypot(w.re_hi - w.re_lo, std::max(w.im_hi - w.im_lo, 0.0));
    const double scale_lam = std::max({std::abs(w.re_lo), std::abs(w.re_hi), 1.0});

    auto push_pole = [&](cplx root, double resid, bool conv) {
        for (const auto& p : out.poles)
            if (std::abs(p.lambda - root) < 1e-7 * std::max(diag, scale_lam * 1e-9)) return;
        if (conv)
            out.poles.push_back({root, resid, true});
        else
            out.unconverged.push_back({root, resid, false});
    };

    if (w.im_hi == w.im_lo) {
        // Real-line scan: covers lossless guided modes on the exterior branch cut.
        const int M = 4000;
        std::vector<cplx> vals(M + 1);
        std::vector<double> xs(M + 1);
        for (int i = 0; i <= M; ++i) {
            xs[i] = w.re_lo + (w.re_hi - w.re_lo) * double(i) / M;
            vals[i] = Dn(cplx(xs[i], w.im_lo));
        }
        double max_re = 0, max_im = 0;
        for (const auto& v : vals) {
            max_re = std::max(max_re, std::abs(v.real()));
            max_im = std::max(max_im, std::abs(v.imag()));
        }
        const bool use_im = max_im >= max_re;
        auto g = [&](int i) { return use_im ? vals[i].imag() : vals[i].real(); };
        auto g_at = [&](double x) {
            const cplx v = Dn(cplx(x, w.im_lo));
            return use_im ? v.imag() : v.real();
        };
        for (int i = 0; i < M; ++i) {
            if (g(i) == 0.0) {
                push_pole(cplx(xs[i], w.im_lo), std::abs(vals[i]), true);
                continue;
            }
            if (g(i) * g(i + 1) < 0.0) {
                double a = xs[i], b = xs[i + 1];
                double ga = g(i);
                for (int it = 0; it < 200 && b - a > 1e-16 * scale_lam; ++it) {
                    const double m = 0.5 * (a + b);
                    const double gm = g_at(m);
                    if (gm == 0.0) { a = b = m; break; }
                    if (ga * gm < 0.0) b = m; else { a = m; ga = gm; }
                }
                const cplx root(0.5 * (a + b), w.im_lo);
                const double resid = std::abs(Dn(root));
                // Require the full complex residual to vanish, not just one part.
                push_pole(root, resid, resid < 1e-6);
            }
        }
        out.winding = static_cast<int>(out.poles.size());
        return out;
    }

    bool reliable = true;
    out.winding = winding_number(Dn, w, reliable);

    // attempt a Newton polish from a seed; returns true if a new root inside
    // the window was accepted
    auto try_polish = [&](cplx seed) {
        auto rr = find_root_complex(Dn, seed, 1e-11, 200);
        if (!rr.converged || !inside(w, rr.root, 0.0)) return false;
        for (const auto& p : out.poles)
            if (std::abs(p.lambda - rr.root) < 1e-7 * std::max(diag, scale_lam * 1e-9))
                return false;
        out.poles.push_back({rr.root, rr.residual, true});
        return true;
    };

    // wind < 0 marks an unreliable boundary march (a zero close to the cell
    // edge); such cells are pursued until they are tiny.
    std::function<void(PoleWindow, int, int)> search = [&](PoleWindow cell, int wind,
                                                           int depth) {
        if (wind == 0) return;
        const double cd = std::hypot(cell.re_hi - cell.re_lo, cell.im_hi - cell.im_lo);
        const cplx seed(0.5 * (cell.re_lo + cell.re_hi), 0.5 * (cell.im_lo + cell.im_hi));
        const bool added = try_polish(seed);
        if (wind == 1 && added) return;
        auto known_inside = [&]() {
            for (const auto& p : out.poles)
                if (inside(cell, p.lambda, 0.0)) return true;
            return false;
        };
        if (wind == 1 && known_inside()) return;
        if (wind < 0 && cd < 1e-5 * diag) return;   // hugging an already-found zero
        if (depth > 30 || cd < 1e-9 * std::max(diag, 1.0)) {
            if (wind > 0 && !added && !known_inside())
                out.unconverged.push_back({seed, std::abs(Dn(seed)), false});
            return;
        }
        const double rm = 0.5 * (cell.re_lo + cell.re_hi);
        const double im = 0.5 * (cell.im_lo + cell.im_hi);
        const PoleWindow cells[4] = {
            {cell.re_lo, rm, cell.im_lo, im},
            {rm, cell.re_hi, cell.im_lo, im},
            {cell.re_lo, rm, im, cell.im_hi},
            {rm, cell.re_hi, im, cell.im_hi}};
        for (const auto& c : cells) {
            bool ok = true;
            const int cw = winding_number(Dn, c, ok);
            search(c, ok ? cw : -1, depth + 1);
        }
    };
    search(w, reliable ? out.winding : -1, 0);

    // safety sweep: if the window-level count exceeds the roots found so far,
    // rake a seed grid through the window
    if (reliable && static_cast<int>(out.poles.size()) < out.winding) {
        for (int gi = 0; gi < 24 && static_cast<int>(out.poles.size()) < out.winding; ++gi)
            for (int gj = 0; gj < 12; ++gj) {
                const cplx seed(w.re_lo + (w.re_hi - w.re_lo) * (gi + 0.5) / 24.0,
                                w.im_lo + (w.im_hi - w.im_lo) * (gj + 0.5) / 12.0);
                try_polish(seed);
            }
    }
    return out;
}

} // namespace lmio
