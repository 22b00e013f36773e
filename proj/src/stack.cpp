#include "lmio/stack.hpp"

#include <cmath>

namespace lmio {

LayerStack::LayerStack(DispersionModel medium_I, std::vector<Layer> layers,
                       DispersionModel medium_III)
    : medium_I_(std::move(medium_I)),
      layers_(std::move(layers)),
      medium_III_(std::move(medium_III)) {
    thickness_ = 0.0;
    for (size_t i = 0; i < layers_.size(); ++i) {
        if (!(layers_[i].thickness > 0.0))
            throw std::invalid_argument("LayerStack: layer " + std::to_string(i + 1) +
                                        " thickness must be > 0");
        thickness_ += layers_[i].thickness;
    }
    z_.resize(layers_.size() + 1);
    z_[0] = -0.5 * thickness_;
    for (size_t i = 0; i < layers_.size(); ++i) z_[i + 1] = z_[i] + layers_[i].thickness;
}

double LayerStack::interface_z(int m) const {
    if (m < 0 || m >= static_cast<int>(z_.size()))
        throw std::out_of_range("LayerStack::interface_z");
    return z_[m];
}

const DispersionModel& LayerStack::medium(int q) const {
    if (q == 0) return medium_I_;
    if (q == num_layers() + 1) return medium_III_;
    if (q >= 1 && q <= num_layers()) return layers_[q - 1].medium;
    throw std::out_of_range("LayerStack::medium");
}

double LayerStack::thickness(int q) const {
    if (q < 1 || q > num_layers()) throw std::out_of_range("LayerStack::thickness");
    return layers_[q - 1].thickness;
}

int LayerStack::region_of(double z) const {
    if (z <= z_.front()) return 0;
    for (int m = 1; m <= num_layers(); ++m)
        if (z <= z_[m]) return m;
    return num_layers() + 1;
}

bool LayerStack::in_region(double z, int q, double tol) const {
    const double lo = (q == 0) ? -std::numeric_limits<double>::infinity() : z_[q - 1];
    const double hi = (q == num_layers() + 1) ? std::numeric_limits<double>::infinity() : z_[q];
    return z >= lo - tol && z <= hi + tol;
}

FresnelRT interface_fresnel(cplx eps_a, cplx eps_b, double omega, double lambda,
                            Pol pol, const Units& units) {
    if (!(omega > 0.0)) throw std::invalid_argument("interface_fresnel: omega must be > 0");
    if (!(lambda >= 0.0)) throw std::invalid_argument("interface_fresnel: lambda must be >= 0");
    const cplx ha = axial_wavenumber(eps_a, omega, lambda, units.c);
    const cplx hb = axial_wavenumber(eps_b, omega, lambda, units.c);
    if (pol == Pol::TE) {
        const cplx den = ha + hb;
        if (std::abs(den) < 1e-300 * (std::abs(ha) + std::abs(hb) + 1.0))
            throw std::domain_error("interface_fresnel: degenerate TE interface (h_a + h_b = 0)");
        return {(ha - hb) / den, 2.0 * ha / den};
    }
    const cplx den = eps_b * ha + eps_a * hb;
    if (std::abs(den) < 1e-300 * (std::abs(eps_b * ha) + std::abs(eps_a * hb) + 1.0))
        throw std::domain_error("interface_fresnel: degenerate TM interface");
    const cplx ka = wavenumber(eps_a, omega, units.c);
    const cplx kb = wavenumber(eps_b, omega, units.c);
    if (std::abs(kb) < 1e-300)
        throw std::domain_error("interface_fresnel: degenerate TM interface (k_b = 0)");
    const cplx r = (eps_b * ha - eps_a * hb) / den;
    return {r, (ka / kb) * (1.0 + r)};
}

static FresnelRT fresnel_from_hk(cplx eps_a, cplx eps_b, cplx ha, cplx hb,
                                 cplx ka, cplx kb, Pol pol) {
    if (pol == Pol::TE) {
        const cplx den = ha + hb;
        if (std::abs(den) < 1e-300 * (std::abs(ha) + std::abs(hb) + 1.0))
            throw std::domain_error("interface: degenerate TE interface");
        return {(ha - hb) / den, 2.0 * ha / den};
    }
    const cplx den = eps_b * ha + eps_a * hb;
    if (std::abs(den) < 1e-300 * (std::abs(eps_b * ha) + std::abs(eps_a * hb) + 1.0) ||
        std::abs(kb) < 1e-300)
        throw std::domain_error("interface: degenerate TM interface");
    const cplx r = (eps_b * ha - eps_a * hb) / den;
    return {r, (ka / kb) * (1.0 + r)};
}

StackModeContext::StackModeContext(const LayerStack& stack, double omega, cplx lambda,
                                   Pol pol, const Units& units)
    : stack_(&stack), omega_(omega), lambda_(lambda), pol_(pol), units_(units),
      P_(stack.num_layers() + 1) {
    if (!(omega > 0.0)) throw std::invalid_argument("StackModeContext: omega must be > 0");
    const int N = stack.num_layers();
    eps_.resize(P_ + 1);
    k_.resize(P_ + 1);
    h_.resize(P_ + 1);
    for (int q = 0; q <= P_; ++q) {
        eps_[q] = stack.medium(q).permittivity(omega);
        k_[q] = wavenumber(eps_[q], omega, units.c);
        h_[q] = axial_wavenumber_c(eps_[q], omega, lambda, units.c);
    }
    phi_.assign(P_ + 1, cplx(0.0));
    for (int q = 1; q <= N; ++q)
        phi_[q] = std::exp(cplx(0.0, 1.0) * h_[q] * stack.thickness(q));

    rt_.resize(N + 1);
    for (int m = 0; m <= N; ++m)
        rt_[m] = fresnel_from_hk(eps_[m], eps_[m + 1], h_[m], h_[m + 1], k_[m], k_[m + 1], pol);

    // Cumulative reflections via the bilinear composition
    //   R = (r + R~)/(1 + r R~),  R~ = R_next * phi^2,
    // valid because r(b->a) = -r(a->b) and t(a->b) t(b->a) = 1 - r^2.
    Rr_.assign(P_ + 1, cplx(0.0));
    Rr_[N] = rt_[N].r;
    for (int q = N - 1; q >= 0; --q) {
        const cplx Rt = Rr_[q + 1] * phi_[q + 1] * phi_[q + 1];
        Rr_[q] = (rt_[q].r + Rt) / (1.0 + rt_[q].r * Rt);
    }
    Rl_.assign(P_ + 1, cplx(0.0));
    Rl_[1] = -rt_[0].r;
    for (int q = 2; q <= P_; ++q) {
        const cplx Rt = Rl_[q - 1] * phi_[q - 1] * phi_[q - 1];
        Rl_[q] = (-rt_[q - 1].r + Rt) / (1.0 + (-rt_[q - 1].r) * Rt);
    }
}

cplx StackModeContext::t_reverse(int m) const {
    if (pol_ == Pol::TE) return 1.0 - rt_[m].r;
    return (k_[m + 1] / k_[m]) * (1.0 - rt_[m].r);
}

cplx StackModeContext::dispersion_denominator() const {
    // Layer transfer matrices in the continuous pair (U, V):
    //   TE: U = f, V = f'/i;         M = [[cos d, i sin d / h], [i h sin d, cos d]]
    //   TM: U = k beta, V = (h/k) alpha;
    //       M = [[cos d, i k^2 sin d / h], [i h sin d / k^2, cos d]]
    // with d = h * thickness. Entries are even in each interior h, so the only
    // branch points left are the exterior ones.
    const int N = stack_->num_layers();
    cplx T11(1.0), T12(0.0), T21(0.0), T22(1.0);
    for (int q = 1; q <= N; ++q) {
        const cplx hd = h_[q] * stack_->thickness(q);
        const cplx cs = std::cos(hd);
        // sin(hd)/h with the h -> 0 limit d
        cplx sh;
        if (std::abs(hd) < 1e-8)
            sh = stack_->thickness(q) * (1.0 - hd * hd / 6.0);
        else
            sh = std::sin(hd) / h_[q];
        cplx M11 = cs, M22 = cs, M12, M21;
        if (pol_ == Pol::TE) {
            M12 = cplx(0.0, 1.0) * sh;
            M21 = cplx(0.0, 1.0) * h_[q] * h_[q] * sh;
        } else {
            const cplx k2 = k_[q] * k_[q];
            M12 = cplx(0.0, 1.0) * k2 * sh;
            M21 = cplx(0.0, 1.0) * h_[q] * h_[q] * sh / k2;
        }
        const cplx A11 = M11 * T11 + M12 * T21;
        const cplx A12 = M11 * T12 + M12 * T22;
        const cplx A21 = M21 * T11 + M22 * T21;
        const cplx A22 = M21 * T12 + M22 * T22;
        T11 = A11; T12 = A12; T21 = A21; T22 = A22;
    }
    const cplx chi0 = (pol_ == Pol::TE) ? h_[0] : h_[0] / (k_[0] * k_[0]);
    const cplx chiP = (pol_ == Pol::TE) ? h_[P_] : h_[P_] / (k_[P_] * k_[P_]);
    return chiP * (T11 - chi0 * T12) - (T21 - chi0 * T22);
}

cplx ScaledAmp::value() const {
    if (zero()) return {0.0, 0.0};
    if (expo.real() > 700.0)
        throw std::range_error("ScaledAmp::value: coefficient overflows double range");
    return mant * std::exp(expo);
}

std::vector<RegionAmps> source_amplitudes(const StackModeContext& c, int sg) {
    const int P = c.regions() - 1;
    const int N = P - 1;
    if (sg < 0 || sg > P)
        throw std::invalid_argument("source_amplitudes: bad source region");
    const LayerStack& st = c.stack();
    std::vector<RegionAmps> out(P + 1);
    const cplx I(0.0, 1.0);

    const cplx RL = (sg == 0) ? cplx(0.0) : c.R_left(sg);
    const cplx RR = (sg == P) ? cplx(0.0) : c.R_right(sg);
    const cplx ph2 = (sg >= 1 && sg <= N) ? c.phi(sg) * c.phi(sg) : cplx(0.0);
    const cplx G = RL * RR * ph2;
    const cplx Delta = 1.0 - G;
    if (std::abs(Delta) < 1e-300)
        throw std::domain_error("source_amplitudes: resonant denominator vanished");

    const double zL = (sg >= 1) ? st.interface_z(sg - 1) : 0.0;
    const double zR = (sg <= N) ? st.interface_z(sg) : 0.0;
    const cplx hs = c.h(sg);

    RegionAmps& S = out[sg];
    if (sg <= N && RR != cplx(0.0)) S.v_minus = {RR / Delta, 2.0 * I * hs * zR};
    if (G != cplx(0.0)) S.u_minus = {G / Delta, cplx(0.0)};
    if (sg >= 1 && RL != cplx(0.0)) S.u_plus = {RL / Delta, -2.0 * I * hs * zL};
    if (G != cplx(0.0)) S.v_plus = {G / Delta, cplx(0.0)};

    // Sweep away from the source, toward region III then toward region I.
    // W/V hold the total right-/left-going value at the interface being
    // crossed; all stored factors stay bounded (|phi| <= 1, surface-referenced
    // reflections), the absolute-z phases accumulate in the exponent.
    for (int tag = 0; tag < 2; ++tag) {
        const bool minus_tag = (tag == 0);
        // rightward
        if (sg <= N) {
            ScaledAmp W;
            if (minus_tag) {
                // u_sg + primary = G/Delta + 1 = 1/Delta at z_R
                W = {1.0 / Delta, I * hs * zR};
            } else {
                if (sg >= 1 && RL != cplx(0.0))
                    W = {RL / Delta, I * hs * (zR - 2.0 * zL)};
            }
            for (int q = sg + 1; q <= P && !W.zero(); ++q) {
                const int m = q - 1;
                cplx denom(1.0);
                if (q <= N) denom = 1.0 + c.rt(m).r * c.R_right(q) * c.phi(q) * c.phi(q);
                ScaledAmp U = W.times(c.rt(m).t / denom);
                const double zm = st.interface_z(m);
                ScaledAmp& u_out = minus_tag ? out[q].u_minus : out[q].u_plus;
                u_out = U.times_exp(-I * c.h(q) * zm);
                if (q <= N) {
                    ScaledAmp& v_out = minus_tag ? out[q].v_minus : out[q].v_plus;
                    v_out = u_out.times(c.R_right(q)).times_exp(2.0 * I * c.h(q) * st.interface_z(q));
                    W = U.times(c.phi(q));
                }
            }
        }
        // leftward
        if (sg >= 1) {
            ScaledAmp V;
            if (!minus_tag) {
                V = {1.0 / Delta, -I * hs * zL};
            } else {
                if (sg <= N && RR != cplx(0.0))
                    V = {RR / Delta, I * hs * (2.0 * zR - zL)};
            }
            for (int q = sg - 1; q >= 0 && !V.zero(); --q) {
                const int m = q;
                cplx denom(1.0);
                if (q >= 1) denom = 1.0 - c.rt(m).r * c.R_left(q) * c.phi(q) * c.phi(q);
                ScaledAmp Vq = V.times(c.t_reverse(m) / denom);
                const double zm = st.interface_z(m);
                ScaledAmp& v_out = minus_tag ? out[q].v_minus : out[q].v_plus;
                v_out = Vq.times_exp(I * c.h(q) * zm);
                if (q >= 1) {
                    ScaledAmp& u_out = minus_tag ? out[q].u_minus : out[q].u_plus;
                    u_out = v_out.times(c.R_left(q)).times_exp(-2.0 * I * c.h(q) * st.interface_z(q - 1));
                    V = Vq.times(c.phi(q));
                }
            }
        }
    }
    return out;
}

ScatteringCoeffs scattering_coefficients(const LayerStack& stack, const ModeIndex& mode,
                                         int f, int s, const Units& units) {
    StackModeContext ctx(stack, mode.omega, cplx(mode.lambda), mode.pol, units);
    if (f < 0 || f >= ctx.regions())
        throw std::invalid_argument("scattering_coefficients: bad field region");
    auto amps = source_amplitudes(ctx, s);
    const RegionAmps& a = amps[f];
    return {a.v_minus.value(), a.v_plus.value(), a.u_minus.value(), a.u_plus.value()};
}

FresnelRT slab_rt(const LayerStack& stack, const ModeIndex& mode, const Units& units) {
    StackModeContext ctx(stack, mode.omega, cplx(mode.lambda), mode.pol, units);
    const int N = stack.num_layers();
    cplx t(1.0);
    for (int m = 0; m <= N; ++m) {
        cplx denom(1.0);
        if (m + 1 <= N)
            denom = 1.0 + ctx.rt(m).r * ctx.R_right(m + 1) * ctx.phi(m + 1) * ctx.phi(m + 1);
        t *= ctx.rt(m).t / denom;
    }
    for (int q = 1; q <= N; ++q) t *= ctx.phi(q);
    return {ctx.R_right(0), t};
}

std::vector<RegionAmps> unit_incidence_amplitudes(const StackModeContext& ctx) {
    auto amps = source_amplitudes(ctx, 0);
    amps[0].u_minus = {cplx(1.0), cplx(0.0)};   // the incident wave itself
    return amps;
}

double interface_matching_residual(const StackModeContext& c,
                                   const std::vector<RegionAmps>& amps,
                                   int m, bool tag_minus, bool with_primary,
                                   int source_region) {
    const LayerStack& st = c.stack();
    const double zm = st.interface_z(m);
    const int a = m, b = m + 1;
    const cplx I(0.0, 1.0);

    auto field = [&](int q, bool add_u_primary, bool add_v_primary) {
        const ScaledAmp& u = tag_minus ? amps[q].u_minus : amps[q].u_plus;
        const ScaledAmp& v = tag_minus ? amps[q].v_minus : amps[q].v_plus;
        cplx up = u.zero() ? cplx(0.0) : u.mant * std::exp(u.expo + I * c.h(q) * zm);
        cplx vm = v.zero() ? cplx(0.0) : v.mant * std::exp(v.expo - I * c.h(q) * zm);
        if (add_u_primary) up += std::exp(I * c.h(q) * zm);
        if (add_v_primary) vm += std::exp(-I * c.h(q) * zm);
        return std::pair<cplx, cplx>(up, vm);
    };

    const bool prim_a = with_primary && tag_minus && source_region == a;
    const bool prim_b = with_primary && !tag_minus && source_region == b;
    auto [ua, va] = field(a, prim_a, false);
    auto [ub, vb] = field(b, false, prim_b);

    cplx F_a, F_b, G_a, G_b;
    if (c.pol() == Pol::TE) {
        F_a = ua + va;
        F_b = ub + vb;
        G_a = c.h(a) * (ua - va);
        G_b = c.h(b) * (ub - vb);
    } else {
        F_a = c.k(a) * (ua + va);
        F_b = c.k(b) * (ub + vb);
        G_a = c.h(a) / c.k(a) * (ua - va);
        G_b = c.h(b) / c.k(b) * (ub - vb);
    }
    const double sF = std::max({std::abs(F_a), std::abs(F_b), 1e-300});
    const double sG = std::max({std::abs(G_a), std::abs(G_b), 1e-300});
    return std::max(std::abs(F_a - F_b) / sF, std::abs(G_a - G_b) / sG);
}

} // namespace lmio
