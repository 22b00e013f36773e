#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "lmio/stack.hpp"

using namespace lmio;

namespace {

const double OM = 1.2e15;   // rad/s

LayerStack slab(cplx eps, double d, cplx eps_out = cplx(1.0)) {
    return LayerStack(DispersionModel::constant(eps_out),
                      {{DispersionModel::constant(eps), d}},
                      DispersionModel::constant(eps_out));
}

// closed-form Fabry-Perot amplitudes, surface-referenced
FresnelRT airy(cplx e1, cplx e2, cplx e3, double omega, double lam, double d, Pol pol) {
    const auto f01 = interface_fresnel(e1, e2, omega, lam, pol);
    const auto f12 = interface_fresnel(e2, e3, omega, lam, pol);
    const cplx h2 = axial_wavenumber(e2, omega, lam);
    const cplx ph = std::exp(cplx(0, 1) * h2 * d);
    const cplx den = 1.0 + f01.r * f12.r * ph * ph;
    return {(f01.r + f12.r * ph * ph) / den, f01.t * f12.t * ph / den};
}

} // namespace

TEST_CASE("LayerStack geometry and validation") {
    LayerStack st(DispersionModel::constant(1.0),
                  {{DispersionModel::constant(2.0), 1e-7},
                   {DispersionModel::constant(3.0), 3e-7}},
                  DispersionModel::constant(1.0));
    CHECK(st.num_layers() == 2);
    CHECK(st.total_thickness() == doctest::Approx(4e-7));
    CHECK(st.interface_z(0) == doctest::Approx(-2e-7));
    CHECK(st.interface_z(2) == doctest::Approx(2e-7));
    CHECK(st.region_of(-3e-7) == 0);
    CHECK(st.region_of(-1.5e-7) == 1);
    CHECK(st.region_of(0.0) == 2);
    CHECK(st.region_of(5e-7) == 3);
    CHECK_THROWS_AS(LayerStack(DispersionModel::constant(1.0),
                               {{DispersionModel::constant(2.0), -1e-7}},
                               DispersionModel::constant(1.0)),
                    std::invalid_argument);
}

TEST_CASE("interface_fresnel: identical media") {
    for (Pol pol : {Pol::TE, Pol::TM}) {
        const auto f = interface_fresnel(cplx(2.0, 0.1), cplx(2.0, 0.1), OM, 2e6, pol);
        CHECK(std::abs(f.r) < 1e-15);
        CHECK(std::abs(f.t - 1.0) < 1e-15);
    }
}

TEST_CASE("interface_fresnel: normal incidence onto glass") {
    const auto f = interface_fresnel(cplx(1.0), cplx(2.25), OM, 0.0, Pol::TE);
    CHECK(f.r.real() == doctest::Approx(-0.2).epsilon(1e-14));
    CHECK(f.r.imag() == doctest::Approx(0.0));
}

TEST_CASE("interface_fresnel: TE flux conservation, lossless propagating") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const cplx ea(1.0 + 3.0 * u(rng), 0.0), eb(1.0 + 3.0 * u(rng), 0.0);
        const double kmin = std::min(std::sqrt(ea.real()), std::sqrt(eb.real())) * OM /
                            Units::si().c;
        const double lam = 0.95 * kmin * u(rng);
        const auto f = interface_fresnel(ea, eb, OM, lam, Pol::TE);
        const double ha = axial_wavenumber(ea, OM, lam).real();
        const double hb = axial_wavenumber(eb, OM, lam).real();
        CHECK(std::abs(std::norm(f.r) + hb / ha * std::norm(f.t) - 1.0) < 1e-12);
    }
}

TEST_CASE("scattering coefficients for a uniform medium") {
    // Same-region coefficients (the true scattered parts) vanish. A
    // cross-region pair carries the transparent continuation of the source's
    // own radiation: one slot with a pure propagation phase, the rest zero.
    LayerStack st(DispersionModel::constant(cplx(1.5, 0.0)),
                  {{DispersionModel::constant(cplx(1.5, 0.0)), 2e-7}},
                  DispersionModel::constant(cplx(1.5, 0.0)));
    for (Pol pol : {Pol::TE, Pol::TM}) {
        ModeIndex m{OM, 1.7e6, 0, Parity::Even, pol, +1};
        for (int q = 0; q <= 2; ++q) {
            const auto sc = scattering_coefficients(st, m, q, q);
            CHECK(std::abs(sc.A) < 1e-14);
            CHECK(std::abs(sc.B) < 1e-14);
            CHECK(std::abs(sc.C) < 1e-14);
            CHECK(std::abs(sc.D) < 1e-14);
        }
        const auto up = scattering_coefficients(st, m, 2, 0);
        CHECK(std::abs(std::abs(up.C) - 1.0) < 1e-13);   // plain transmission
        CHECK(std::abs(up.A) < 1e-14);
        const auto dn = scattering_coefficients(st, m, 0, 2);
        CHECK(std::abs(std::abs(dn.B) - 1.0) < 1e-13);
        CHECK(std::abs(dn.D) < 1e-14);
    }
}

TEST_CASE("half-space A^{11} equals the Fresnel amplitude (z_0 = 0)") {
    LayerStack st(DispersionModel::constant(1.0), {}, DispersionModel::constant(cplx(2.25)));
    for (Pol pol : {Pol::TE, Pol::TM}) {
        for (double lam : {0.0, 1.3e6, 3.9e6, 6.0e6}) {
            ModeIndex m{OM, lam, 0, Parity::Even, pol, +1};
            const auto sc = scattering_coefficients(st, m, 0, 0);
            const auto fr = interface_fresnel(cplx(1.0), cplx(2.25), OM, lam, pol);
            CHECK(std::abs(sc.A - fr.r) <= 1e-13 * std::max(1.0, std::abs(fr.r)));
            CHECK(sc.B == cplx(0.0));
            CHECK(sc.C == cplx(0.0));
            CHECK(sc.D == cplx(0.0));
        }
    }
}

TEST_CASE("structural zeros of the coefficient table") {
    LayerStack st(DispersionModel::constant(1.0),
                  {{DispersionModel::constant(cplx(2.0, 0.2)), 1.5e-7}},
                  DispersionModel::constant(cplx(3.0, 0.0)));
    ModeIndex m{OM, 2.2e6, 0, Parity::Even, Pol::TM, +1};
    const int P = st.num_regions() - 1;
    for (int s = 0; s <= P; ++s)
        for (int f = 0; f <= P; ++f) {
            const auto sc = scattering_coefficients(st, m, f, s);
            if (f == 0) {
                CHECK(sc.C == cplx(0.0));
                CHECK(sc.D == cplx(0.0));
            }
            if (f == P) {
                CHECK(sc.A == cplx(0.0));
                CHECK(sc.B == cplx(0.0));
            }
            if (s == 0) {
                CHECK(sc.B == cplx(0.0));
                CHECK(sc.D == cplx(0.0));
            }
            if (s == P) {
                CHECK(sc.A == cplx(0.0));
                CHECK(sc.C == cplx(0.0));
            }
        }
}

TEST_CASE("two adjacent identical layers equal one merged layer") {
    const cplx eps(2.8, 0.35);
    const double d = 1.1e-7;
    LayerStack two(DispersionModel::constant(1.0),
                   {{DispersionModel::constant(eps), d}, {DispersionModel::constant(eps), d}},
                   DispersionModel::constant(cplx(1.8, 0.0)));
    LayerStack one(DispersionModel::constant(1.0), {{DispersionModel::constant(eps), 2 * d}},
                   DispersionModel::constant(cplx(1.8, 0.0)));
    for (Pol pol : {Pol::TE, Pol::TM}) {
        for (double lam : {0.0, 1.8e6, 4.5e6}) {
            ModeIndex m{OM, lam, 0, Parity::Even, pol, +1};
            for (auto [f2, s2, f1, s1] :
                 {std::array<int, 4>{0, 0, 0, 0}, {3, 0, 2, 0}, {0, 3, 0, 2}, {3, 3, 2, 2}}) {
                const auto a = scattering_coefficients(two, m, f2, s2);
                const auto b = scattering_coefficients(one, m, f1, s1);
                CHECK(std::abs(a.A - b.A) <= 1e-12 * (1.0 + std::abs(b.A)));
                CHECK(std::abs(a.B - b.B) <= 1e-12 * (1.0 + std::abs(b.B)));
                CHECK(std::abs(a.C - b.C) <= 1e-12 * (1.0 + std::abs(b.C)));
                CHECK(std::abs(a.D - b.D) <= 1e-12 * (1.0 + std::abs(b.D)));
            }
            const auto ra = slab_rt(two, m), rb = slab_rt(one, m);
            CHECK(std::abs(ra.r - rb.r) <= 1e-12 * (1.0 + std::abs(rb.r)));
            CHECK(std::abs(ra.t - rb.t) <= 1e-12 * (1.0 + std::abs(rb.t)));
        }
    }
}

TEST_CASE("slab_rt: empty stack is the identity plate") {
    LayerStack st(DispersionModel::constant(1.0), {}, DispersionModel::constant(1.0));
    for (Pol pol : {Pol::TE, Pol::TM}) {
        ModeIndex m{OM, 1.1e6, 0, Parity::Even, pol, +1};
        const auto rt = slab_rt(st, m);
        CHECK(std::abs(rt.r) < 1e-15);
        CHECK(std::abs(rt.t - 1.0) < 1e-15);
    }
}

TEST_CASE("slab_rt matches the Airy formulas (incl. complex eps)") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const cplx e2(1.2 + 4.0 * u(rng), u(rng) < 0.5 ? 0.0 : 0.8 * u(rng));
        const cplx e1(1.0), e3(1.0 + 2.0 * u(rng), 0.0);
        const double d = (0.05 + 0.6 * u(rng)) * 2.0 * pi * Units::si().c / OM;
        const double lam = 2.2 * OM / Units::si().c * u(rng);
        const Pol pol = u(rng) < 0.5 ? Pol::TE : Pol::TM;
        LayerStack st(DispersionModel::constant(e1), {{DispersionModel::constant(e2), d}},
                      DispersionModel::constant(e3));
        ModeIndex m{OM, lam, 0, Parity::Even, pol, +1};
        const auto rt = slab_rt(st, m);
        const auto ref = airy(e1, e2, e3, OM, lam, d, pol);
        CHECK(std::abs(rt.r - ref.r) <= 1e-10 * std::max(1.0, std::abs(ref.r)));
        CHECK(std::abs(rt.t - ref.t) <= 1e-10 * std::max(1.0, std::abs(ref.t)));
    }
}

TEST_CASE("slab_rt spec form: symmetric slab") {
    const cplx e2(2.25, 0.0);
    const double d = 3.4e-7;
    LayerStack st = slab(e2, d);
    ModeIndex m{OM, 1.9e6, 0, Parity::Even, Pol::TE, +1};
    const auto rt = slab_rt(st, m);
    const cplx r12 = interface_fresnel(cplx(1.0), e2, OM, m.lambda, Pol::TE).r;
    const cplx ph2 = std::exp(2.0 * cplx(0, 1) * axial_wavenumber(e2, OM, m.lambda) * d);
    const cplx ref = r12 * (1.0 - ph2) / (1.0 - r12 * r12 * ph2);
    CHECK(std::abs(rt.r - ref) <= 1e-12);
}

TEST_CASE("lossless unitarity for propagating modes") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double k1 = OM / Units::si().c;
    for (int i = 0; i < 60; ++i) {
        std::vector<Layer> layers;
        const int n = 1 + int(3 * u(rng));
        for (int j = 0; j < n; ++j)
            layers.push_back({DispersionModel::constant(cplx(1.1 + 4.0 * u(rng), 0.0)),
                              (0.03 + 0.5 * u(rng)) * 1.5e-6});
        LayerStack st(DispersionModel::constant(1.0), std::move(layers),
                      DispersionModel::constant(1.0));
        const double lam = 0.97 * k1 * u(rng);
        for (Pol pol : {Pol::TE, Pol::TM}) {
            ModeIndex m{OM, lam, 0, Parity::Even, pol, +1};
            const auto rt = slab_rt(st, m);
            CHECK(std::abs(std::norm(rt.r) + std::norm(rt.t) - 1.0) < 1e-10);
        }
    }
}

TEST_CASE("mirror-symmetric stack: reversal symmetry") {
    const double d1 = 1.2e-7, d2 = 2.1e-7;
    LayerStack st(DispersionModel::constant(1.0),
                  {{DispersionModel::constant(cplx(2.5, 0.1)), d1},
                   {DispersionModel::constant(cplx(4.0, 0.3)), d2},
                   {DispersionModel::constant(cplx(2.5, 0.1)), d1}},
                  DispersionModel::constant(1.0));
    for (Pol pol : {Pol::TE, Pol::TM}) {
        for (double lam : {0.0, 2.4e6, 5.4e6}) {
            StackModeContext cx(st, OM, cplx(lam), pol);
            const cplx r_left = cx.R_right(0);
            const cplx r_right = cx.R_left(st.num_regions() - 1);
            CHECK(std::abs(r_left - r_right) <= 1e-12 * (1.0 + std::abs(r_left)));
        }
    }
}

TEST_CASE("asymmetric stack reversal = reversed stack") {
    LayerStack fw(DispersionModel::constant(1.0),
                  {{DispersionModel::constant(cplx(2.2, 0.05)), 1.4e-7},
                   {DispersionModel::constant(cplx(3.4, 0.2)), 2.6e-7}},
                  DispersionModel::constant(cplx(1.7, 0.0)));
    LayerStack bw(DispersionModel::constant(cplx(1.7, 0.0)),
                  {{DispersionModel::constant(cplx(3.4, 0.2)), 2.6e-7},
                   {DispersionModel::constant(cplx(2.2, 0.05)), 1.4e-7}},
                  DispersionModel::constant(1.0));
    for (Pol pol : {Pol::TE, Pol::TM}) {
        ModeIndex m{OM, 2.9e6, 0, Parity::Even, pol, +1};
        StackModeContext cf(fw, OM, cplx(m.lambda), pol);
        const cplx r_rev = cf.R_left(fw.num_regions() - 1);
        const auto rt_bw = slab_rt(bw, m);
        CHECK(std::abs(r_rev - rt_bw.r) <= 1e-12 * (1.0 + std::abs(rt_bw.r)));
    }
}

TEST_CASE("per-mode tangential matching at every interface (incl. evanescent)") {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    LayerStack st(DispersionModel::constant(1.0),
                  {{DispersionModel::constant(cplx(2.25, 0.0)), 2.3e-7},
                   {DispersionModel::constant(cplx(5.0, 0.0)), 1.1e-7}},
                  DispersionModel::constant(1.0));
    const double k1 = OM / Units::si().c;
    for (int i = 0; i < 10; ++i) {
        // bias toward the evanescent range lambda > k everywhere
        const double lam = (0.5 + 2.5 * u(rng)) * k1 * std::sqrt(5.0);
        for (Pol pol : {Pol::TE, Pol::TM}) {
            StackModeContext cx(st, OM, cplx(lam), pol);
            auto amps = unit_incidence_amplitudes(cx);
            for (int m = 0; m <= st.num_layers(); ++m)
                CHECK(interface_matching_residual(cx, amps, m, true, false, -1) < 1e-10);
            for (int sg = 1; sg <= st.num_layers(); ++sg) {
                auto samps = source_amplitudes(cx, sg);
                for (int m = 0; m <= st.num_layers(); ++m) {
                    CHECK(interface_matching_residual(cx, samps, m, true, true, sg) < 1e-10);
                    CHECK(interface_matching_residual(cx, samps, m, false, true, sg) < 1e-10);
                }
            }
        }
    }
}

TEST_CASE("TE and TM single-interface amplitudes at normal incidence") {
    LayerStack st(DispersionModel::constant(1.0), {}, DispersionModel::constant(cplx(2.25)));
    ModeIndex te{OM, 0.0, 0, Parity::Even, Pol::TE, +1};
    ModeIndex tm{OM, 0.0, 0, Parity::Even, Pol::TM, +1};
    // with the N-amplitude convention r_TM(0) = -r_TE(0)
    CHECK(std::abs(slab_rt(st, te).r + slab_rt(st, tm).r) < 1e-14);
}
