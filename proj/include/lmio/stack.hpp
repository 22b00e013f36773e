#pragma once

#include <vector>

#include "lmio/media.hpp"
#include "lmio/waves.hpp"

namespace lmio {

// ---------------------------------------------------------------------------
// Geometry. Regions are indexed q = 0..N+1 along z:
//   q = 0      : half space I,  z < z_0 = -L/2
//   q = 1..N   : layers,        z_{q-1} < z < z_q
//   q = N+1    : half space III, z > z_N = +L/2
// All amplitudes below carry absolute-z phase conventions: a mode's field in
// region q is u_q e^{+i h_q z} + v_q e^{-i h_q z} with z measured on this grid.

struct Layer {
    DispersionModel medium;
    double thickness;   // [m], > 0
};

class LayerStack {
public:
    LayerStack(DispersionModel medium_I, std::vector<Layer> layers,
               DispersionModel medium_III);

    int num_layers() const { return static_cast<int>(layers_.size()); }
    int num_regions() const { return num_layers() + 2; }
    double total_thickness() const { return thickness_; }
    double interface_z(int m) const;               // m = 0..N
    const DispersionModel& medium(int q) const;    // q = 0..N+1
    double thickness(int q) const;                 // layers only

    // Region of a point; boundary points go to the lower-z region
    // (z == z_0 belongs to region 0).
    int region_of(double z) const;
    // Inclusive membership with tolerance for surface points.
    bool in_region(double z, int q, double tol) const;

    const std::vector<Layer>& layers() const { return layers_; }
    const DispersionModel& medium_I() const { return medium_I_; }
    const DispersionModel& medium_III() const { return medium_III_; }

private:
    DispersionModel medium_I_;
    std::vector<Layer> layers_;
    DispersionModel medium_III_;
    double thickness_ = 0.0;
    std::vector<double> z_;   // interface grid
};

// ---------------------------------------------------------------------------
// Single-interface Fresnel amplitudes, wave incident from medium a onto b.
//
// TE amplitudes multiply the M-type field coefficient,
//   r = (h_a - h_b)/(h_a + h_b),  t = 2 h_a/(h_a + h_b).
// TM amplitudes multiply the N-type field coefficient,
//   r = (eps_b h_a - eps_a h_b)/(eps_b h_a + eps_a h_b),
//   t = (k_a/k_b)(1 + r),
// which is the convention in which the tangential electric field of the
// transmitted wave is continuous (t equals the plane-wave E-field ratio,
// not the tangential-H ratio 1 + r).

struct FresnelRT {
    cplx r, t;
};

FresnelRT interface_fresnel(cplx eps_a, cplx eps_b, double omega, double lambda,
                            Pol pol, const Units& units = Units::si());

// ---------------------------------------------------------------------------
// Per-(omega, lambda, polarization) solve of the layered boundary-value
// problem. lambda may be complex (pole searches); the integration path and
// mode indices use real lambda.

class StackModeContext {
public:
    StackModeContext(const LayerStack& stack, double omega, cplx lambda, Pol pol,
                     const Units& units = Units::si());

    const LayerStack& stack() const { return *stack_; }
    int regions() const { return P_ + 1; }
    Pol pol() const { return pol_; }
    double omega() const { return omega_; }
    cplx lambda() const { return lambda_; }

    cplx eps(int q) const { return eps_[q]; }
    cplx k(int q) const { return k_[q]; }
    cplx h(int q) const { return h_[q]; }
    cplx phi(int q) const { return phi_[q]; }   // e^{i h_q d_q}, layers only
    FresnelRT rt(int m) const { return rt_[m]; } // interface m: q=m -> q=m+1
    cplx t_reverse(int m) const;                 // transmission q=m+1 -> q=m

    // Cumulative reflections, surface-referenced at the interface:
    //   R_right(q): wave in region q incident on interface q and everything
    //               beyond it (q = 0..N);
    //   R_left(q):  wave in region q incident on interface q-1 and everything
    //               below it (q = 1..N+1).
    cplx R_right(int q) const { return Rr_[q]; }
    cplx R_left(int q) const { return Rl_[q]; }

    // Dispersion function whose zeros in the complex lambda plane are the
    // stack's surface/guided-wave poles. Assembled from layer transfer
    // matrices that are even in each interior h_q, so the only branch points
    // are the exterior k_I, k_III.
    cplx dispersion_denominator() const;

private:
    const LayerStack* stack_;
    double omega_;
    cplx lambda_;
    Pol pol_;
    Units units_;
    int P_;   // highest region index = N+1
    std::vector<cplx> eps_, k_, h_, phi_;
    std::vector<FresnelRT> rt_;
    std::vector<cplx> Rr_, Rl_;
};

// ---------------------------------------------------------------------------
// Scattered-wave amplitudes for a point source.
//
// For a source in region s the spectral decomposition of the source's own
// field carries two directional tags:
//   tag "minus": source factor e^{-i h_s z_s}, paired with radiation emitted
//                toward larger z (the free-field pairing for z > z_s);
//   tag "plus":  source factor e^{+i h_s z_s}, radiation toward smaller z.
// The scattered field in region f is, per tag,
//   u_f e^{+i h_f z} + v_f e^{-i h_f z}
// and the exported coefficient letters are
//   A = v(minus), B = v(plus), C = u(minus), D = u(plus).
// Radiation conditions and the source position force the structural zeros
//   f = 0   -> C = D = 0,    f = N+1 -> A = B = 0,
//   s = 0   -> B = D = 0,    s = N+1 -> A = C = 0.

struct ScaledAmp {
    cplx mant{0.0, 0.0};
    cplx expo{0.0, 0.0};   // value = mant * exp(expo)

    bool zero() const { return mant == cplx(0.0, 0.0); }
    cplx value() const;    // throws std::range_error if exp(expo) overflows
    ScaledAmp times(cplx f) const { return {mant * f, expo}; }
    ScaledAmp times_exp(cplx e) const { return {mant, expo + e}; }
};

struct RegionAmps {
    ScaledAmp u_minus, v_minus, u_plus, v_plus;
};

// Amplitudes in every region for a unit-tagged source in source_region.
std::vector<RegionAmps> source_amplitudes(const StackModeContext& ctx,
                                          int source_region);

struct ScatteringCoeffs {
    cplx A{0.0}, B{0.0}, C{0.0}, D{0.0};
};

// Absolute-phase scattering coefficients for (field region f, source region s).
ScatteringCoeffs scattering_coefficients(const LayerStack& stack, const ModeIndex& mode,
                                         int f, int s, const Units& units = Units::si());

// Surface-referenced overall reflection/transmission for a unit wave incident
// from region I: r is measured at z_0 = -L/2, t at z_N = +L/2.
FresnelRT slab_rt(const LayerStack& stack, const ModeIndex& mode,
                  const Units& units = Units::si());

// Interior coefficients (u_q, v_q) for the unit-incidence problem
// (u_0 = 1 is the incident wave; v_0 e^{-i h_0 z} the reflected one).
std::vector<RegionAmps> unit_incidence_amplitudes(const StackModeContext& ctx);

// Residual of the two tangential matching conditions at interface m for the
// per-mode field {u_q, v_q}, relative to the larger matched magnitude.
double interface_matching_residual(const StackModeContext& ctx,
                                   const std::vector<RegionAmps>& amps,
                                   int m, bool tag_minus, bool with_primary,
                                   int source_region);

} // namespace lmio
