#pragma once

#include "lmio/green.hpp"

namespace lmio {

// Deep-evanescent inversion breakdown (the per-mode free kernel underflows).
struct IllPosedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Quantization amplitude of the noise current density, omega sqrt(hbar eps0 eps''/pi).
double noise_amplitude(double eps_imag, double omega, const Units& units = Units::si());

enum class Surface { Left, Right };
enum class KernelPart { In, Refl, Transm, Layer };
enum class Direction { I_to_III, III_to_I };

// Field kernel at a surface point: i omega mu0 times the routed Green part.
//   Left surface:  In -> (I, free), Refl -> (I,I), Transm -> (I,III), Layer i -> (I, 2i)
//   Right surface: In -> (III, free), Refl -> (III,III), Transm -> (III,I), Layer i -> (III, 2i)
GreenResult field_kernel(const LayerStack& stack, double omega, Surface surface,
                         KernelPart part, int layer_index, const Vec3& r_surface,
                         const Vec3& s, int n_max, const QuadratureSpec& quad,
                         const Units& units = Units::si());

// Mode-diagonal reflection and transmission coefficients (surface-referenced:
// r at z = -L/2, t between the two surfaces).
cplx reflection_coeff(const LayerStack& stack, const ModeIndex& mode,
                      const Units& units = Units::si());
cplx transmission_coeff(const LayerStack& stack, const ModeIndex& mode, Direction dir,
                        const Units& units = Units::si());

struct ModeCoefficients {
    ModeIndex mode;
    cplx r;       // reflection, incidence from region I
    cplx t;       // transmission I -> III
    cplx r_rev;   // reflection, incidence from region III (referenced at +L/2)
    cplx t_rev;   // transmission III -> I
};
ModeCoefficients mode_coefficients(const LayerStack& stack, const ModeIndex& mode,
                                   const Units& units = Units::si());

// The 2x2 polarization structure of (r, t) for a planar stack is exactly
// diagonal; the cross entries are structural zeros.
struct PolarizationMatrix {
    cplx te = 0.0, tm = 0.0;
    cplx te_tm = 0.0, tm_te = 0.0;   // identically zero for planar stacks
};
PolarizationMatrix reflection_matrix(const LayerStack& stack, double omega,
                                     double lambda, const Units& units = Units::si());
PolarizationMatrix transmission_matrix(const LayerStack& stack, double omega,
                                       double lambda, Direction dir,
                                       const Units& units = Units::si());

// ---------------------------------------------------------------------------
// Noise kernels: per layer, the coefficient quadruples feeding the two
// left-surface and two right-surface noise fields, together with the spectral
// prefactor and the quantization amplitude. The aggregate strength is the
// flux-normalized commutator weight of the summed noise field,
//   S_left = (omega/c)^2 h_1 sum_i eps''_i/|h_i|^2 *
//            integral over layer i of |kernel profile|^2 dz,
// which for a propagating mode between identical lossless half spaces equals
// 1 - |r|^2 - |t|^2.

struct LayerNoiseKernels {
    int layer = 0;            // 1..N
    double z_lo = 0, z_hi = 0;
    cplx h;                   // axial wavenumber of the layer
    cplx k;
    double eps_imag = 0;
    double quant_amplitude = 0;            // noise_amplitude(eps'', omega)
    cplx prefactor{0.0};                   // -omega mu0/(4 pi) (2-delta_n0)/(lambda h)
    cplx A_M{0.0}, B_M{0.0}, A_N{0.0}, B_N{0.0};   // left-surface kernels
    cplx C_M{0.0}, D_M{0.0}, C_N{0.0}, D_N{0.0};   // right-surface kernels
};

struct NoiseKernelSet {
    ModeIndex mode;
    cplx h_I{0.0}, h_III{0.0};   // exterior axial wavenumbers
    std::vector<LayerNoiseKernels> layers;

    double aggregate_strength(Surface side, Pol pol, const Units& units) const;
};

NoiseKernelSet noise_kernels(const LayerStack& stack, const ModeIndex& mode,
                             const Units& units = Units::si());

// ---------------------------------------------------------------------------
// Per-mode energy balance for a propagating mode with identical lossless
// exterior media. absorption is the eps''-weighted depth integral of the
// interior intensity (closed form per layer); deficit = 1 - |r|^2 - |t|^2.

struct EnergyBalance {
    double R = 0, T = 0;
    double absorption = 0;
    double deficit = 0;
    double residual = 0;
};

EnergyBalance energy_balance(const LayerStack& stack, const ModeIndex& mode,
                             const Units& units = Units::si());

// ---------------------------------------------------------------------------
// Surface/guided-wave pole search: all zeros of the stack's dispersion
// denominator inside a rectangle of the complex lambda plane, located by
// argument-principle counting on recursively subdivided cells and polished by
// damped Newton. A degenerate rectangle (im_lo == im_hi) runs a real-line
// scan with bisection, which covers lossless guided modes sitting on the
// branch cut of the exterior axial wavenumber.

struct PoleWindow {
    double re_lo, re_hi;
    double im_lo, im_hi;
};

struct PoleHit {
    cplx lambda;
    double residual = 0;   // |D(lambda)| after polish, relative to the local scale
    bool converged = false;
};

struct PoleSearchResult {
    std::vector<PoleHit> poles;
    std::vector<PoleHit> unconverged;
    int winding = 0;       // argument-principle count over the whole window
};

PoleSearchResult find_surface_poles(const LayerStack& stack, double omega, Pol pol,
                                    const PoleWindow& window,
                                    const Units& units = Units::si());

} // namespace lmio
