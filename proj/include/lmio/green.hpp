#pragma once

#include "lmio/stack.hpp"

namespace lmio {

struct Vec3 {
    double x = 0, y = 0, z = 0;
};

// Free-space label for GreenPartLabel::source_region.
inline constexpr int kFreeSource = -1;

// Decomposition label. field_region must be one of the half spaces
// (0 or N+1); source_region is an internal region index or kFreeSource.
struct GreenPartLabel {
    int field_region;
    int source_region;
};

// Dyadic Green tensor of an unbounded homogeneous medium,
//   (U + grad grad / k^2) e^{ikR} / (4 pi R),
// in Cartesian components. The depolarizing delta term at R = 0 is excluded;
// points closer than 1e-12 are a coincidence error.
Complex3Tensor free_green(cplx eps, double omega, const Vec3& r, const Vec3& s,
                          const Units& units = Units::si());

struct GreenResult {
    Complex3Tensor value;
    double error_bound = 0.0;     // quadrature + truncation tail + azimuthal tail
    bool converged = true;
    int n_used = 0;               // highest azimuthal order evaluated
    bool n_truncated = false;     // n_max reached before the term sum settled
    double azimuthal_error = 0.0;
};

// Scattering (interface-induced) part of the Green tensor for field point r
// in region f and source point s in region s, assembled as the spectral sum
// over cylindrical modes with coefficients from source_amplitudes. The
// cylinder axis passes through the source's transverse position, which makes
// the azimuthal sum terminate at n = 1 exactly.
GreenResult scattering_green(const LayerStack& stack, double omega,
                             int field_region, int source_region,
                             const Vec3& r, const Vec3& s, int n_max,
                             const QuadratureSpec& quad,
                             const Units& units = Units::si());

// Same, with the cylinder axis at an arbitrary transverse position. Moving
// the axis off the source exercises the full azimuthal sum; the result is
// axis-independent.
GreenResult scattering_green_about_axis(const LayerStack& stack, double omega,
                                        int field_region, int source_region,
                                        const Vec3& r, const Vec3& s,
                                        double axis_x, double axis_y, int n_max,
                                        const QuadratureSpec& quad,
                                        const Units& units = Units::si());

// One part of the region decomposition: the free part (source_region ==
// kFreeSource, both points in field_region's medium) or the scattering part
// with the labelled source region. field_region must be a half space.
GreenResult green_part(const LayerStack& stack, double omega,
                       const GreenPartLabel& label, const Vec3& r, const Vec3& s,
                       int n_max, const QuadratureSpec& quad,
                       const Units& units = Units::si());

// Total Green tensor between arbitrary points (field point may sit inside a
// layer): scattering part plus, when both points share a region, the free
// part of that medium.
GreenResult total_green(const LayerStack& stack, double omega, const Vec3& r,
                        const Vec3& s, int n_max, const QuadratureSpec& quad,
                        const Units& units = Units::si());

// lambda_max resolution used by the spectral integrals: quad.lambda_max when
// positive, else 20 * max_q |k_q|.
double resolve_lambda_max(const LayerStack& stack, double omega,
                          const QuadratureSpec& quad, const Units& units);
std::vector<double> branch_point_magnitudes(const LayerStack& stack, double omega,
                                            const Units& units);

} // namespace lmio
