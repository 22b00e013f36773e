#pragma once

#include "lmio/numerics.hpp"

namespace lmio {

enum class Parity { Even, Odd };
enum class Pol { TE, TM };

inline const char* pol_name(Pol p) { return p == Pol::TE ? "TE" : "TM"; }

// One spectral channel of the cylindrical mode expansion.
struct ModeIndex {
    double omega;        // [rad/s]
    double lambda;       // transverse wavenumber [1/m], >= 0
    int n = 0;           // azimuthal order, >= 0
    Parity parity = Parity::Even;
    Pol pol = Pol::TE;
    int direction = +1;  // sign of the axial wavenumber h
};

struct CylPoint {
    double r;    // >= 0 [m]
    double psi;  // [rad]
    double z;    // [m]
};

// Transverse profiles (no e^{ihz} factor). On the axis the 0/0 forms
// n J_n(lambda r)/r and J_n'(lambda r) are replaced by their series limits.
struct MProfile {
    CVec3 v;   // cylindrical components (r, psi, z); z component is 0
};
struct NProfile {
    CVec3 t;   // transverse part: N(h,k) = (1/k) (i h t + z) e^{ihz}
    CVec3 z;
};

MProfile m_profile(int n, Parity parity, double lambda, double r, double psi);
NProfile n_profile(int n, Parity parity, double lambda, double r, double psi);

// Full vector wave functions, cylindrical components at p.
CVec3 vector_wave_M(const ModeIndex& mode, cplx h, const CylPoint& p);
CVec3 vector_wave_N(const ModeIndex& mode, cplx h, cplx k, const CylPoint& p);

// Rotate cylindrical components at azimuth psi into Cartesian components.
CVec3 cyl_to_cart(const CVec3& v, double psi);

} // namespace lmio
