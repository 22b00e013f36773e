#pragma once

namespace lmio {

inline constexpr double pi = 3.141592653589793238462643383279502884;

// Physical constants, CODATA 2018. mu0 is derived from eps0 and c so that
// eps0*mu0*c^2 == 1 holds to the last bit; the energy-balance identities
// rely on that product being exact.
struct Units {
    double c    = 299792458.0;
    double eps0 = 8.8541878128e-12;
    double mu0  = 1.0 / (8.8541878128e-12 * 299792458.0 * 299792458.0);
    double hbar = 6.62607015e-34 / (2.0 * pi);

    static Units si() { return {}; }
    // Dimensionless mode for cross-checks: c = eps0 = hbar = 1 (so mu0 = 1).
    static Units natural() { return {1.0, 1.0, 1.0, 1.0}; }
};

} // namespace lmio
