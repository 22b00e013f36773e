#pragma once

#include <vector>

#include "lmio/numerics.hpp"

namespace lmio {

struct LorentzOscillator {
    double omega_p;   // plasma frequency [rad/s]
    double omega_0;   // resonance [rad/s]
    double gamma;     // damping [rad/s], > 0
};

// Frequency-dependent complex permittivity of one homogeneous region.
// Passivity (Im eps >= 0 for omega > 0) is enforced at construction.
class DispersionModel {
public:
    enum class Kind { ConstantComplex, DrudeLorentz };

    static DispersionModel constant(cplx eps);
    static DispersionModel drude_lorentz(double eps_inf,
                                         std::vector<LorentzOscillator> oscillators);

    Kind kind() const { return kind_; }
    cplx permittivity(double omega) const;   // throws std::domain_error for omega <= 0
    double eps_imag(double omega) const { return permittivity(omega).imag(); }
    bool lossless() const;

    cplx constant_value() const { return eps_const_; }
    double eps_inf() const { return eps_inf_; }
    const std::vector<LorentzOscillator>& oscillators() const { return oscillators_; }

private:
    DispersionModel() = default;
    Kind kind_ = Kind::ConstantComplex;
    cplx eps_const_{1.0, 0.0};
    double eps_inf_ = 1.0;
    std::vector<LorentzOscillator> oscillators_;
};

struct PermittivityValue {
    cplx eps;   // dimensionless
    cplx k;     // [1/m], branch Im k >= 0
};

PermittivityValue permittivity(const DispersionModel& model, double omega,
                               const Units& units = Units::si());

} // namespace lmio
