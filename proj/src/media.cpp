#include "lmio/media.hpp"

namespace lmio {

DispersionModel DispersionModel::constant(cplx eps) {
    if (eps.imag() < 0.0)
        throw std::invalid_argument("DispersionModel: Im eps must be >= 0 (passivity)");
    DispersionModel m;
    m.kind_ = Kind::ConstantComplex;
    m.eps_const_ = eps;
    return m;
}

DispersionModel DispersionModel::drude_lorentz(double eps_inf,
                                               std::vector<LorentzOscillator> oscillators) {
    for (const auto& o : oscillators) {
        if (!(o.gamma > 0.0))
            throw std::invalid_argument("DispersionModel: oscillator gamma must be > 0");
        if (o.omega_p < 0.0)
            throw std::invalid_argument("DispersionModel: oscillator omega_p must be >= 0");
        if (o.omega_0 < 0.0)
            throw std::invalid_argument("DispersionModel: oscillator omega_0 must be >= 0");
    }
    DispersionModel m;
    m.kind_ = Kind::DrudeLorentz;
    m.eps_inf_ = eps_inf;
    m.oscillators_ = std::move(oscillators);
    return m;
}

cplx DispersionModel::permittivity(double omega) const {
    if (!(omega > 0.0))
        throw std::domain_error("DispersionModel::permittivity: omega must be > 0");
    if (kind_ == Kind::ConstantComplex) return eps_const_;
    cplx eps(eps_inf_, 0.0);
    for (const auto& o : oscillators_) {
        const cplx den(o.omega_0 * o.omega_0 - omega * omega, -o.gamma * omega);
        eps += o.omega_p * o.omega_p / den;
    }
    return eps;
}

bool DispersionModel::lossless() const {
    if (kind_ == Kind::ConstantComplex) return eps_const_.imag() == 0.0;
    for (const auto& o : oscillators_)
        if (o.omega_p > 0.0) return false;
    return true;
}

PermittivityValue permittivity(const DispersionModel& model, double omega,
                               const Units& units) {
    const cplx eps = model.permittivity(omega);
    return {eps, wavenumber(eps, omega, units.c)};
}

} // namespace lmio
