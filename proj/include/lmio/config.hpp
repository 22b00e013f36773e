#pragma once

#include <optional>
#include <string>

#include "lmio/iorel.hpp"

namespace lmio {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class OutputFormat { CSV, JSON };
enum class PolSelect { TE, TM, Both };
enum class TransverseKind { Lambda, AngleDeg };

struct RunConfig {
    LayerStack stack;
    std::vector<double> omegas;          // [rad/s], strictly increasing
    TransverseKind transverse_kind = TransverseKind::Lambda;
    std::vector<double> transverse;      // lambda [1/m] or angle [deg]
    PolSelect pol = PolSelect::Both;
    int n_max = 8;
    QuadratureSpec quad;
    OutputFormat format = OutputFormat::CSV;
    bool natural_units = false;

    Units units() const { return natural_units ? Units::natural() : Units::si(); }
    std::vector<Pol> polarizations() const {
        if (pol == PolSelect::TE) return {Pol::TE};
        if (pol == PolSelect::TM) return {Pol::TM};
        return {Pol::TE, Pol::TM};
    }
};

// Strict parse of the UTF-8 JSON configuration document: unknown keys are
// errors, and all validation violations are reported together.
RunConfig parse_config(const std::string& text);

// Canonical serialization (fixed key order, 17 significant digits, grids as
// explicit value lists). normalize = serialize after parse; it is idempotent.
std::string serialize_config(const RunConfig& cfg);
std::string normalize_config(const std::string& text);

// 17-significant-digit formatting shared by all machine-readable output.
std::string fmt17(double x);

} // namespace lmio
