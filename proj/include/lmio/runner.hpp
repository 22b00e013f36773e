#pragma once

#include <cstdint>

#include "lmio/config.hpp"

namespace lmio {

// ---------------------------------------------------------------------------
// spectrum: one row per (omega, transverse, polarization), omega-major order.

struct SpectrumRow {
    double omega = 0;
    double lambda = 0;
    double angle_deg = std::numeric_limits<double>::quiet_NaN();  // NaN in lambda mode
    Pol pol = Pol::TE;
    cplx r{0.0}, t{0.0};
    double R = 0, T = 0, A = 0;
    double balance_residual = std::numeric_limits<double>::quiet_NaN();
    std::string status = "ok";
};

std::vector<SpectrumRow> run_spectrum(const RunConfig& cfg, int jobs = 1);
std::string spectrum_csv(const std::vector<SpectrumRow>& rows);
std::string spectrum_json(const std::vector<SpectrumRow>& rows);

// ---------------------------------------------------------------------------
// green: the 9 tensor entries of one Green-part evaluation.

struct GreenRow {
    std::string entry;   // "xx", "xy", ...
    cplx value{0.0};
    double error_bound = 0;
    std::string status = "ok";
};

// part: "total", "10", "11", "13", "30", "31", "33", "12:<i>", "32:<i>"
std::vector<GreenRow> run_green(const RunConfig& cfg, const Vec3& r, const Vec3& s,
                                const std::string& part);
std::string green_csv(const std::vector<GreenRow>& rows);
std::string green_json(const std::vector<GreenRow>& rows);

// ---------------------------------------------------------------------------
// check: invariant suites on the configured stack.

struct CheckItem {
    std::string name;
    double residual = 0;
    double tolerance = 0;
    bool pass = false;
    std::string note;   // e.g. "skipped: exterior media absorb"
};

struct CheckReport {
    std::vector<CheckItem> items;
    bool all_pass = true;
};

CheckReport run_check(const RunConfig& cfg, std::uint64_t seed, bool inject_fault = false);
std::string check_text(const CheckReport& rep);

// ---------------------------------------------------------------------------
// poles.

struct PoleRow {
    double re_lambda = 0, im_lambda = 0;
    Pol pol = Pol::TE;
    double residual = 0;
    std::string status = "ok";
};

std::vector<PoleRow> run_poles(const RunConfig& cfg, const PoleWindow& window);
std::string poles_csv(const std::vector<PoleRow>& rows);
std::string poles_json(const std::vector<PoleRow>& rows);

} // namespace lmio
