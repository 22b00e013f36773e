#include "lmio/runner.hpp"

#include <atomic>
#include <cmath>
#include <random>
#include <thread>

namespace lmio {

namespace {

std::string fmt_or_empty(double x) { return std::isnan(x) ? "" : fmt17(x); }
std::string fmt_or_null(double x) { return std::isnan(x) ? "null" : fmt17(x); }

// lambda for one row; angle input is sugar for lambda = k_I sin(theta)
double row_lambda(const RunConfig& cfg, double omega, double tval) {
    if (cfg.transverse_kind == TransverseKind::Lambda) return tval;
    const cplx kI = wavenumber(cfg.stack.medium_I().permittivity(omega), omega, cfg.units().c);
    return kI.real() * std::sin(tval * pi / 180.0);
}

bool balance_applicable(const RunConfig& cfg, double omega, double lambda) {
    const int P = cfg.stack.num_regions() - 1;
    if (!cfg.stack.medium(0).lossless() || !cfg.stack.medium(P).lossless()) return false;
    const Units u = cfg.units();
    const cplx kI = wavenumber(cfg.stack.medium(0).permittivity(omega), omega, u.c);
    const cplx kIII = wavenumber(cfg.stack.medium(P).permittivity(omega), omega, u.c);
    if (std::abs(kI - kIII) > 1e-9 * std::abs(kI)) return false;
    return lambda < kI.real();
}

} // namespace

std::vector<SpectrumRow> run_spectrum(const RunConfig& cfg, int jobs) {
    struct Task {
        double omega, tval;
        Pol pol;
    };
    std::vector<Task> tasks;
    for (double w : cfg.omegas)
        for (double t : cfg.transverse)
            for (Pol p : cfg.polarizations()) tasks.push_back({w, t, p});

    std::vector<SpectrumRow> rows(tasks.size());
    const Units u = cfg.units();

    auto compute = [&](size_t i) {
        const Task& tk = tasks[i];
        SpectrumRow row;
        row.omega = tk.omega;
        row.pol = tk.pol;
        if (cfg.transverse_kind == TransverseKind::AngleDeg) row.angle_deg = tk.tval;
        try {
            row.lambda = row_lambda(cfg, tk.omega, tk.tval);
            const ModeIndex mode{tk.omega, row.lambda, 0, Parity::Even, tk.pol, +1};
            const FresnelRT rt = slab_rt(cfg.stack, mode, u);
            row.r = rt.r;
            row.t = rt.t;
            row.R = std::norm(rt.r);
            row.T = std::norm(rt.t);
            row.A = 1.0 - row.R - row.T;
            if (balance_applicable(cfg, tk.omega, row.lambda)) {
                const EnergyBalance eb = energy_balance(cfg.stack, mode, u);
                row.A = eb.absorption;
                row.balance_residual = eb.residual;
            }
        } catch (const std::exception& e) {
            row.status = std::string("error: ") + e.what();
        }
        rows[i] = std::move(row);
    };

    const int nthreads = std::max(1, jobs);
    if (nthreads == 1) {
        for (size_t i = 0; i < tasks.size(); ++i) compute(i);
    } else {
        std::atomic<size_t> next{0};
        std::vector<std::thread> pool;
        for (int t = 0; t < nthreads; ++t)
            pool.emplace_back([&]() {
                for (size_t i = next.fetch_add(1); i < tasks.size(); i = next.fetch_add(1))
                    compute(i);
            });
        for (auto& th : pool) th.join();
    }
    return rows;
}

static std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += "\"\"";
        q += c;
    }
    q += "\"";
    return q;
}

std::string spectrum_csv(const std::vector<SpectrumRow>& rows) {
    std::string s = "omega,lambda,angle_deg,pol,re_r,im_r,re_t,im_t,abs2_r,abs2_t,"
                    "absorption,balance_residual,status\r\n";
    for (const auto& r : rows) {
        s += fmt17(r.omega) + "," + fmt17(r.lambda) + "," + fmt_or_empty(r.angle_deg) + "," +
             pol_name(r.pol) + "," + fmt17(r.r.real()) + "," + fmt17(r.r.imag()) + "," +
             fmt17(r.t.real()) + "," + fmt17(r.t.imag()) + "," + fmt17(r.R) + "," +
             fmt17(r.T) + "," + fmt17(r.A) + "," + fmt_or_empty(r.balance_residual) + "," +
             csv_quote(r.status) + "\r\n";
    }
    return s;
}

std::string spectrum_json(const std::vector<SpectrumRow>& rows) {
    std::string s = "{\"schema_version\":1,\"rows\":[";
    for (size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (i) s += ",";
        s += "{\"omega\":" + fmt17(r.omega) + ",\"lambda\":" + fmt17(r.lambda) +
             ",\"angle_deg\":" + fmt_or_null(r.angle_deg) + ",\"pol\":\"" + pol_name(r.pol) +
             "\",\"re_r\":" + fmt17(r.r.real()) + ",\"im_r\":" + fmt17(r.r.imag()) +
             ",\"re_t\":" + fmt17(r.t.real()) + ",\"im_t\":" + fmt17(r.t.imag()) +
             ",\"abs2_r\":" + fmt17(r.R) + ",\"abs2_t\":" + fmt17(r.T) +
             ",\"absorption\":" + fmt17(r.A) +
             ",\"balance_residual\":" + fmt_or_null(r.balance_residual) + ",\"status\":\"" +
             r.status + "\"}";
    }
    s += "]}";
    return s;
}

// ---------------------------------------------------------------------------

std::vector<GreenRow> run_green(const RunConfig& cfg, const Vec3& r, const Vec3& s,
                                const std::string& part) {
    const Units u = cfg.units();
    if (cfg.omegas.size() != 1)
        throw ConfigError("green requires a single-frequency configuration");
    const double omega = cfg.omegas[0];
    const int P = cfg.stack.num_regions() - 1;

    GreenResult res;
    if (part == "total") {
        res = total_green(cfg.stack, omega, r, s, cfg.n_max, cfg.quad, u);
    } else {
        GreenPartLabel label{0, kFreeSource};
        auto bad = [&]() { throw ConfigError("green: bad part label '" + part + "'"); };
        if (part.size() < 2) bad();
        if (part[0] == '1') label.field_region = 0;
        else if (part[0] == '3') label.field_region = P;
        else bad();
        if (part.size() == 2) {
            if (part[1] == '0') label.source_region = kFreeSource;
            else if (part[1] == '1') label.source_region = 0;
            else if (part[1] == '3') label.source_region = P;
            else bad();
        } else if (part[1] == '2' && part[2] == ':') {
            const int i = std::atoi(part.c_str() + 3);
            if (i < 1 || i > cfg.stack.num_layers()) bad();
            label.source_region = i;
        } else {
            bad();
        }
        res = green_part(cfg.stack, omega, label, r, s, cfg.n_max, cfg.quad, u);
    }

    static const char* names[9] = {"xx", "xy", "xz", "yx", "yy", "yz", "zx", "zy", "zz"};
    std::vector<GreenRow> rows;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            GreenRow row;
            row.entry = names[3 * i + j];
            row.value = res.value(i, j);
            row.error_bound = res.error_bound;
            row.status = res.converged ? "ok" : "nonconvergence";
            rows.push_back(row);
        }
    return rows;
}

std::string green_csv(const std::vector<GreenRow>& rows) {
    std::string s = "entry,re,im,error_bound,status\r\n";
    for (const auto& r : rows)
        s += r.entry + "," + fmt17(r.value.real()) + "," + fmt17(r.value.imag()) + "," +
             fmt17(r.error_bound) + "," + csv_quote(r.status) + "\r\n";
    return s;
}

std::string green_json(const std::vector<GreenRow>& rows) {
    std::string s = "{\"schema_version\":1,\"rows\":[";
    for (size_t i = 0; i < rows.size(); ++i) {
        if (i) s += ",";
        s += "{\"entry\":\"" + rows[i].entry + "\",\"re\":" + fmt17(rows[i].value.real()) +
             ",\"im\":" + fmt17(rows[i].value.imag()) +
             ",\"error_bound\":" + fmt17(rows[i].error_bound) + ",\"status\":\"" +
             rows[i].status + "\"}";
    }
    s += "]}";
    return s;
}

// ---------------------------------------------------------------------------

CheckReport run_check(const RunConfig& cfg, std::uint64_t seed, bool inject_fault) {
    CheckReport rep;
    const Units u = cfg.units();
    const LayerStack& st = cfg.stack;
    const int P = st.num_regions() - 1;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const double omega = cfg.omegas.front();
    const cplx kI = wavenumber(st.medium(0).permittivity(omega), omega, u.c);

    bool all_lossless = true;
    for (int q = 0; q <= P; ++q)
        if (!st.medium(q).lossless()) all_lossless = false;
    const bool ext_ok = st.medium(0).lossless() && st.medium(P).lossless() &&
                        std::abs(kI - wavenumber(st.medium(P).permittivity(omega), omega, u.c)) <
                            1e-9 * std::abs(kI);

    // 1. lossless unitarity
    {
        CheckItem it{"unitarity", 0.0, 1e-10, true, ""};
        if (!all_lossless || !ext_ok) {
            it.note = "skipped: stack is not lossless with identical exteriors";
        } else {
            for (int i = 0; i < 20; ++i) {
                const double lam = 0.95 * kI.real() * uni(rng);
                for (Pol p : {Pol::TE, Pol::TM}) {
                    const ModeIndex m{omega, lam, 0, Parity::Even, p, +1};
                    const FresnelRT rt = slab_rt(st, m, u);
                    it.residual = std::max(it.residual,
                                           std::abs(std::norm(rt.r) + std::norm(rt.t) - 1.0));
                }
            }
            it.pass = it.residual < it.tolerance;
        }
        rep.items.push_back(it);
    }

    // 2. Green reciprocity
    {
        CheckItem it{"reciprocity", 0.0, 1e-6, true, ""};
        const double wl = 2.0 * pi * u.c / omega;
        const double L = st.total_thickness();
        for (int i = 0; i < 3; ++i) {
            const Vec3 a{0.13 * wl * (uni(rng) - 0.5), 0.11 * wl * (uni(rng) - 0.5),
                         -0.5 * L - (0.08 + 0.3 * uni(rng)) * wl};
            const Vec3 b{0.17 * wl * (uni(rng) - 0.5), 0.07 * wl * (uni(rng) - 0.5),
                         0.5 * L + (0.08 + 0.3 * uni(rng)) * wl};
            const auto gab = total_green(st, omega, a, b, cfg.n_max, cfg.quad, u);
            const auto gba = total_green(st, omega, b, a, cfg.n_max, cfg.quad, u);
            const double scale = std::max(gab.value.frobenius(), 1e-300);
            it.residual = std::max(it.residual,
                                   (gab.value - gba.value.transpose()).frobenius() / scale);
        }
        it.pass = it.residual < it.tolerance;
        rep.items.push_back(it);
    }

    // 3. absorption/noise balance
    {
        CheckItem it{"balance", 0.0, 1e-6, true, ""};
        if (!ext_ok) {
            it.note = "skipped: exterior media must be identical and lossless";
        } else {
            for (int i = 0; i < 5; ++i) {
                const double lam = (0.05 + 0.85 * uni(rng)) * kI.real();
                for (Pol p : {Pol::TE, Pol::TM}) {
                    const ModeIndex m{omega, lam, 0, Parity::Even, p, +1};
                    const EnergyBalance eb = energy_balance(st, m, u);
                    it.residual = std::max(it.residual, eb.residual);
                    NoiseKernelSet ks = noise_kernels(st, m, u);
                    if (inject_fault && !ks.layers.empty()) {
                        ks.layers[0].A_M *= 1.01;
                        ks.layers[0].A_N *= 1.01;
                    }
                    const double S = ks.aggregate_strength(Surface::Left, p, u);
                    it.residual = std::max(it.residual, std::abs(S - eb.deficit));
                }
            }
            it.pass = it.residual < it.tolerance;
        }
        rep.items.push_back(it);
    }

    // 4. tangential continuity of the total Green tensor across each interface
    {
        CheckItem it{"continuity", 0.0, 1e-6, true, ""};
        const double wl = 2.0 * pi * u.c / omega;
        const double L = st.total_thickness();
        const Vec3 s{0.0, 0.0, -0.5 * L - 0.31 * wl};
        const double dz = 1e-8 * wl;
        for (int m = 0; m <= st.num_layers(); ++m) {
            const double zm = st.interface_z(m);
            for (int rep_i = 0; rep_i < 2; ++rep_i) {
                const double rho = (0.07 + 0.4 * uni(rng)) * wl;
                const Vec3 ra{rho, 0.0, zm - dz};
                const Vec3 rb{rho, 0.0, zm + dz};
                const auto ga = total_green(st, omega, ra, s, cfg.n_max, cfg.quad, u);
                const auto gb = total_green(st, omega, rb, s, cfg.n_max, cfg.quad, u);
                double scale = 0.0, diff = 0.0;
                for (int i = 0; i < 2; ++i)
                    for (int j = 0; j < 3; ++j) {
                        scale = std::max(scale, std::abs(ga.value(i, j)));
                        diff = std::max(diff, std::abs(ga.value(i, j) - gb.value(i, j)));
                    }
                if (scale > 0.0) it.residual = std::max(it.residual, diff / scale);
            }
        }
        it.pass = it.residual < it.tolerance;
        rep.items.push_back(it);
    }

    rep.all_pass = true;
    for (const auto& it : rep.items) rep.all_pass = rep.all_pass && it.pass;
    return rep;
}

std::string check_text(const CheckReport& rep) {
    std::string s;
    for (const auto& it : rep.items) {
        s += it.pass ? "[PASS] " : "[FAIL] ";
        s += it.name;
        if (!it.note.empty()) {
            s += " (" + it.note + ")";
        } else {
            s += " residual=" + fmt17(it.residual) + " tolerance=" + fmt17(it.tolerance);
        }
        s += "\n";
    }
    s += rep.all_pass ? "all checks passed\n" : "some checks FAILED\n";
    return s;
}

// ---------------------------------------------------------------------------

std::vector<PoleRow> run_poles(const RunConfig& cfg, const PoleWindow& window) {
    if (cfg.omegas.size() != 1)
        throw ConfigError("poles requires a single-frequency configuration");
    const double omega = cfg.omegas[0];
    std::vector<PoleRow> rows;
    for (Pol p : cfg.polarizations()) {
        const PoleSearchResult res =
            find_surface_poles(cfg.stack, omega, p, window, cfg.units());
        for (const auto& hit : res.poles)
            rows.push_back({hit.lambda.real(), hit.lambda.imag(), p, hit.residual, "ok"});
        for (const auto& hit : res.unconverged)
            rows.push_back({hit.lambda.real(), hit.lambda.imag(), p, hit.residual,
                            "nonconvergence"});
    }
    return rows;
}

std::string poles_csv(const std::vector<PoleRow>& rows) {
    std::string s = "re_lambda,im_lambda,pol,residual,status\r\n";
    for (const auto& r : rows)
        s += fmt17(r.re_lambda) + "," + fmt17(r.im_lambda) + "," + pol_name(r.pol) + "," +
             fmt17(r.residual) + "," + csv_quote(r.status) + "\r\n";
    return s;
}

std::string poles_json(const std::vector<PoleRow>& rows) {
    std::string s = "{\"schema_version\":1,\"rows\":[";
    for (size_t i = 0; i < rows.size(); ++i) {
        if (i) s += ",";
        s += "{\"re_lambda\":" + fmt17(rows[i].re_lambda) +
             ",\"im_lambda\":" + fmt17(rows[i].im_lambda) + ",\"pol\":\"" +
             pol_name(rows[i].pol) + "\",\"residual\":" + fmt17(rows[i].residual) +
             ",\"status\":\"" + rows[i].status + "\"}";
    }
    s += "]}";
    return s;
}

} // namespace lmio
