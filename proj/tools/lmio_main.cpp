#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "lmio/runner.hpp"

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

void emit(const std::string& out_path, const std::string& text) {
    if (out_path.empty() || out_path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + out_path);
    out << text;
}

lmio::Vec3 parse_point(const std::string& s) {
    lmio::Vec3 p;
    if (std::sscanf(s.c_str(), "%lf,%lf,%lf", &p.x, &p.y, &p.z) != 3)
        throw std::runtime_error("expected a point as 'x,y,z': " + s);
    return p;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"layered-media Green tensors, mode coefficients and noise kernels"};
    app.require_subcommand(1);

    std::string config_path, out_path = "-", format_override;
    std::uint64_t seed = 12345;
    int jobs = 1;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "configuration file (JSON)")->required();
        sub->add_option("--out", out_path, "output path ('-' = stdout)");
        sub->add_option("--format", format_override, "csv|json (overrides the config)");
        sub->add_option("--jobs", jobs, "worker threads");
        sub->add_option("--seed", seed, "seed for randomized check suites");
    };

    auto* sp = app.add_subcommand("spectrum", "reflection/transmission/absorption table");
    add_common(sp);

    auto* gr = app.add_subcommand("green", "one Green-tensor evaluation");
    add_common(gr);
    std::string field_pt, source_pt, part = "total";
    gr->add_option("--field-point", field_pt, "field point 'x,y,z' [m]")->required();
    gr->add_option("--source-point", source_pt, "source point 'x,y,z' [m]")->required();
    gr->add_option("--part", part, "total|10|11|13|30|31|33|12:<i>|32:<i>");

    auto* ck = app.add_subcommand("check", "run the invariant suites");
    add_common(ck);
    bool inject_fault = false;
    ck->add_flag("--inject-fault", inject_fault, "perturb a noise kernel (test hook)")
        ->group("");   // hidden

    auto* po = app.add_subcommand("poles", "surface/guided-wave pole table");
    add_common(po);
    std::string window_str, pole_pol = "both";
    po->add_option("--window", window_str, "lambda window 're_lo,re_hi,im_lo,im_hi' [1/m]")
        ->required();

    CLI11_PARSE(app, argc, argv);

    try {
        lmio::RunConfig cfg = lmio::parse_config(slurp(config_path));
        if (format_override == "csv") cfg.format = lmio::OutputFormat::CSV;
        else if (format_override == "json") cfg.format = lmio::OutputFormat::JSON;
        else if (!format_override.empty())
            throw std::runtime_error("--format must be csv or json");
        const bool csv = cfg.format == lmio::OutputFormat::CSV;

        if (sp->parsed()) {
            auto rows = lmio::run_spectrum(cfg, jobs);
            emit(out_path, csv ? lmio::spectrum_csv(rows) : lmio::spectrum_json(rows));
        } else if (gr->parsed()) {
            auto rows = lmio::run_green(cfg, parse_point(field_pt), parse_point(source_pt), part);
            emit(out_path, csv ? lmio::green_csv(rows) : lmio::green_json(rows));
        } else if (ck->parsed()) {
            auto rep = lmio::run_check(cfg, seed, inject_fault);
            emit(out_path, lmio::check_text(rep));
            return rep.all_pass ? 0 : 1;
        } else if (po->parsed()) {
            lmio::PoleWindow w{};
            if (std::sscanf(window_str.c_str(), "%lf,%lf,%lf,%lf", &w.re_lo, &w.re_hi,
                            &w.im_lo, &w.im_hi) != 4)
                throw std::runtime_error("--window expects 're_lo,re_hi,im_lo,im_hi'");
            auto rows = lmio::run_poles(cfg, w);
            emit(out_path, csv ? lmio::poles_csv(rows) : lmio::poles_json(rows));
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
