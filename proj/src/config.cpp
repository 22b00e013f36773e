#include "lmio/config.hpp"

#include <cstdio>
#include <set>
#include <sstream>

#include "json.hpp"

namespace lmio {

using nlohmann::json;

std::string fmt17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

struct Collector {
    std::vector<std::string> errors;
    void add(const std::string& path, const std::string& msg) {
        errors.push_back(path + ": " + msg);
    }
    void require_keys(const json& j, const std::string& path,
                      const std::set<std::string>& allowed,
                      const std::set<std::string>& required) {
        if (!j.is_object()) {
            add(path, "expected an object");
            return;
        }
        for (auto it = j.begin(); it != j.end(); ++it)
            if (!allowed.count(it.key())) add(path, "unknown key '" + it.key() + "'");
        for (const auto& k : required)
            if (!j.contains(k)) add(path, "missing required key '" + k + "'");
    }
    void throw_if_any() const {
        if (errors.empty()) return;
        std::string msg = "configuration invalid:";
        for (const auto& e : errors) msg += "\n  - " + e;
        throw ConfigError(msg);
    }
};

double get_num(const json& j, const std::string& path, Collector& c) {
    if (!j.is_number()) {
        c.add(path, "expected a number");
        return 0.0;
    }
    return j.get<double>();
}

DispersionModel parse_medium(const json& j, const std::string& path, Collector& c) {
    if (!j.is_object()) {
        c.add(path, "expected an object");
        return DispersionModel::constant(1.0);
    }
    const std::string model = j.contains("model") && j["model"].is_string()
                                  ? j["model"].get<std::string>()
                                  : "";
    if (model == "constant") {
        c.require_keys(j, path, {"model", "epsilon"}, {"model", "epsilon"});
        cplx eps(1.0, 0.0);
        if (j.contains("epsilon")) {
            const json& e = j["epsilon"];
            if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number())
                eps = cplx(e[0].get<double>(), e[1].get<double>());
            else if (e.is_number())
                eps = cplx(e.get<double>(), 0.0);
            else
                c.add(path + ".epsilon", "expected a number or [re, im]");
        }
        if (eps.imag() < 0.0) {
            c.add(path + ".epsilon", "Im epsilon must be >= 0 (passivity)");
            eps = cplx(eps.real(), 0.0);
        }
        return DispersionModel::constant(eps);
    }
    if (model == "drude_lorentz") {
        c.require_keys(j, path, {"model", "eps_inf", "oscillators"},
                       {"model", "eps_inf", "oscillators"});
        double eps_inf = j.contains("eps_inf") ? get_num(j["eps_inf"], path + ".eps_inf", c) : 1.0;
        std::vector<LorentzOscillator> osc;
        if (j.contains("oscillators")) {
            if (!j["oscillators"].is_array()) {
                c.add(path + ".oscillators", "expected an array");
            } else {
                int i = 0;
                for (const auto& o : j["oscillators"]) {
                    const std::string p = path + ".oscillators[" + std::to_string(i++) + "]";
                    c.require_keys(o, p, {"omega_p", "omega_0", "gamma"},
                                   {"omega_p", "omega_0", "gamma"});
                    LorentzOscillator L{0, 0, 1};
                    if (o.is_object()) {
                        if (o.contains("omega_p")) L.omega_p = get_num(o["omega_p"], p + ".omega_p", c);
                        if (o.contains("omega_0")) L.omega_0 = get_num(o["omega_0"], p + ".omega_0", c);
                        if (o.contains("gamma")) L.gamma = get_num(o["gamma"], p + ".gamma", c);
                    }
                    if (!(L.gamma > 0.0)) {
                        c.add(p + ".gamma", "must be > 0");
                        L.gamma = 1.0;
                    }
                    if (L.omega_p < 0.0) c.add(p + ".omega_p", "must be >= 0");
                    if (L.omega_0 < 0.0) c.add(p + ".omega_0", "must be >= 0");
                    osc.push_back(L);
                }
            }
        }
        return DispersionModel::drude_lorentz(eps_inf, std::move(osc));
    }
    c.add(path + ".model", "must be 'constant' or 'drude_lorentz'");
    return DispersionModel::constant(1.0);
}

std::vector<double> parse_grid(const json& j, const std::string& path, Collector& c) {
    std::vector<double> out;
    if (!j.is_object()) {
        c.add(path, "expected an object with 'values' or 'min'/'max'/'count'");
        return out;
    }
    if (j.contains("values")) {
        c.require_keys(j, path, {"values"}, {"values"});
        if (!j["values"].is_array() || j["values"].empty()) {
            c.add(path + ".values", "expected a nonempty array of numbers");
            return out;
        }
        for (const auto& v : j["values"]) {
            if (!v.is_number()) {
                c.add(path + ".values", "expected numbers");
                return {};
            }
            out.push_back(v.get<double>());
        }
    } else {
        c.require_keys(j, path, {"min", "max", "count"}, {"min", "max", "count"});
        if (c.errors.empty() || (j.contains("min") && j.contains("max") && j.contains("count"))) {
            const double lo = get_num(j["min"], path + ".min", c);
            const double hi = get_num(j["max"], path + ".max", c);
            if (!j["count"].is_number_integer() || j["count"].get<long>() < 1) {
                c.add(path + ".count", "expected an integer >= 1");
                return out;
            }
            const long n = j["count"].get<long>();
            if (n == 1) {
                out.push_back(lo);
            } else {
                if (!(hi > lo)) c.add(path, "max must be > min");
                for (long i = 0; i < n; ++i)
                    out.push_back(lo + (hi - lo) * double(i) / double(n - 1));
            }
        }
    }
    for (size_t i = 1; i < out.size(); ++i)
        if (!(out[i] > out[i - 1])) {
            c.add(path, "grid must be strictly increasing");
            break;
        }
    return out;
}

} // namespace

RunConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("configuration parse error: ") + e.what());
    }
    Collector c;
    c.require_keys(j, "$",
                   {"stack", "frequency", "transverse", "polarization", "n_max",
                    "quadrature", "output_format", "units"},
                   {"stack", "frequency", "transverse"});
    c.throw_if_any();   // structural errors first; fields below assume presence

    // stack
    const json& js = j["stack"];
    c.require_keys(js, "$.stack", {"medium_I", "layers", "medium_III"},
                   {"medium_I", "medium_III"});
    DispersionModel mI = DispersionModel::constant(1.0);
    DispersionModel mIII = DispersionModel::constant(1.0);
    std::vector<Layer> layers;
    if (js.is_object()) {
        if (js.contains("medium_I")) mI = parse_medium(js["medium_I"], "$.stack.medium_I", c);
        if (js.contains("medium_III")) mIII = parse_medium(js["medium_III"], "$.stack.medium_III", c);
        if (js.contains("layers")) {
            if (!js["layers"].is_array()) {
                c.add("$.stack.layers", "expected an array");
            } else {
                int i = 0;
                for (const auto& jl : js["layers"]) {
                    const std::string p = "$.stack.layers[" + std::to_string(i++) + "]";
                    c.require_keys(jl, p, {"medium", "thickness"}, {"medium", "thickness"});
                    DispersionModel med = DispersionModel::constant(1.0);
                    double d = 0.0;
                    if (jl.is_object()) {
                        if (jl.contains("medium")) med = parse_medium(jl["medium"], p + ".medium", c);
                        if (jl.contains("thickness")) d = get_num(jl["thickness"], p + ".thickness", c);
                    }
                    if (!(d > 0.0)) {
                        c.add(p + ".thickness", "layer " + std::to_string(i) + " thickness must be > 0");
                        d = 1.0;
                    }
                    layers.push_back({med, d});
                }
            }
        }
    }

    std::vector<double> omegas = parse_grid(j["frequency"], "$.frequency", c);
    for (double w : omegas)
        if (!(w > 0.0)) {
            c.add("$.frequency", "frequencies must be > 0");
            break;
        }

    // transverse grid
    TransverseKind tk = TransverseKind::Lambda;
    std::vector<double> tv;
    {
        const json& jt = j["transverse"];
        if (!jt.is_object()) {
            c.add("$.transverse", "expected an object");
        } else {
            const bool has_l = jt.contains("lambda"), has_a = jt.contains("angle_deg");
            c.require_keys(jt, "$.transverse", {"lambda", "angle_deg"}, {});
            if (has_l == has_a) {
                c.add("$.transverse", "exactly one of 'lambda' or 'angle_deg' is required");
            } else if (has_l) {
                tk = TransverseKind::Lambda;
                tv = parse_grid(jt["lambda"], "$.transverse.lambda", c);
                for (double x : tv)
                    if (x < 0.0) {
                        c.add("$.transverse.lambda", "lambda must be >= 0");
                        break;
                    }
            } else {
                tk = TransverseKind::AngleDeg;
                tv = parse_grid(jt["angle_deg"], "$.transverse.angle_deg", c);
                for (double x : tv)
                    if (x < 0.0 || x >= 90.0) {
                        c.add("$.transverse.angle_deg", "angles must lie in [0, 90)");
                        break;
                    }
                if (!mI.lossless())
                    c.add("$.transverse.angle_deg", "angle input requires a lossless medium_I");
            }
        }
    }

    PolSelect pol = PolSelect::Both;
    if (j.contains("polarization")) {
        const std::string s = j["polarization"].is_string() ? j["polarization"].get<std::string>() : "";
        if (s == "TE") pol = PolSelect::TE;
        else if (s == "TM") pol = PolSelect::TM;
        else if (s == "both") pol = PolSelect::Both;
        else c.add("$.polarization", "must be 'TE', 'TM' or 'both'");
    }

    int n_max = 8;
    if (j.contains("n_max")) {
        if (!j["n_max"].is_number_integer() || j["n_max"].get<long>() < 0)
            c.add("$.n_max", "must be an integer >= 0");
        else
            n_max = static_cast<int>(j["n_max"].get<long>());
    }

    QuadratureSpec quad;
    if (j.contains("quadrature")) {
        const json& q = j["quadrature"];
        c.require_keys(q, "$.quadrature",
                       {"rel_tol", "abs_tol", "max_subdivisions", "lambda_max"}, {});
        if (q.is_object()) {
            if (q.contains("rel_tol")) quad.rel_tol = get_num(q["rel_tol"], "$.quadrature.rel_tol", c);
            if (q.contains("abs_tol")) quad.abs_tol = get_num(q["abs_tol"], "$.quadrature.abs_tol", c);
            if (q.contains("max_subdivisions")) {
                if (!q["max_subdivisions"].is_number_integer() || q["max_subdivisions"].get<long>() < 1)
                    c.add("$.quadrature.max_subdivisions", "must be an integer >= 1");
                else
                    quad.max_subdivisions = static_cast<int>(q["max_subdivisions"].get<long>());
            }
            if (q.contains("lambda_max")) quad.lambda_max = get_num(q["lambda_max"], "$.quadrature.lambda_max", c);
        }
        if (!(quad.rel_tol > 0.0)) c.add("$.quadrature.rel_tol", "must be > 0");
        if (!(quad.abs_tol > 0.0)) c.add("$.quadrature.abs_tol", "must be > 0");
        if (quad.lambda_max < 0.0) c.add("$.quadrature.lambda_max", "must be >= 0 (0 = auto)");
    }

    OutputFormat fmt = OutputFormat::CSV;
    if (j.contains("output_format")) {
        const std::string s = j["output_format"].is_string() ? j["output_format"].get<std::string>() : "";
        if (s == "csv") fmt = OutputFormat::CSV;
        else if (s == "json") fmt = OutputFormat::JSON;
        else c.add("$.output_format", "must be 'csv' or 'json'");
    }

    bool natural = false;
    if (j.contains("units")) {
        const std::string s = j["units"].is_string() ? j["units"].get<std::string>() : "";
        if (s == "SI") natural = false;
        else if (s == "natural") natural = true;
        else c.add("$.units", "must be 'SI' or 'natural'");
    }

    c.throw_if_any();
    return RunConfig{LayerStack(std::move(mI), std::move(layers), std::move(mIII)),
                     std::move(omegas), tk, std::move(tv), pol, n_max, quad, fmt, natural};
}

namespace {

void append_medium(std::string& s, const DispersionModel& m) {
    if (m.kind() == DispersionModel::Kind::ConstantComplex) {
        s += "{\"model\":\"constant\",\"epsilon\":[" + fmt17(m.constant_value().real()) + "," +
             fmt17(m.constant_value().imag()) + "]}";
    } else {
        s += "{\"model\":\"drude_lorentz\",\"eps_inf\":" + fmt17(m.eps_inf()) +
             ",\"oscillators\":[";
        bool first = true;
        for (const auto& o : m.oscillators()) {
            if (!first) s += ",";
            first = false;
            s += "{\"omega_p\":" + fmt17(o.omega_p) + ",\"omega_0\":" + fmt17(o.omega_0) +
                 ",\"gamma\":" + fmt17(o.gamma) + "}";
        }
        s += "]}";
    }
}

void append_grid(std::string& s, const std::vector<double>& g) {
    s += "{\"values\":[";
    for (size_t i = 0; i < g.size(); ++i) {
        if (i) s += ",";
        s += fmt17(g[i]);
    }
    s += "]}";
}

} // namespace

std::string serialize_config(const RunConfig& cfg) {
    std::string s = "{\"stack\":{\"medium_I\":";
    append_medium(s, cfg.stack.medium_I());
    s += ",\"layers\":[";
    for (int i = 0; i < cfg.stack.num_layers(); ++i) {
        if (i) s += ",";
        s += "{\"medium\":";
        append_medium(s, cfg.stack.layers()[i].medium);
        s += ",\"thickness\":" + fmt17(cfg.stack.layers()[i].thickness) + "}";
    }
    s += "],\"medium_III\":";
    append_medium(s, cfg.stack.medium_III());
    s += "},\"frequency\":";
    append_grid(s, cfg.omegas);
    s += ",\"transverse\":{\"";
    s += (cfg.transverse_kind == TransverseKind::Lambda) ? "lambda" : "angle_deg";
    s += "\":";
    append_grid(s, cfg.transverse);
    s += "},\"polarization\":\"";
    s += (cfg.pol == PolSelect::TE ? "TE" : cfg.pol == PolSelect::TM ? "TM" : "both");
    s += "\",\"n_max\":" + std::to_string(cfg.n_max);
    s += ",\"quadrature\":{\"rel_tol\":" + fmt17(cfg.quad.rel_tol) +
         ",\"abs_tol\":" + fmt17(cfg.quad.abs_tol) +
         ",\"max_subdivisions\":" + std::to_string(cfg.quad.max_subdivisions) +
         ",\"lambda_max\":" + fmt17(cfg.quad.lambda_max) + "}";
    s += ",\"output_format\":\"";
    s += (cfg.format == OutputFormat::CSV ? "csv" : "json");
    s += "\",\"units\":\"";
    s += (cfg.natural_units ? "natural" : "SI");
    s += "\"}";
    return s;
}

std::string normalize_config(const std::string& text) {
    return serialize_config(parse_config(text));
}

} // namespace lmio
