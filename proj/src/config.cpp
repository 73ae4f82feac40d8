#include "nlcl/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

#include "nlcl/errors.hpp"

namespace nlcl {

namespace {

std::string trim(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(trim(cur));
    return out;
}

struct RawConfig {
    // section -> key -> value, remembering which keys were consumed
    std::map<std::string, std::map<std::string, std::string>> sections;
    std::vector<std::string>* errors = nullptr;

    bool has(const std::string& sec, const std::string& key) const {
        auto s = sections.find(sec);
        return s != sections.end() && s->second.count(key) > 0;
    }
    std::optional<std::string> get(const std::string& sec, const std::string& key) const {
        auto s = sections.find(sec);
        if (s == sections.end()) return std::nullopt;
        auto k = s->second.find(key);
        if (k == s->second.end()) return std::nullopt;
        return k->second;
    }

    std::optional<double> get_double(const std::string& sec, const std::string& key) {
        auto v = get(sec, key);
        if (!v) return std::nullopt;
        try {
            size_t pos = 0;
            const double d = std::stod(*v, &pos);
            if (pos != v->size()) throw std::invalid_argument("trailing characters");
            return d;
        } catch (const std::exception&) {
            errors->push_back(sec + "." + key + ": not a number (`" + *v + "`)");
            return std::nullopt;
        }
    }
    std::optional<int> get_int(const std::string& sec, const std::string& key) {
        auto v = get(sec, key);
        if (!v) return std::nullopt;
        try {
            size_t pos = 0;
            const int i = std::stoi(*v, &pos);
            if (pos != v->size()) throw std::invalid_argument("trailing characters");
            return i;
        } catch (const std::exception&) {
            errors->push_back(sec + "." + key + ": not an integer (`" + *v + "`)");
            return std::nullopt;
        }
    }
};

RawConfig parse_raw(const std::string& text, std::vector<std::string>& errors) {
    RawConfig raw;
    raw.errors = &errors;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                errors.push_back("line " + std::to_string(lineno) + ": malformed section header");
                continue;
            }
            section = trim(line.substr(1, line.size() - 2));
            raw.sections[section]; // touch
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            errors.push_back("line " + std::to_string(lineno) + ": expected key = value");
            continue;
        }
        if (section.empty()) {
            errors.push_back("line " + std::to_string(lineno) + ": key outside any [section]");
            continue;
        }
        raw.sections[section][trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return raw;
}

PiecewiseConstant parse_initial(const std::string& spec, const std::string& where,
                                std::vector<std::string>& errors) {
    // indicator:a:b:h  or  piecewise:x0:v0:x1:v1:...:xn  (values on (x_i, x_{i+1}))
    const auto parts = split(spec, ':');
    try {
        if (parts.at(0) == "indicator") {
            if (parts.size() != 4) throw std::invalid_argument("indicator needs a:b:height");
            return PiecewiseConstant::indicator(std::stod(parts[1]), std::stod(parts[2]),
                                                std::stod(parts[3]));
        }
        if (parts.at(0) == "piecewise") {
            if (parts.size() < 4 || parts.size() % 2 != 0)
                throw std::invalid_argument("piecewise needs x0:v0:x1:v1:...:xn");
            std::vector<double> edges, vals;
            for (size_t i = 1; i < parts.size(); ++i) {
                if (i % 2 == 1) edges.push_back(std::stod(parts[i]));
                else vals.push_back(std::stod(parts[i]));
            }
            for (size_t i = 1; i < edges.size(); ++i)
                if (!(edges[i] > edges[i - 1]))
                    throw std::invalid_argument("breakpoints must increase");
            return PiecewiseConstant{std::move(edges), std::move(vals)};
        }
        throw std::invalid_argument("unknown initial-data form `" + parts[0] + "`");
    } catch (const std::exception& e) {
        errors.push_back(where + ": " + e.what());
        return PiecewiseConstant::zero();
    }
}

} // namespace

void load_kernel_table(const std::string& path, std::vector<double>& x,
                       std::vector<double>& y) {
    std::ifstream in(path);
    if (!in) throw ModelError("cannot open kernel table `" + path + "`");
    x.clear();
    y.clear();
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line.front() == '#') continue;
        const auto parts = split(line, ',');
        if (parts.size() != 2)
            throw ModelError("kernel table `" + path + "`: expected two columns");
        x.push_back(std::stod(parts[0]));
        y.push_back(std::stod(parts[1]));
    }
    if (x.size() < 2) throw ModelError("kernel table `" + path + "`: need >= 2 rows");
}

ParseResult parse_config_text(const std::string& text) {
    ParseResult result;
    auto& errors = result.errors;
    RawConfig raw = parse_raw(text, errors);
    RunConfig cfg;

    // --- [model] ---
    const bool has_preset = raw.has("model", "preset");
    const bool has_components = raw.has("model", "components");
    if (!has_preset && !has_components)
        errors.push_back("model.preset: missing (or give model.components with explicit lists)");
    if (has_preset) {
        cfg.preset = *raw.get("model", "preset");
        if (cfg.preset != "keyfitz_kranzer")
            errors.push_back("model.preset: unknown preset `" + cfg.preset + "`");
        if (auto v = raw.get_double("model", "eta")) cfg.shared_kernels.eta = *v;
        if (auto v = raw.get_double("model", "delta")) cfg.delta = *v;
        if (raw.has("model", "eta") && cfg.shared_kernels.eta <= 0.0)
            errors.push_back("model.eta: must be > 0");
        if (raw.has("model", "delta") && cfg.delta <= 0.0)
            errors.push_back("model.delta: must be > 0");
        if (!raw.has("model", "eta")) errors.push_back("model.eta: missing");
        if (!raw.has("model", "delta")) errors.push_back("model.delta: missing");
    } else if (has_components) {
        if (auto v = raw.get_int("model", "components")) cfg.components = *v;
        if (cfg.components < 1) errors.push_back("model.components: must be >= 1");
        const int n = std::max(1, cfg.components);

        if (auto v = raw.get("model", "flux")) {
            cfg.flux_names = split(*v, ',');
        } else {
            errors.push_back("model.flux: missing");
        }
        if (auto v = raw.get("model", "velocity")) {
            cfg.velocity_names = split(*v, ',');
        } else {
            errors.push_back("model.velocity: missing");
        }
        if (cfg.flux_names.size() == 1 && n > 1)
            cfg.flux_names.assign(static_cast<size_t>(n), cfg.flux_names[0]);
        if (cfg.velocity_names.size() == 1 && n > 1)
            cfg.velocity_names.assign(static_cast<size_t>(n), cfg.velocity_names[0]);
        if (!cfg.flux_names.empty() && cfg.flux_names.size() != static_cast<size_t>(n))
            errors.push_back("model.flux: need 1 or `components` entries");
        if (!cfg.velocity_names.empty() && cfg.velocity_names.size() != static_cast<size_t>(n))
            errors.push_back("model.velocity: need 1 or `components` entries");
        for (const auto& f : cfg.flux_names) {
            try {
                (void)ScalarFlux::from_name(f);
            } catch (const std::exception& e) {
                errors.push_back(std::string("model.flux: ") + e.what());
            }
        }
        cfg.velocity_params.assign(static_cast<size_t>(n), 1.0);
        if (auto v = raw.get("model", "velocity_param")) {
            const auto parts = split(*v, ',');
            for (size_t i = 0; i < parts.size() && i < cfg.velocity_params.size(); ++i) {
                try {
                    cfg.velocity_params[i] = std::stod(parts[i]);
                } catch (const std::exception&) {
                    errors.push_back("model.velocity_param: not a number");
                }
            }
        }
        for (const auto& vname : cfg.velocity_names) {
            try {
                (void)VelocityMap::from_name(vname, n == 0 ? 1 : n);
            } catch (const std::exception& e) {
                errors.push_back(std::string("model.velocity: ") + e.what());
            }
        }
        if (auto v = raw.get_double("model", "delta")) cfg.delta = *v;
        else errors.push_back("model.delta: missing");
        if (raw.has("model", "delta") && cfg.delta <= 0.0)
            errors.push_back("model.delta: must be > 0");

        for (int k = 0; k < n; ++k) {
            const std::string key = "initial_" + std::to_string(k + 1);
            if (auto v = raw.get("model", key)) {
                cfg.initial.push_back(parse_initial(*v, "model." + key, errors));
            } else {
                errors.push_back("model." + key + ": missing");
            }
        }
    }

    // shared kernel configuration
    if (auto v = raw.get("model", "spatial_kernel")) cfg.shared_kernels.spatial_kind = *v;
    if (auto v = raw.get_double("model", "eta")) cfg.shared_kernels.eta = *v;
    if (auto v = raw.get("model", "spatial_table")) cfg.shared_kernels.spatial_table = *v;
    if (auto v = raw.get("model", "temporal_kernel")) cfg.shared_kernels.temporal_kind = *v;
    if (auto v = raw.get("model", "temporal_table")) cfg.shared_kernels.temporal_table = *v;
    if (cfg.shared_kernels.spatial_kind != "poly_bump" &&
        cfg.shared_kernels.spatial_kind != "tabulated")
        errors.push_back("model.spatial_kernel: unknown family `" + cfg.shared_kernels.spatial_kind + "`");
    if (cfg.shared_kernels.temporal_kind != "poly_decay" &&
        cfg.shared_kernels.temporal_kind != "tabulated")
        errors.push_back("model.temporal_kernel: unknown family `" + cfg.shared_kernels.temporal_kind + "`");
    if (cfg.shared_kernels.spatial_kind == "tabulated" && cfg.shared_kernels.spatial_table.empty())
        errors.push_back("model.spatial_table: required for tabulated spatial kernels");
    if (cfg.shared_kernels.temporal_kind == "tabulated" && cfg.shared_kernels.temporal_table.empty())
        errors.push_back("model.temporal_table: required for tabulated temporal kernels");

    // per-entry kernel overrides: spatial_kernel_j_k / eta_j_k / ... (1-based)
    if (raw.sections.count("model")) {
        const int n = has_preset ? 2 : std::max(1, cfg.components);
        for (int j = 1; j <= n; ++j) {
            for (int k = 1; k <= n; ++k) {
                const std::string suffix = "_" + std::to_string(j) + "_" + std::to_string(k);
                KernelEntryConfig entry = cfg.shared_kernels;
                bool any = false;
                if (auto v = raw.get("model", "spatial_kernel" + suffix)) {
                    entry.spatial_kind = *v;
                    any = true;
                }
                if (auto v = raw.get_double("model", "eta" + suffix)) {
                    entry.eta = *v;
                    any = true;
                }
                if (auto v = raw.get("model", "spatial_table" + suffix)) {
                    entry.spatial_table = *v;
                    any = true;
                }
                if (auto v = raw.get("model", "temporal_kernel" + suffix)) {
                    entry.temporal_kind = *v;
                    any = true;
                }
                if (auto v = raw.get("model", "temporal_table" + suffix)) {
                    entry.temporal_table = *v;
                    any = true;
                }
                if (any) cfg.kernel_overrides[{j - 1, k - 1}] = entry;
            }
        }
    }

    // --- [grid] ---
    for (const char* key : {"x_min", "x_max", "dx", "T"}) {
        if (!raw.has("grid", key)) errors.push_back(std::string("grid.") + key + ": missing");
    }
    if (auto v = raw.get_double("grid", "x_min")) cfg.x_min = *v;
    if (auto v = raw.get_double("grid", "x_max")) cfg.x_max = *v;
    if (auto v = raw.get_double("grid", "dx")) cfg.dx = *v;
    if (auto v = raw.get_double("grid", "T")) cfg.T = *v;
    if (raw.has("grid", "dx") && cfg.dx <= 0.0) errors.push_back("grid.dx: must be > 0");
    if (raw.has("grid", "T") && cfg.T < 0.0) errors.push_back("grid.T: must be >= 0");
    if (raw.has("grid", "x_min") && raw.has("grid", "x_max") && !(cfg.x_max > cfg.x_min))
        errors.push_back("grid.x_max: must exceed grid.x_min");

    // --- [scheme] ---
    if (!raw.has("scheme", "beta")) errors.push_back("scheme.beta: missing");
    if (auto v = raw.get_double("scheme", "beta")) cfg.beta = *v;
    if (raw.has("scheme", "beta") && !(cfg.beta > 0.0 && cfg.beta < 2.0 / 3.0))
        errors.push_back("scheme.beta: must lie in (0, 2/3)");
    if (auto v = raw.get_double("scheme", "lambda")) {
        cfg.lambda = *v;
        if (*v <= 0.0) errors.push_back("scheme.lambda: must be > 0");
    }
    if (auto v = raw.get("scheme", "record_times")) {
        for (const auto& part : split(*v, ',')) {
            if (part.empty()) continue;
            try {
                cfg.record_times.push_back(std::stod(part));
            } catch (const std::exception&) {
                errors.push_back("scheme.record_times: not a number (`" + part + "`)");
            }
        }
    }

    // --- [study] (optional) ---
    if (raw.sections.count("study")) {
        if (auto v = raw.get("study", "kind")) cfg.study_kind = *v;
        else errors.push_back("study.kind: missing");
        if (!cfg.study_kind.empty() && cfg.study_kind != "delta" && cfg.study_kind != "mesh")
            errors.push_back("study.kind: must be `delta` or `mesh`");
        if (auto v = raw.get_int("study", "halvings")) cfg.halvings = *v;
        else errors.push_back("study.halvings: missing");
        if (raw.has("study", "halvings") && cfg.halvings < 1)
            errors.push_back("study.halvings: must be >= 1");
        if (cfg.study_kind == "delta") {
            if (auto v = raw.get_double("study", "delta0")) cfg.delta0 = *v;
            else errors.push_back("study.delta0: missing");
            if (raw.has("study", "delta0") && cfg.delta0 <= 0.0)
                errors.push_back("study.delta0: must be > 0");
        } else if (cfg.study_kind == "mesh") {
            if (auto v = raw.get_double("study", "dx0")) cfg.dx0 = *v;
            else errors.push_back("study.dx0: missing");
            if (auto v = raw.get_double("study", "ratio")) cfg.ratio = *v;
            else errors.push_back("study.ratio: missing");
            if (auto v = raw.get_double("study", "dx_fine")) cfg.dx_fine = *v;
            else errors.push_back("study.dx_fine: missing");
            if (raw.has("study", "dx0") && cfg.dx0 <= 0.0)
                errors.push_back("study.dx0: must be > 0");
            if (raw.has("study", "ratio") && cfg.ratio <= 0.0)
                errors.push_back("study.ratio: must be > 0");
            if (raw.has("study", "dx_fine") && cfg.dx_fine <= 0.0)
                errors.push_back("study.dx_fine: must be > 0");
        }
    }

    // --- [output] ---
    if (auto v = raw.get("output", "directory")) cfg.out_dir = *v;
    if (auto v = raw.get_int("output", "precision")) cfg.precision = *v;
    if (cfg.precision < 1 || cfg.precision > 17)
        errors.push_back("output.precision: must lie in [1, 17]");

    if (errors.empty()) result.config = std::move(cfg);
    return result;
}

ParseResult parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        ParseResult r;
        r.errors.push_back("cannot open config file `" + path + "`");
        return r;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

std::string emit_canonical_config(const RunConfig& cfg) {
    std::ostringstream out;
    out.precision(17);
    out << "[model]\n";
    if (!cfg.preset.empty()) {
        out << "preset = " << cfg.preset << "\n";
        out << "eta = " << cfg.shared_kernels.eta << "\n";
        out << "delta = " << cfg.delta << "\n";
    } else {
        out << "components = " << cfg.components << "\n";
        out << "flux = ";
        for (size_t i = 0; i < cfg.flux_names.size(); ++i)
            out << (i ? ", " : "") << cfg.flux_names[i];
        out << "\nvelocity = ";
        for (size_t i = 0; i < cfg.velocity_names.size(); ++i)
            out << (i ? ", " : "") << cfg.velocity_names[i];
        out << "\nvelocity_param = ";
        for (size_t i = 0; i < cfg.velocity_params.size(); ++i)
            out << (i ? ", " : "") << cfg.velocity_params[i];
        out << "\n";
        out << "spatial_kernel = " << cfg.shared_kernels.spatial_kind << "\n";
        out << "eta = " << cfg.shared_kernels.eta << "\n";
        if (!cfg.shared_kernels.spatial_table.empty())
            out << "spatial_table = " << cfg.shared_kernels.spatial_table << "\n";
        out << "temporal_kernel = " << cfg.shared_kernels.temporal_kind << "\n";
        if (!cfg.shared_kernels.temporal_table.empty())
            out << "temporal_table = " << cfg.shared_kernels.temporal_table << "\n";
        out << "delta = " << cfg.delta << "\n";
        for (size_t k = 0; k < cfg.initial.size(); ++k) {
            const auto& pc = cfg.initial[k];
            out << "initial_" << (k + 1) << " = piecewise";
            for (size_t i = 0; i < pc.vals.size(); ++i)
                out << ":" << pc.edges[i] << ":" << pc.vals[i];
            out << ":" << pc.edges.back() << "\n";
        }
    }
    out << "\n[grid]\n";
    out << "x_min = " << cfg.x_min << "\nx_max = " << cfg.x_max << "\ndx = " << cfg.dx
        << "\nT = " << cfg.T << "\n";
    out << "\n[scheme]\n";
    out << "beta = " << cfg.beta << "\n";
    if (cfg.lambda) out << "lambda = " << *cfg.lambda << "\n";
    if (!cfg.record_times.empty()) {
        out << "record_times = ";
        for (size_t i = 0; i < cfg.record_times.size(); ++i)
            out << (i ? ", " : "") << cfg.record_times[i];
        out << "\n";
    }
    if (!cfg.study_kind.empty()) {
        out << "\n[study]\n";
        out << "kind = " << cfg.study_kind << "\n";
        out << "halvings = " << cfg.halvings << "\n";
        if (cfg.study_kind == "delta") out << "delta0 = " << cfg.delta0 << "\n";
        if (cfg.study_kind == "mesh")
            out << "dx0 = " << cfg.dx0 << "\nratio = " << cfg.ratio
                << "\ndx_fine = " << cfg.dx_fine << "\n";
    }
    out << "\n[output]\n";
    out << "directory = " << cfg.out_dir << "\n";
    out << "precision = " << cfg.precision << "\n";
    return out.str();
}

ModelSpec build_model(const RunConfig& cfg, std::optional<double> delta_override,
                      std::optional<double> eta_scale) {
    const double delta = delta_override.value_or(cfg.delta);
    if (!cfg.preset.empty()) {
        double eta = cfg.shared_kernels.eta;
        if (eta_scale) eta *= *eta_scale;
        return keyfitz_kranzer_preset(eta, delta);
    }

    ModelSpec m;
    m.n = cfg.components;
    for (const auto& f : cfg.flux_names) m.flux.push_back(ScalarFlux::from_name(f));
    for (size_t k = 0; k < cfg.velocity_names.size(); ++k)
        m.velocity.push_back(VelocityMap::from_name(cfg.velocity_names[k], m.n,
                                                    cfg.velocity_params[k]));
    m.initial = cfg.initial;

    auto build_spatial = [&](const KernelEntryConfig& e) {
        if (e.spatial_kind == "poly_bump")
            return std::make_shared<const SpatialKernel>(SpatialKernel::poly_bump(e.eta));
        std::vector<double> x, y;
        load_kernel_table(e.spatial_table, x, y);
        return std::make_shared<const SpatialKernel>(SpatialKernel::tabulated(x, y));
    };
    auto build_temporal = [&](const KernelEntryConfig& e) {
        if (e.temporal_kind == "poly_decay")
            return std::make_shared<const ScaledTemporalKernel>(TemporalKernel::poly_decay(),
                                                                delta);
        std::vector<double> x, y;
        load_kernel_table(e.temporal_table, x, y);
        return std::make_shared<const ScaledTemporalKernel>(TemporalKernel::tabulated(x, y),
                                                            delta);
    };

    m.kernels.n = m.n;
    m.kernels.spatial.resize(static_cast<size_t>(m.n) * m.n);
    m.kernels.temporal.resize(static_cast<size_t>(m.n) * m.n);
    const auto shared_mu = build_spatial(cfg.shared_kernels);
    const auto shared_gamma = build_temporal(cfg.shared_kernels);
    for (int j = 0; j < m.n; ++j) {
        for (int k = 0; k < m.n; ++k) {
            const auto it = cfg.kernel_overrides.find({j, k});
            if (it == cfg.kernel_overrides.end()) {
                m.kernels.spatial[static_cast<size_t>(j) * m.n + k] = shared_mu;
                m.kernels.temporal[static_cast<size_t>(j) * m.n + k] = shared_gamma;
            } else {
                m.kernels.spatial[static_cast<size_t>(j) * m.n + k] = build_spatial(it->second);
                m.kernels.temporal[static_cast<size_t>(j) * m.n + k] = build_temporal(it->second);
            }
        }
    }

    const auto report = validate_model(m);
    if (!report.ok()) {
        std::string msg = "model validation failed:";
        for (const auto& i : report.issues)
            if (i.blocking) msg += "\n  (" + i.hypothesis + ") " + i.message;
        throw ModelError(msg);
    }
    m.lip_f = report.lip_f;
    m.nu_sup = report.nu_sup;
    m.grad_nu_sup = report.grad_nu_sup;
    m.grad_nu_lip = report.grad_nu_lip;
    for (const auto& i : report.issues)
        if (!i.blocking) m.h1_warning = true;
    return m;
}

} // namespace nlcl
