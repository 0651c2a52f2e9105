#include "cga/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "cga/errors.hpp"

namespace cga {

namespace {

std::string trim(const std::string& s) {
    auto begin = s.find_first_not_of(" \t\r");
    auto end = s.find_last_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    return s.substr(begin, end - begin + 1);
}

struct Section {
    std::string name;
    int line = 0;
    std::map<std::string, std::string> values;
    std::set<std::string> consumed;
};

std::vector<Section> read_sections(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::vector<Section> sections;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                                  ": malformed section header '" + line + "'");
            }
            sections.push_back({trim(line.substr(1, line.size() - 2)), lineno, {}, {}});
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                              ": expected 'key = value', got '" + line + "'");
        }
        if (sections.empty()) {
            throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                              ": key outside any [section]");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!sections.back().values.emplace(key, value).second) {
            throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": duplicate key '" +
                              key + "' in [" + sections.back().name + "]");
        }
    }
    return sections;
}

class SectionReader {
public:
    SectionReader(Section& section, std::string file) : s_(section), file_(std::move(file)) {}

    bool has(const std::string& key) const { return s_.values.count(key) > 0; }

    std::string get_string(const std::string& key, const std::string& fallback) {
        auto it = s_.values.find(key);
        if (it == s_.values.end()) return fallback;
        s_.consumed.insert(key);
        return it->second;
    }

    double get_double(const std::string& key, double fallback) {
        auto it = s_.values.find(key);
        if (it == s_.values.end()) return fallback;
        s_.consumed.insert(key);
        try {
            std::size_t used = 0;
            const double v = std::stod(it->second, &used);
            if (used != it->second.size()) throw std::invalid_argument("");
            return v;
        } catch (const std::exception&) {
            fail(key, "a real number", it->second);
        }
        return 0.0;
    }

    int get_int(const std::string& key, int fallback) {
        auto it = s_.values.find(key);
        if (it == s_.values.end()) return fallback;
        s_.consumed.insert(key);
        try {
            std::size_t used = 0;
            const long v = std::stol(it->second, &used);
            if (used != it->second.size()) throw std::invalid_argument("");
            return static_cast<int>(v);
        } catch (const std::exception&) {
            fail(key, "an integer", it->second);
        }
        return 0;
    }

    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) {
        auto it = s_.values.find(key);
        if (it == s_.values.end()) return fallback;
        s_.consumed.insert(key);
        try {
            std::size_t used = 0;
            const std::uint64_t v = std::stoull(it->second, &used);
            if (used != it->second.size()) throw std::invalid_argument("");
            return v;
        } catch (const std::exception&) {
            fail(key, "a non-negative integer", it->second);
        }
        return 0;
    }

    bool get_bool(const std::string& key, bool fallback) {
        auto it = s_.values.find(key);
        if (it == s_.values.end()) return fallback;
        s_.consumed.insert(key);
        if (it->second == "true" || it->second == "1") return true;
        if (it->second == "false" || it->second == "0") return false;
        fail(key, "true or false", it->second);
        return false;
    }

    RegionSpec get_region(const std::string& key) {
        auto it = s_.values.find(key);
        if (it == s_.values.end()) fail(key, "4 numbers 'xmin xmax ymin ymax'", "<missing>");
        s_.consumed.insert(key);
        std::istringstream in(it->second);
        RegionSpec r;
        std::string extra;
        if (!(in >> r.xmin >> r.xmax >> r.ymin >> r.ymax) || (in >> extra)) {
            fail(key, "4 numbers 'xmin xmax ymin ymax'", it->second);
        }
        return r;
    }

    [[noreturn]] void fail(const std::string& key, const std::string& expected,
                           const std::string& got) const {
        throw ConfigError(file_ + ": [" + s_.name + "] key '" + key + "' expects " + expected +
                          ", got '" + got + "'");
    }

    void reject_unknown() const {
        for (const auto& [key, value] : s_.values) {
            if (!s_.consumed.count(key)) {
                throw ConfigError(file_ + ": unknown key '" + key + "' in section [" + s_.name +
                                  "] (line " + std::to_string(s_.line) + ")");
            }
        }
    }

private:
    Section& s_;
    std::string file_;
};

}  // namespace

ProblemConfig parse_config(const std::filesystem::path& path) {
    std::vector<Section> sections = read_sections(path);
    const std::string file = path.string();

    bool saw_material = false;
    bool saw_bc = false;
    ProblemConfig cfg;
    for (auto& section : sections) {
        SectionReader r(section, file);
        if (section.name == "grid") {
            cfg.nx = r.get_int("nx", cfg.nx);
            cfg.ny = r.get_int("ny", cfg.ny);
            cfg.lx = r.get_double("lx", cfg.lx);
            cfg.ly = r.get_double("ly", cfg.ly);
            if (cfg.nx < 1 || cfg.ny < 1) r.fail("nx/ny", "integers >= 1", "smaller value");
            if (!(cfg.lx > 0) || !(cfg.ly > 0)) r.fail("lx/ly", "positive lengths", "non-positive");
        } else if (section.name == "material") {
            saw_material = true;
            const std::string type = r.get_string("type", "");
            if (type == "linear") {
                cfg.material = MaterialKind::LinearSingle;
            } else if (type == "rbf") {
                cfg.material = MaterialKind::Rbf;
            } else {
                r.fail("type", "'linear' or 'rbf'", type.empty() ? "<missing>" : type);
            }
            cfg.E0 = r.get_double("E0", cfg.E0);
            cfg.lambda0 = r.get_double("lambda0", cfg.lambda0);
            cfg.kappa0 = r.get_double("kappa0", cfg.kappa0);
            cfg.alpha0 = r.get_double("alpha0", cfg.alpha0);
            const std::string dataset = r.get_string("dataset", "");
            if (!dataset.empty()) {
                std::filesystem::path p(dataset);
                cfg.dataset = p.is_absolute() ? p : path.parent_path() / p;
            }
            cfg.rbf_epsilon = r.get_double("epsilon", cfg.rbf_epsilon);
            if (cfg.material == MaterialKind::Rbf && cfg.dataset.empty()) {
                r.fail("dataset", "a path to the anchor table", "<missing>");
            }
        } else if (section.name == "network") {
            cfg.n_layers = r.get_int("layers", cfg.n_layers);
            cfg.width = r.get_int("width", cfg.width);
            cfg.bandwidth_x = r.get_double("bandwidth_x", cfg.bandwidth_x);
            cfg.bandwidth_y = r.get_double("bandwidth_y", cfg.bandwidth_y);
            cfg.seed = r.get_u64("seed", cfg.seed);
            if (r.has("components")) cfg.components = r.get_int("components", 0);
            if (cfg.n_layers < 1) r.fail("layers", "an integer >= 1", std::to_string(cfg.n_layers));
            if (cfg.width < 1) r.fail("width", "an integer >= 1", std::to_string(cfg.width));
            if (cfg.bandwidth_x < 0 || cfg.bandwidth_y < 0) {
                r.fail("bandwidth_x/bandwidth_y", "values >= 0", "negative");
            }
        } else if (section.name == "constraints") {
            cfg.mass_budget = r.get_double("mass_budget", cfg.mass_budget);
            cfg.lse_t = r.get_double("lse_t", cfg.lse_t);
            cfg.tau0 = r.get_double("tau0", cfg.tau0);
            cfg.tau_growth = r.get_double("tau_growth", cfg.tau_growth);
            if (!(cfg.mass_budget > 0)) r.fail("mass_budget", "a positive value", "non-positive");
            if (!(cfg.lse_t > 0)) r.fail("lse_t", "a positive value", "non-positive");
            if (!(cfg.tau0 > 0)) r.fail("tau0", "a positive value", "non-positive");
            if (!(cfg.tau_growth > 1.0)) r.fail("tau_growth", "a value > 1", "smaller value");
        } else if (section.name == "physics") {
            cfg.nu = r.get_double("nu", cfg.nu);
            cfg.t_ref = r.get_double("t_ref", cfg.t_ref);
            cfg.body_heat = r.get_double("body_heat", cfg.body_heat);
            cfg.body_fx = r.get_double("body_fx", cfg.body_fx);
            cfg.body_fy = r.get_double("body_fy", cfg.body_fy);
            cfg.floor_scale = r.get_double("floor_scale", cfg.floor_scale);
            const std::string solver = r.get_string("solver", "direct");
            if (solver == "direct") {
                cfg.solver = LinearSolverKind::Direct;
            } else if (solver == "cg") {
                cfg.solver = LinearSolverKind::ConjugateGradient;
            } else {
                r.fail("solver", "'direct' or 'cg'", solver);
            }
            if (!(cfg.nu > -1.0 && cfg.nu < 0.5)) r.fail("nu", "a value in (-1, 0.5)", "out of range");
        } else if (section.name == "run") {
            cfg.learning_rate = r.get_double("learning_rate", cfg.learning_rate);
            cfg.clip_norm = r.get_double("clip_norm", cfg.clip_norm);
            cfg.max_iter = r.get_int("max_iter", cfg.max_iter);
            cfg.loss_tol = r.get_double("loss_tol", cfg.loss_tol);
            const std::string mode = r.get_string("mode", "neural");
            if (mode == "neural") {
                cfg.mode = RunMode::Neural;
            } else if (mode == "baseline") {
                cfg.mode = RunMode::Baseline;
            } else {
                r.fail("mode", "'neural' or 'baseline'", mode);
            }
            cfg.deterministic = r.get_bool("deterministic", cfg.deterministic);
            const std::string out = r.get_string("out_dir", "");
            if (!out.empty()) cfg.out_dir = out;
            if (cfg.max_iter < 0) r.fail("max_iter", "an integer >= 0", std::to_string(cfg.max_iter));
            if (!(cfg.loss_tol > 0)) r.fail("loss_tol", "a positive value", "non-positive");
            if (!(cfg.clip_norm > 0)) r.fail("clip_norm", "a positive value", "non-positive");
        } else if (section.name == "bc") {
            saw_bc = true;
            BcSpec bc;
            const std::string kind = r.get_string("kind", "");
            bc.region = r.get_region("region");
            if (kind == "fixed") {
                bc.kind = BcKind::Fixed;
                const std::string axes = r.get_string("axes", "xy");
                if (axes != "x" && axes != "y" && axes != "xy") {
                    r.fail("axes", "'x', 'y' or 'xy'", axes);
                }
                bc.fix_x = axes.find('x') != std::string::npos;
                bc.fix_y = axes.find('y') != std::string::npos;
                bc.value = r.get_double("value", 0.0);
            } else if (kind == "load") {
                bc.kind = BcKind::Load;
                bc.fx = r.get_double("fx", 0.0);
                bc.fy = r.get_double("fy", 0.0);
            } else if (kind == "temperature") {
                bc.kind = BcKind::Temperature;
                bc.value = r.get_double("value", 0.0);
            } else if (kind == "flux") {
                bc.kind = BcKind::Flux;
                bc.value = r.get_double("q", 0.0);
            } else {
                r.fail("kind", "'fixed', 'load', 'temperature' or 'flux'",
                       kind.empty() ? "<missing>" : kind);
            }
            cfg.bcs.push_back(bc);
        } else {
            throw ConfigError(file + ": unknown section [" + section.name + "] (line " +
                              std::to_string(section.line) + ")");
        }
        r.reject_unknown();
    }

    std::vector<std::string> missing;
    if (!saw_material) missing.push_back("[material] with type = linear|rbf");
    if (!saw_bc) missing.push_back("at least one [bc] block");
    if (!missing.empty()) {
        std::string msg = file + ": missing required configuration:";
        for (const auto& m : missing) msg += "\n  - " + m;
        throw ConfigError(msg);
    }
    if (cfg.material == MaterialKind::LinearSingle && cfg.components && *cfg.components != 1) {
        throw ConfigError(file + ": [network] components must be 1 for the linear material");
    }
    return cfg;
}

Grid2D make_grid(const ProblemConfig& cfg) { return build_grid(cfg.nx, cfg.ny, cfg.lx, cfg.ly); }

BoundaryConditions make_bcs(const ProblemConfig& cfg, const Grid2D& grid) {
    BoundaryConditions bcs;
    bcs.body_heat = cfg.body_heat;
    bcs.body_force = Eigen::Vector2d(cfg.body_fx, cfg.body_fy);
    for (const auto& spec : cfg.bcs) {
        const std::vector<int> nodes = select_nodes(grid, spec.region);
        switch (spec.kind) {
            case BcKind::Fixed:
                bcs.fixed_disp.push_back(
                    {nodes, spec.fix_x, spec.fix_y, spec.value, spec.value});
                break;
            case BcKind::Load:
                bcs.loads.push_back({nodes, spec.fx, spec.fy});
                break;
            case BcKind::Temperature:
                bcs.fixed_temp.push_back({nodes, spec.value});
                break;
            case BcKind::Flux:
                bcs.heat_loads.push_back({nodes, spec.value});
                break;
        }
    }
    validate_bcs(grid, bcs);
    return bcs;
}

std::unique_ptr<MaterialModel> make_material(const ProblemConfig& cfg) {
    if (cfg.material == MaterialKind::LinearSingle) {
        return std::make_unique<LinearSingleMaterial>(cfg.E0, cfg.lambda0, cfg.kappa0, cfg.alpha0);
    }
    const auto anchors = load_anchor_table(cfg.dataset);
    auto material = std::make_unique<RbfMaterial>(fit_rbf(anchors, cfg.rbf_epsilon));
    if (cfg.components && *cfg.components != material->components()) {
        throw ConfigError("config components = " + std::to_string(*cfg.components) +
                          " does not match dataset components = " +
                          std::to_string(material->components()));
    }
    return material;
}

ThermoElasticProblem make_problem(const ProblemConfig& cfg) {
    ThermoElasticProblem problem;
    problem.grid = make_grid(cfg);
    problem.bcs = make_bcs(cfg, problem.grid);
    problem.nu = cfg.nu;
    problem.t_ref = cfg.t_ref;
    problem.mass_budget = cfg.mass_budget;
    problem.floor_scale = cfg.floor_scale;
    problem.solver = cfg.solver;
    return problem;
}

MfnConfig make_net_config(const ProblemConfig& cfg, int components) {
    MfnConfig net;
    net.n_layers = cfg.n_layers;
    net.width = cfg.width;
    net.outputs = components;
    net.bandwidth_x = cfg.bandwidth_x;
    net.bandwidth_y = cfg.bandwidth_y;
    net.seed = cfg.seed;
    return net;
}

RunConfig make_run_config(const ProblemConfig& cfg) {
    RunConfig run;
    run.max_iter = cfg.max_iter;
    run.loss_tol = cfg.loss_tol;
    run.clip_norm = cfg.clip_norm;
    run.learning_rate = cfg.learning_rate;
    run.tau0 = cfg.tau0;
    run.tau_growth = cfg.tau_growth;
    run.lse_t = cfg.lse_t;
    run.deterministic = cfg.deterministic;
    return run;
}

}  // namespace cga
