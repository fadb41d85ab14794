#include "relnewt/config.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

#include "relnewt/errors.hpp"

namespace relnewt {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& what) { throw ConfigError("config: " + what); }

void check_keys(const json& obj, const char* where,
                std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) {
                known = true;
                break;
            }
        if (!known)
            bad(std::string(where) + " has unrecognized key '" + it.key() + "'");
    }
}

double num(const json& v, const std::string& name) {
    if (!v.is_number()) bad(name + " must be a number");
    return v.get<double>();
}

int whole(const json& v, const std::string& name) {
    if (!v.is_number_integer()) bad(name + " must be an integer");
    return v.get<int>();
}

Vec vec_of(const json& v, int dim, const std::string& name) {
    if (!v.is_array() || static_cast<int>(v.size()) != dim)
        bad(name + " must be an array of " + std::to_string(dim) + " numbers");
    Vec out = Vec::zero(dim);
    for (int i = 0; i < dim; ++i) out[i] = num(v[static_cast<std::size_t>(i)], name);
    return out;
}

std::vector<Bump> bumps_of(const json& v, int dim, const std::string& name) {
    if (!v.is_array()) bad(name + " must be an array of bump objects");
    std::vector<Bump> out;
    out.reserve(v.size());
    for (const json& b : v) {
        if (!b.is_object()) bad(name + " entries must be objects");
        check_keys(b, name.c_str(), {"center", "amplitude", "radius"});
        for (const char* k : {"center", "amplitude", "radius"})
            if (!b.contains(k)) bad(name + " entry is missing '" + k + "'");
        Bump bump;
        bump.center = vec_of(b.at("center"), dim, name + ".center");
        bump.amplitude = num(b.at("amplitude"), name + ".amplitude");
        bump.radius = num(b.at("radius"), name + ".radius");
        out.push_back(bump);
    }
    return out;
}

ConvexDomain domain_of(const json& v, int dim) {
    if (!v.is_object()) bad("domain must be an object");
    check_keys(v, "domain", {"kind", "center", "radius", "radii"});
    if (!v.contains("kind") || !v.at("kind").is_string())
        bad("domain needs a string 'kind'");
    std::string kind = v.at("kind").get<std::string>();
    Vec center = v.contains("center") ? vec_of(v.at("center"), dim, "domain.center")
                                      : Vec::zero(dim);
    if (kind == "disk") {
        if (v.contains("radii")) bad("a disk takes 'radius', not 'radii'");
        double radius = v.contains("radius") ? num(v.at("radius"), "domain.radius") : 1.0;
        return ConvexDomain::disk(dim, center, radius);
    }
    if (kind == "ellipse") {
        if (v.contains("radius")) bad("an ellipse takes 'radii', not 'radius'");
        if (!v.contains("radii")) bad("an ellipse needs 'radii'");
        Vec radii = vec_of(v.at("radii"), dim, "domain.radii");
        return ConvexDomain(ConvexDomain::Kind::ellipse, dim, center, radii);
    }
    bad("domain kind '" + kind + "' is not one of disk, ellipse");
}

void fill_ode(const json& v, OdeOptions& ode) {
    if (!v.is_object()) bad("ode must be an object");
    check_keys(v, "ode", {"rel_tol", "abs_tol", "initial_step", "max_step", "max_steps"});
    if (v.contains("rel_tol")) ode.rel_tol = num(v.at("rel_tol"), "ode.rel_tol");
    if (v.contains("abs_tol")) ode.abs_tol = num(v.at("abs_tol"), "ode.abs_tol");
    if (v.contains("initial_step"))
        ode.initial_step = num(v.at("initial_step"), "ode.initial_step");
    if (v.contains("max_step")) ode.max_step = num(v.at("max_step"), "ode.max_step");
    if (v.contains("max_steps")) ode.max_steps = whole(v.at("max_steps"), "ode.max_steps");
}

void fill_shoot(const json& v, ShootOptions& shoot) {
    if (!v.is_object()) bad("shooting must be an object");
    check_keys(v, "shooting", {"residual_tol", "fd_step", "max_iter"});
    if (v.contains("residual_tol"))
        shoot.residual_tol = num(v.at("residual_tol"), "shooting.residual_tol");
    if (v.contains("fd_step")) shoot.fd_step = num(v.at("fd_step"), "shooting.fd_step");
    if (v.contains("max_iter"))
        shoot.max_iter = whole(v.at("max_iter"), "shooting.max_iter");
}

void fill_grid(const json& v, GridSpec& grid) {
    if (!v.is_object()) bad("grid must be an object");
    check_keys(v, "grid",
               {"n_theta", "delta", "n_zeta", "n_x", "quad_angular", "quad_radial"});
    if (v.contains("n_theta")) grid.n_theta = whole(v.at("n_theta"), "grid.n_theta");
    if (v.contains("delta")) grid.delta = num(v.at("delta"), "grid.delta");
    if (v.contains("n_zeta")) grid.n_zeta = whole(v.at("n_zeta"), "grid.n_zeta");
    if (v.contains("n_x")) grid.n_x = whole(v.at("n_x"), "grid.n_x");
    if (v.contains("quad_angular"))
        grid.quad_angular = whole(v.at("quad_angular"), "grid.quad_angular");
    if (v.contains("quad_radial"))
        grid.quad_radial = whole(v.at("quad_radial"), "grid.quad_radial");
}

} // namespace

PotentialModel ExperimentConfig::pair_model() const {
    if (!potential_pair)
        throw ConfigError("config: this command needs a 'potential_pair' entry");
    return PotentialModel(dimension, *potential_pair);
}

void ExperimentConfig::require_support_inside() const {
    if (!support_inside(model(), domain, 0.0) ||
        (potential_pair && !support_inside(pair_model(), domain, 0.0)))
        throw ConfigError("config: bump supports must stay strictly inside the domain");
}

ExperimentConfig parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) bad("the top level must be an object");
    check_keys(root, "the top level",
               {"dimension", "light_speed", "energy", "domain", "potential",
                "potential_pair", "ode", "shooting", "grid", "seed", "threads", "output"});
    for (const char* k : {"dimension", "energy", "domain", "potential"})
        if (!root.contains(k)) bad(std::string("missing required key '") + k + "'");

    ExperimentConfig cfg;
    cfg.dimension = whole(root.at("dimension"), "dimension");
    if (cfg.dimension != 2 && cfg.dimension != 3) bad("dimension must be 2 or 3");
    if (root.contains("light_speed")) {
        cfg.light_speed = num(root.at("light_speed"), "light_speed");
        if (!(cfg.light_speed > 0.0)) bad("light_speed must be positive");
    }
    cfg.energy = num(root.at("energy"), "energy");
    cfg.domain = domain_of(root.at("domain"), cfg.dimension);
    cfg.potential = bumps_of(root.at("potential"), cfg.dimension, "potential");
    if (root.contains("potential_pair"))
        cfg.potential_pair =
            bumps_of(root.at("potential_pair"), cfg.dimension, "potential_pair");
    if (root.contains("ode")) fill_ode(root.at("ode"), cfg.ode);
    if (root.contains("shooting")) fill_shoot(root.at("shooting"), cfg.shoot);
    cfg.shoot.ode = cfg.ode;
    if (root.contains("grid")) fill_grid(root.at("grid"), cfg.grid);
    if (root.contains("seed")) {
        int s = whole(root.at("seed"), "seed");
        if (s < 0) bad("seed must be nonnegative");
        cfg.seed = static_cast<unsigned>(s);
    }
    if (root.contains("threads")) {
        cfg.threads = whole(root.at("threads"), "threads");
        if (cfg.threads < 0) bad("threads must be nonnegative");
    }
    if (root.contains("output")) {
        if (!root.at("output").is_string()) bad("output must be a string");
        cfg.output = root.at("output").get<std::string>();
    }

    // model construction validates bump shapes, then the energy must clear
    // the shell over the whole potential
    try {
        PotentialModel m = cfg.model();
        require_admissible(cfg.context(), m);
        if (cfg.potential_pair) require_admissible(cfg.context(), cfg.pair_model());
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path + " for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_config(buf.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

} // namespace relnewt
