#include "c2fmc/config.hpp"

#include <fstream>
#include <sstream>

namespace c2f {

namespace {

std::string trim(const std::string &s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string join(const std::vector<double> &v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += format_double(v[i]);
    }
    return out;
}

}  // namespace

std::string format_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

KeyValues KeyValues::parse(std::istream &in, const std::string &origin) {
    KeyValues kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        const std::string where = origin + ":" + std::to_string(lineno);
        if (eq == std::string::npos) throw std::runtime_error(where + ": expected key=value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw std::runtime_error(where + ": empty key");
        if (kv.values_.count(key)) throw std::runtime_error(where + ": duplicate key '" + key + "'");
        kv.values_[key] = value;
    }
    return kv;
}

KeyValues KeyValues::load(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path.string());
    return parse(in, path.string());
}

const std::string *KeyValues::lookup(const std::string &key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return nullptr;
    used_.insert(key);
    return &it->second;
}

std::string KeyValues::get_string(const std::string &key, const std::string &fallback) const {
    const auto *v = lookup(key);
    return v ? *v : fallback;
}

double KeyValues::get_double(const std::string &key, double fallback) const {
    const auto *v = lookup(key);
    if (!v) return fallback;
    try {
        std::size_t used = 0;
        const double d = std::stod(*v, &used);
        if (used == v->size()) return d;
    } catch (const std::exception &) {
    }
    throw std::runtime_error("config key '" + key + "': not a number: '" + *v + "'");
}

long KeyValues::get_int(const std::string &key, long fallback) const {
    const auto *v = lookup(key);
    if (!v) return fallback;
    try {
        std::size_t used = 0;
        const long d = std::stol(*v, &used);
        if (used == v->size()) return d;
    } catch (const std::exception &) {
    }
    throw std::runtime_error("config key '" + key + "': not an integer: '" + *v + "'");
}

bool KeyValues::get_bool(const std::string &key, bool fallback) const {
    const auto *v = lookup(key);
    if (!v) return fallback;
    if (*v == "1" || *v == "true" || *v == "yes") return true;
    if (*v == "0" || *v == "false" || *v == "no") return false;
    throw std::runtime_error("config key '" + key + "': not a boolean: '" + *v + "'");
}

std::vector<double> KeyValues::get_doubles(const std::string &key, const std::vector<double> &fallback) const {
    const auto *v = lookup(key);
    if (!v) return fallback;
    std::vector<double> out;
    std::stringstream ss(*v);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok = trim(tok);
        if (tok.empty()) continue;
        try {
            std::size_t used = 0;
            out.push_back(std::stod(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception &) {
            throw std::runtime_error("config key '" + key + "': bad list entry '" + tok + "'");
        }
    }
    return out;
}

void KeyValues::require_all_used() const {
    for (const auto &[k, v] : values_) {
        if (!used_.count(k)) throw std::runtime_error("unknown config key '" + k + "'");
    }
}

std::string KeyValues::serialize() const {
    std::string out;
    for (const auto &[k, v] : values_) out += k + "=" + v + "\n";
    return out;
}

namespace {

void read_registration(const KeyValues &kv, RegistrationConfig &r) {
    r.grid_spacing = static_cast<int>(kv.get_int("grid_spacing", r.grid_spacing));
    r.bspline_iters = static_cast<int>(kv.get_int("bspline_iters", r.bspline_iters));
    r.pixel_iters = static_cast<int>(kv.get_int("pixel_iters", r.pixel_iters));
    if (kv.has("lambda")) r.lambda = kv.get_double("lambda", 0.0);
    r.lambda_factor = kv.get_double("lambda_factor", r.lambda_factor);
    r.bspline_step = kv.get_double("bspline_step", r.bspline_step);
    r.pixel_step = kv.get_double("pixel_step", r.pixel_step);
    r.tolerance = kv.get_double("tolerance", r.tolerance);
    r.levels = kv.get_doubles("levels", r.levels);
    r.warm_start = kv.get_bool("warm_start", r.warm_start);
    r.all_state_template = kv.get_bool("all_state_template", r.all_state_template);
    r.min_motion_px = kv.get_double("min_motion_px", r.min_motion_px);
}

}  // namespace

RegistrationConfig registration_config_from(const KeyValues &kv) {
    RegistrationConfig r;
    read_registration(kv, r);
    r.validate();
    return r;
}

ReconConfig recon_config_from(const KeyValues &kv) {
    ReconConfig c;
    c.schedule.T = static_cast<int>(kv.get_int("T", c.schedule.T));
    c.schedule.a_clamp = kv.get_double("a_clamp", c.schedule.a_clamp);
    c.schedule.sigma_max = kv.get_double("sigma_max", c.schedule.sigma_max);
    c.schedule.sigma_min = kv.get_double("sigma_min", c.schedule.sigma_min);
    c.auto_sigma_max = kv.get_bool("auto_sigma_max", c.auto_sigma_max);
    c.gamma = kv.get_double("gamma", c.gamma);
    const std::string mode = kv.get_string("guidance_mode", "normalized");
    if (mode == "normalized") {
        c.guidance_mode = GuidanceMode::normalized;
    } else if (mode == "constant") {
        c.guidance_mode = GuidanceMode::constant;
    } else {
        throw std::runtime_error("guidance_mode must be 'normalized' or 'constant'");
    }
    c.motion_correction = kv.get_bool("motion_correction", c.motion_correction);
    if (kv.has("motion_steps")) {
        std::vector<int> steps;
        for (double v : kv.get_doubles("motion_steps", {})) steps.push_back(static_cast<int>(v));
        c.motion_steps = steps;
    }
    c.n_motion_updates = static_cast<int>(kv.get_int("n_motion_updates", c.n_motion_updates));
    c.motion_start = kv.get_double("motion_start", c.motion_start);
    c.seed = static_cast<std::uint64_t>(kv.get_int("seed", static_cast<long>(c.seed)));

    read_registration(kv, c.registration);
    c.validate();
    return c;
}

void write_recon_config(const ReconConfig &c, KeyValues &kv) {
    kv.set("T", std::to_string(c.schedule.T));
    kv.set("a_clamp", format_double(c.schedule.a_clamp));
    kv.set("sigma_max", format_double(c.schedule.sigma_max));
    kv.set("sigma_min", format_double(c.schedule.sigma_min));
    kv.set("auto_sigma_max", c.auto_sigma_max ? "true" : "false");
    kv.set("gamma", format_double(c.gamma));
    kv.set("guidance_mode", c.guidance_mode == GuidanceMode::normalized ? "normalized" : "constant");
    kv.set("motion_correction", c.motion_correction ? "true" : "false");
    if (c.motion_steps) {
        std::vector<double> v(c.motion_steps->begin(), c.motion_steps->end());
        kv.set("motion_steps", join(v));
    }
    kv.set("n_motion_updates", std::to_string(c.n_motion_updates));
    kv.set("motion_start", format_double(c.motion_start));
    kv.set("seed", std::to_string(c.seed));
    const auto &r = c.registration;
    kv.set("grid_spacing", std::to_string(r.grid_spacing));
    kv.set("bspline_iters", std::to_string(r.bspline_iters));
    kv.set("pixel_iters", std::to_string(r.pixel_iters));
    if (r.lambda) kv.set("lambda", format_double(*r.lambda));
    kv.set("lambda_factor", format_double(r.lambda_factor));
    kv.set("bspline_step", format_double(r.bspline_step));
    kv.set("pixel_step", format_double(r.pixel_step));
    kv.set("tolerance", format_double(r.tolerance));
    kv.set("levels", join(r.levels));
    kv.set("warm_start", r.warm_start ? "true" : "false");
    kv.set("all_state_template", r.all_state_template ? "true" : "false");
    kv.set("min_motion_px", format_double(r.min_motion_px));
}

}  // namespace c2f
