#include "gbk/config.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace gbk {

namespace {

std::string trim(std::string_view s)
{
    auto const b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) {
        return {};
    }
    auto const e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

bool valid_key(std::string const& k)
{
    return !k.empty() && std::all_of(k.begin(), k.end(), [](unsigned char ch) {
        return std::islower(ch) || std::isdigit(ch) || ch == '_';
    });
}

double parse_double(std::string const& key, std::string const& text)
{
    std::string const t = trim(text);
    double out = 0.0;
    auto const [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
    if (ec != std::errc{} || ptr != t.data() + t.size() || !std::isfinite(out)) {
        throw ConfigError(fmt::format("key '{}': '{}' is not a finite number", key, text));
    }
    return out;
}

std::vector<std::string> split_list(std::string const& text)
{
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ',')) {
        out.push_back(trim(item));
    }
    return out;
}

std::string join(std::vector<double> const& xs)
{
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        out += (i ? "," : "") + format_double(xs[i]);
    }
    return out;
}

} // namespace

std::string format_double(double x)
{
    if (std::isnan(x)) {
        return "nan";
    }
    if (std::isinf(x)) {
        return x > 0 ? "inf" : "-inf";
    }
    return fmt::format("{:.17g}", x);
}

Config Config::parse(std::string_view text, std::string const& source)
{
    Config c;
    c.source_ = source;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto const hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        std::string const body = trim(line);
        if (body.empty()) {
            continue;
        }
        auto const eq = body.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(fmt::format("{}:{}: expected 'key = value'", source, lineno));
        }
        std::string const key = trim(std::string_view(body).substr(0, eq));
        std::string const value = trim(std::string_view(body).substr(eq + 1));
        if (!valid_key(key)) {
            throw ConfigError(fmt::format("{}:{}: invalid key '{}'", source, lineno, key));
        }
        if (c.values_.count(key) != 0) {
            throw ConfigError(fmt::format("{}:{}: duplicate key '{}'", source, lineno, key));
        }
        c.values_[key] = value;
    }
    return c;
}

Config Config::load(std::filesystem::path const& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(fmt::format("cannot read config file '{}'", path.string()));
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path.string());
}

void Config::set(std::string const& key, std::string const& value)
{
    if (!valid_key(key)) {
        throw ConfigError(fmt::format("invalid key '{}'", key));
    }
    values_[key] = trim(value);
}

void Config::set_assignment(std::string const& assignment)
{
    auto const eq = assignment.find('=');
    if (eq == std::string::npos) {
        throw ConfigError(fmt::format("override '{}' is not key=value", assignment));
    }
    set(trim(std::string_view(assignment).substr(0, eq)), assignment.substr(eq + 1));
}

std::optional<std::string> Config::lookup(std::string const& key) const
{
    auto const it = values_.find(key);
    if (it == values_.end()) {
        return std::nullopt;
    }
    return it->second;
}

double Config::get_double(std::string const& key, double fallback) const
{
    auto const v = lookup(key);
    double const out = v ? parse_double(key, *v) : fallback;
    resolved_[key] = format_double(out);
    return out;
}

long long Config::get_int(std::string const& key, long long fallback) const
{
    auto const v = lookup(key);
    long long out = fallback;
    if (v) {
        auto const [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
        if (ec != std::errc{} || ptr != v->data() + v->size()) {
            throw ConfigError(fmt::format("key '{}': '{}' is not an integer", key, *v));
        }
    }
    resolved_[key] = std::to_string(out);
    return out;
}

std::uint64_t Config::get_u64(std::string const& key, std::uint64_t fallback) const
{
    auto const v = lookup(key);
    std::uint64_t out = fallback;
    if (v) {
        auto const [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
        if (ec != std::errc{} || ptr != v->data() + v->size()) {
            throw ConfigError(fmt::format("key '{}': '{}' is not a nonnegative integer", key, *v));
        }
    }
    resolved_[key] = std::to_string(out);
    return out;
}

bool Config::get_bool(std::string const& key, bool fallback) const
{
    auto const v = lookup(key);
    bool out = fallback;
    if (v) {
        if (*v == "true" || *v == "1" || *v == "yes" || *v == "on") {
            out = true;
        } else if (*v == "false" || *v == "0" || *v == "no" || *v == "off") {
            out = false;
        } else {
            throw ConfigError(fmt::format("key '{}': '{}' is not a boolean", key, *v));
        }
    }
    resolved_[key] = out ? "true" : "false";
    return out;
}

std::string Config::get_string(std::string const& key, std::string const& fallback) const
{
    auto const v = lookup(key);
    std::string out = v ? *v : fallback;
    resolved_[key] = out;
    return out;
}

std::vector<double> Config::get_list(std::string const& key, std::vector<double> const& fallback) const
{
    auto const v = lookup(key);
    std::vector<double> out = fallback;
    if (v) {
        out.clear();
        if (!v->empty()) {
            for (auto const& item : split_list(*v)) {
                out.push_back(parse_double(key, item));
            }
        }
    }
    resolved_[key] = join(out);
    return out;
}

Vec3 Config::get_vec3(std::string const& key, Vec3 const& fallback) const
{
    auto const v = lookup(key);
    Vec3 out = fallback;
    if (v) {
        auto const items = split_list(*v);
        if (items.size() != 3) {
            throw ConfigError(fmt::format("key '{}': expected three comma-separated components", key));
        }
        out = {parse_double(key, items[0]), parse_double(key, items[1]), parse_double(key, items[2])};
    }
    resolved_[key] = join({out.x, out.y, out.z});
    return out;
}

void Config::require_known(std::set<std::string> const& allowed) const
{
    for (auto const& kv : values_) {
        if (allowed.count(kv.first) == 0) {
            throw ConfigError(fmt::format("{}: unknown key '{}'", source_, kv.first));
        }
    }
}

std::set<std::string> sim_config_keys()
{
    return {"n_particles", "dt",        "t_end",      "alpha",        "e",           "u0",
            "theta0",      "bath_coupling", "self_coupling", "spatial", "dim",         "box_length",
            "n_cells",     "seed",      "record_every", "rho",        "init_theta",  "init_u",
            "weighted_norms", "threads"};
}

SimConfig sim_config_from(Config const& c)
{
    SimConfig s;
    auto const n = c.get_int("n_particles", static_cast<long long>(s.n_particles));
    if (n < 2) {
        throw ConfigError("n_particles must be at least 2");
    }
    s.n_particles = static_cast<std::size_t>(n);
    s.dt = c.get_double("dt", s.dt);
    s.t_end = c.get_double("t_end", s.t_end);
    s.restitution.alpha = c.get_double("alpha", s.restitution.alpha);
    s.restitution.e = c.get_double("e", s.restitution.e);
    s.bath.u0 = c.get_vec3("u0", s.bath.u0);
    s.bath.theta0 = c.get_double("theta0", s.bath.theta0);
    s.bath_coupling = c.get_double("bath_coupling", s.bath_coupling);
    s.self_coupling = c.get_double("self_coupling", s.self_coupling);
    std::string const mode = c.get_string("spatial", "homogeneous");
    if (mode == "homogeneous") {
        s.spatial.mode = SpatialMode::homogeneous;
    } else if (mode == "periodic_box") {
        s.spatial.mode = SpatialMode::periodic_box;
    } else {
        throw ConfigError(fmt::format("spatial must be homogeneous or periodic_box, got '{}'", mode));
    }
    s.spatial.dim = static_cast<int>(c.get_int("dim", s.spatial.dim));
    s.spatial.box_length = c.get_double("box_length", s.spatial.box_length);
    s.spatial.n_cells = static_cast<int>(c.get_int("n_cells", s.spatial.n_cells));
    s.seed = c.get_u64("seed", s.seed);
    s.record_every = static_cast<int>(c.get_int("record_every", s.record_every));
    s.rho = c.get_double("rho", s.rho);
    s.init_theta = c.get_double("init_theta", s.bath.theta0);
    s.init_u = c.get_vec3("init_u", s.bath.u0);
    // weighted_norms = q:b:beta, q:b:beta
    std::string const norms = c.get_string("weighted_norms", "");
    std::istringstream in(norms);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (item.empty()) {
            continue;
        }
        std::vector<double> parts;
        std::istringstream pin(item);
        std::string p;
        while (std::getline(pin, p, ':')) {
            parts.push_back(parse_double("weighted_norms", p));
        }
        if (parts.size() != 3) {
            throw ConfigError("weighted_norms entries must be q:b:beta");
        }
        WeightParams w;
        w.q = parts[0];
        w.b = parts[1];
        w.beta = parts[2];
        s.weighted_norms.push_back(w);
    }
    s.threads = static_cast<int>(c.get_int("threads", 0));
    try {
        s.validate();
    } catch (std::invalid_argument const& ex) {
        throw ConfigError(ex.what());
    }
    return s;
}

std::set<std::string> steady_option_keys()
{
    return {"record_interval", "window", "consecutive", "slope_threshold", "t_average", "batches", "n_bins", "r_max"};
}

SteadyOptions steady_options_from(Config const& c)
{
    SteadyOptions o;
    o.record_interval = c.get_double("record_interval", o.record_interval);
    o.window = static_cast<std::size_t>(c.get_int("window", static_cast<long long>(o.window)));
    o.consecutive = static_cast<int>(c.get_int("consecutive", o.consecutive));
    o.slope_threshold = c.get_double("slope_threshold", o.slope_threshold);
    o.t_average = c.get_double("t_average", o.t_average);
    o.batches = static_cast<std::size_t>(c.get_int("batches", static_cast<long long>(o.batches)));
    o.n_bins = static_cast<std::size_t>(c.get_int("n_bins", static_cast<long long>(o.n_bins)));
    o.r_max = c.get_double("r_max", o.r_max);
    if (!(o.record_interval > 0.0) || o.window < 3 || o.consecutive < 1 || !(o.t_average > 0.0) || o.batches < 2 ||
        o.n_bins < 8 || o.r_max < 0.0) {
        throw ConfigError("steady-state options out of range");
    }
    return o;
}

std::set<std::string> weight_keys() { return {"weight_q", "weight_b", "weight_beta"}; }

WeightParams weight_from(Config const& c, WeightParams const& fallback)
{
    WeightParams w;
    w.q = c.get_double("weight_q", fallback.q);
    w.b = c.get_double("weight_b", fallback.b);
    w.beta = c.get_double("weight_beta", fallback.beta);
    try {
        w.validate();
    } catch (std::invalid_argument const& ex) {
        throw ConfigError(ex.what());
    }
    return w;
}

std::set<std::string> split_keys() { return {"delta", "smoothing"}; }

SplitParams split_from(Config const& c)
{
    SplitParams p;
    p.delta = c.get_double("delta", p.delta);
    p.smoothing = c.get_double("smoothing", p.smoothing);
    try {
        p.validate();
    } catch (std::invalid_argument const& ex) {
        throw ConfigError(ex.what());
    }
    return p;
}

std::set<std::string> grid_keys() { return {"grid_n", "grid_r"}; }

GridParams grid_from(Config const& c)
{
    GridParams g;
    g.n = static_cast<int>(c.get_int("grid_n", g.n));
    g.R = c.get_double("grid_r", g.R);
    if (g.n < 3 || g.n % 2 == 0) {
        throw ConfigError("grid_n must be odd and at least 3");
    }
    if (g.R < 0.0) {
        throw ConfigError("grid_r must be nonnegative");
    }
    return g;
}

VelocityGrid make_grid(GridParams const& g, double e, BathParams const& bath)
{
    double const ts = theta_sharp(e, bath.theta0);
    double const R = g.R > 0.0 ? g.R : 6.0 * std::sqrt(ts);
    try {
        return VelocityGrid::make(R, g.n, bath.u0, ts);
    } catch (std::invalid_argument const& ex) {
        throw ConfigError(ex.what());
    }
}

} // namespace gbk
