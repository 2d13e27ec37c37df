#include "gbk/cli.hpp"

#include "gbk/config.hpp"
#include "gbk/parallel.hpp"
#include "gbk/report.hpp"
#include "gbk/verify.hpp"

#include <CLI11.hpp>
#include <fmt/core.h>

#include <cmath>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

namespace gbk::cli {

namespace {

struct Invocation {
    std::string command;
    Config config;
    std::string out_path;
    std::string dump_path;   // simulate: final ensemble
    std::string matrix_path; // spectrum: operator entries
    std::ostream* out{nullptr};
    std::ostream* err{nullptr};
};

std::set<std::string> operator+(std::set<std::string> a, std::set<std::string> const& b)
{
    a.insert(b.begin(), b.end());
    return a;
}

/// Writes to -o when given, else to the command's output stream.
class Sink {
public:
    explicit Sink(Invocation const& inv)
    {
        if (!inv.out_path.empty()) {
            file_.open(inv.out_path);
            if (!file_) {
                throw ConfigError(fmt::format("cannot write '{}'", inv.out_path));
            }
            stream_ = &file_;
        } else {
            stream_ = inv.out;
        }
    }
    std::ostream& get() { return *stream_; }

private:
    std::ofstream file_;
    std::ostream* stream_{nullptr};
};

void log_entries(Invocation const& inv, std::vector<LogEntry> const& log)
{
    for (auto const& e : log) {
        *inv.err << "warning (step " << e.step << "): " << e.message << '\n';
    }
}

int cmd_simulate(Invocation& inv)
{
    inv.config.require_known(sim_config_keys());
    SimConfig const cfg = sim_config_from(inv.config);
    auto const res = run(cfg);
    log_entries(inv, res.log);
    Sink sink(inv);
    write_series_csv(sink.get(), make_provenance("simulate", inv.config, cfg.seed), res.series, cfg.weighted_norms);
    if (!inv.dump_path.empty()) {
        write_ensemble(inv.dump_path, res.final_state);
    }
    return 0;
}

Json steady_payload(SteadyStateResult const& res, SimConfig const& cfg, WeightParams const& w)
{
    Json j = to_json(res);
    auto const d = steady_distance(res, cfg.bath, w);
    j["distance"] = {{"value", d.distance}, {"stderr", d.stderr_distance}};
    j["theta_sharp"] = theta_sharp(cfg.restitution.e, cfg.bath.theta0);
    return j;
}

int cmd_steady(Invocation& inv)
{
    inv.config.require_known(sim_config_keys() + steady_option_keys() + weight_keys());
    SimConfig const cfg = sim_config_from(inv.config);
    SteadyOptions const opt = steady_options_from(inv.config);
    WeightParams const w = weight_from(inv.config);
    auto const res = compute_steady_state(cfg, opt);
    Sink sink(inv);
    write_json_report(sink.get(), make_provenance("steady", inv.config, cfg.seed), steady_payload(res, cfg, w));
    return 0;
}

std::set<std::string> relax_keys() { return {"kick", "kick_scale", "kick_shift", "t_run", "relax_record_interval", "noise_factor"}; }

Kick kick_from(Config const& c)
{
    Kick k;
    std::string const kind = c.get_string("kick", "temperature");
    if (kind == "temperature") {
        k.kind = Kick::Kind::temperature_scale;
        k.s = c.get_double("kick_scale", 1.2);
        if (!(k.s > 0.0)) {
            throw ConfigError("kick_scale must be positive");
        }
    } else if (kind == "shift") {
        k.kind = Kick::Kind::shift;
        k.du = c.get_vec3("kick_shift", {0.2, 0.0, 0.0});
    } else {
        throw ConfigError(fmt::format("kick must be temperature or shift, got '{}'", kind));
    }
    return k;
}

RelaxationOptions relax_options_from(Config const& c)
{
    RelaxationOptions o;
    o.t_run = c.get_double("t_run", o.t_run);
    o.record_interval = c.get_double("relax_record_interval", o.record_interval);
    o.noise_factor = c.get_double("noise_factor", o.noise_factor);
    if (!(o.t_run > 0.0) || !(o.record_interval > 0.0) || !(o.noise_factor > 0.0)) {
        throw ConfigError("relaxation options must be positive");
    }
    return o;
}

int cmd_sweep(Invocation& inv)
{
    inv.config.require_known(sim_config_keys() + steady_option_keys() + weight_keys() + relax_keys() +
                             std::set<std::string>{"alphas", "relax"});
    SimConfig const cfg = sim_config_from(inv.config);
    SweepOptions opt;
    opt.steady = steady_options_from(inv.config);
    opt.weight = weight_from(inv.config);
    opt.relax = inv.config.get_bool("relax", false);
    opt.kick = kick_from(inv.config);
    opt.relax_options = relax_options_from(inv.config);
    auto const alphas = inv.config.get_list("alphas", {0.8, 0.9, 0.95, 0.99});
    if (alphas.empty()) {
        throw ConfigError("alphas must list at least one value");
    }
    for (double a : alphas) {
        if (!(a > 0.0 && a <= 1.0)) {
            throw ConfigError("alphas must lie in (0, 1]");
        }
    }
    if (!std::is_sorted(alphas.begin(), alphas.end())) {
        throw ConfigError("alphas must be sorted ascending");
    }
    auto const rows = alpha_sweep(alphas, cfg, opt);
    Sink sink(inv);
    CsvWriter csv(sink.get(), make_provenance("sweep", inv.config, cfg.seed),
                  {"alpha", "e", "temperature", "temperature_stderr", "distance", "rate", "rate_r2", "distance_stderr"});
    int code = 0;
    for (auto const& r : rows) {
        double const nan = std::nan("");
        csv.row({r.alpha, r.e, r.ok ? r.temperature : nan, r.ok ? r.temperature_stderr : nan, r.ok ? r.distance : nan,
                 r.rate, r.rate_r2, r.ok ? r.distance_stderr : nan});
        if (!r.error.empty()) {
            *inv.err << fmt::format("alpha={}: {}\n", r.alpha, r.error);
        }
        if (!r.ok) {
            code = 1;
        }
    }
    return code;
}

int cmd_relax(Invocation& inv)
{
    inv.config.require_known(sim_config_keys() + steady_option_keys() + relax_keys());
    SimConfig const cfg = sim_config_from(inv.config);
    SteadyOptions const sopt = steady_options_from(inv.config);
    Kick const kick = kick_from(inv.config);
    RelaxationOptions const ropt = relax_options_from(inv.config);
    auto const steady = compute_steady_state(cfg, sopt);
    auto const rel = perturbation_relaxation(steady, cfg, kick, ropt);
    Json j;
    j["fit"] = to_json(rel.fit);
    j["noise"] = rel.noise;
    j["steady_value"] = rel.steady_value;
    j["steady_temperature"] = steady.temperature;
    j["window_points"] = rel.window_points;
    std::vector<double> t;
    std::vector<double> s;
    for (auto const& p : rel.signal) {
        t.push_back(p.first);
        s.push_back(p.second);
    }
    j["signal"] = {{"t", t}, {"value", s}};
    Sink sink(inv);
    write_json_report(sink.get(), make_provenance("relax", inv.config, cfg.seed), j);
    return 0;
}

std::set<std::string> operator_keys()
{
    return std::set<std::string>{"alpha", "e", "u0", "theta0", "threads", "corrected", "panel_scale"} + grid_keys();
}

AssemblyOptions assembly_from(Config const& c)
{
    AssemblyOptions a;
    a.corrected = c.get_bool("corrected", true);
    a.threads = static_cast<int>(c.get_int("threads", 0));
    a.panel_scale = c.get_double("panel_scale", 1.0);
    if (!(a.panel_scale > 0.0)) {
        throw ConfigError("panel_scale must be positive");
    }
    return a;
}

BathParams bath_from(Config const& c)
{
    BathParams b;
    b.u0 = c.get_vec3("u0", b.u0);
    b.theta0 = c.get_double("theta0", b.theta0);
    try {
        b.validate();
    } catch (std::invalid_argument const& ex) {
        throw ConfigError(ex.what());
    }
    return b;
}

double restitution_from(Config const& c, char const* key, double fallback)
{
    double const x = c.get_double(key, fallback);
    if (!(x > 0.0 && x <= 1.0)) {
        throw ConfigError(fmt::format("{} must lie in (0, 1]", key));
    }
    return x;
}

int cmd_spectrum(Invocation& inv)
{
    inv.config.require_known(operator_keys() + sim_config_keys() + steady_option_keys() +
                             std::set<std::string>{"operator", "partner", "eigenvector", "fourier_k"});
    std::string const op = inv.config.get_string("operator", "bath");
    if (op != "bath" && op != "linearized") {
        throw ConfigError("operator must be bath or linearized");
    }
    double const alpha = restitution_from(inv.config, "alpha", 1.0);
    double const e = restitution_from(inv.config, "e", 1.0);
    BathParams const bath = bath_from(inv.config);
    GridParams const gp = grid_from(inv.config);
    AssemblyOptions const aopt = assembly_from(inv.config);
    bool const eigvec = inv.config.get_bool("eigenvector", true);
    auto const grid = make_grid(gp, e, bath);
    double const ts = theta_sharp(e, bath.theta0);
    RadialDensity F = RadialDensity::maxwellian(bath.u0, ts);
    std::uint64_t seed = 0;
    std::string const partner = inv.config.get_string("partner", "maxwellian");
    if (partner == "steady") {
        SimConfig const cfg = sim_config_from(inv.config);
        seed = cfg.seed;
        auto const steady = compute_steady_state(cfg, steady_options_from(inv.config));
        F = RadialDensity::from_profile(steady.profile);
    } else if (partner != "maxwellian") {
        throw ConfigError("partner must be maxwellian or steady");
    }
    OperatorMatrix const m =
        op == "bath" ? assemble_bath_operator(grid, e, bath, aopt) : assemble_linearized(grid, alpha, e, bath, F, aopt);
    auto const cand = sample_on_grid(grid, F);
    auto const rep = spectrum(m, cand, eigvec);
    Json j = to_json(rep, m);
    j["symmetry_defect"] = weighted_symmetry_defect(m.entries, sample_on_grid(grid, RadialDensity::maxwellian(bath.u0, ts)));
    j["partner"] = partner;
    if (inv.config.has("fourier_k")) {
        Vec3 const k = inv.config.get_vec3("fourier_k", {});
        auto const fe = fourier_mode_eigenvalues(m, k);
        Json arr = Json::array();
        for (auto const& z : fe) {
            arr.push_back({z.real(), z.imag()});
        }
        j["fourier_mode"] = {{"k", to_json(k)}, {"eigenvalues", arr}};
    }
    auto const prov = make_provenance("spectrum", inv.config, seed);
    if (!inv.matrix_path.empty()) {
        write_matrix(inv.matrix_path, m, prov);
    }
    Sink sink(inv);
    write_json_report(sink.get(), prov, j);
    return 0;
}

// deterministic commands accept a seed so every subcommand shares one calling convention
std::uint64_t deterministic_seed(Config& cfg)
{
    return static_cast<std::uint64_t>(cfg.get_int("seed", 0));
}

int cmd_split_probe(Invocation& inv)
{
    inv.config.require_known(operator_keys() + split_keys() + std::set<std::string>{"include_self", "seed"});
    double const alpha = restitution_from(inv.config, "alpha", 0.95);
    double const e = restitution_from(inv.config, "e", 1.0);
    BathParams const bath = bath_from(inv.config);
    GridParams const gp = grid_from(inv.config);
    AssemblyOptions const aopt = assembly_from(inv.config);
    SplitParams const sp = split_from(inv.config);
    bool const self = inv.config.get_bool("include_self", true);
    auto const grid = make_grid(gp, e, bath);
    auto const F = RadialDensity::maxwellian(bath.u0, theta_sharp(e, bath.theta0));
    SplitOperators s;
    try {
        s = assemble_split(grid, alpha, e, bath, sp, F, self, aopt);
    } catch (std::invalid_argument const& ex) {
        throw ConfigError(ex.what());
    }
    double const radius = 2.0 / sp.delta;
    double outside = 0.0;
    double inside = 0.0;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    std::size_t outer = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        auto const ii = static_cast<Eigen::Index>(i);
        Vec3 const v = grid.node(i);
        double const row = s.A.entries.row(ii).cwiseAbs().maxCoeff();
        if (norm(v) > radius) {
            ++outer;
            outside = std::max(outside, row);
            double nu = collision_frequency_nu(v, bath);
            if (self) {
                nu += F.collision_frequency(norm(v - bath.u0));
            }
            lo = std::min(lo, s.B.entries(ii, ii) / -nu);
            hi = std::max(hi, s.B.entries(ii, ii) / -nu);
        } else {
            inside = std::max(inside, row);
        }
    }
    Json j;
    j["delta"] = sp.delta;
    j["smoothing"] = sp.smoothing;
    j["support_radius"] = radius;
    j["outer_rows"] = outer;
    j["a_max_outside"] = outside;
    j["a_max_inside"] = inside;
    j["reassembly_error"] = (s.A.entries + s.B.entries - s.full.entries).cwiseAbs().maxCoeff();
    j["norm_a"] = max_row_sum(s.A.entries);
    j["norm_b"] = max_row_sum(s.B.entries);
    j["b_diag_ratio"] = outer > 0 ? Json{lo, hi} : Json(nullptr);
    j["grid"] = {{"n", grid.n}, {"R", grid.R}};
    Sink sink(inv);
    write_json_report(sink.get(), make_provenance("split-probe", inv.config, deterministic_seed(inv.config)), j);
    return 0;
}

int cmd_freq(Invocation& inv)
{
    inv.config.require_known({"theta0", "d_max", "points", "quadrature", "bounds_d_max", "bounds_points", "seed", "threads"});
    double const theta0 = inv.config.get_double("theta0", 1.0);
    double const d_max = inv.config.get_double("d_max", 20.0);
    auto const points = inv.config.get_int("points", 201);
    bool const quad = inv.config.get_bool("quadrature", true);
    double const bmax = inv.config.get_double("bounds_d_max", 50.0);
    auto const bpoints = inv.config.get_int("bounds_points", 2001);
    if (!(theta0 > 0.0) || !(d_max > 0.0) || points < 2 || !(bmax > 0.0) || bpoints < 2) {
        throw ConfigError("freq options out of range");
    }
    BathParams bath;
    bath.theta0 = theta0;
    auto const nb = collision_frequency_bounds(bath, bmax, static_cast<std::size_t>(bpoints));
    Sink sink(inv);
    auto prov = make_provenance("freq", inv.config, deterministic_seed(inv.config));
    prov.config["nu0"] = format_double(nb.nu0);
    prov.config["nu1"] = format_double(nb.nu1);
    CsvWriter csv(sink.get(), prov, {"d", "nu", "nu_quadrature", "relative_error", "nu_over_bracket"});
    for (long long k = 0; k < points; ++k) {
        double const d = d_max * static_cast<double>(k) / static_cast<double>(points - 1);
        double const nu = collision_frequency_nu_radial(d, theta0);
        double const q = quad ? collision_frequency_quadrature(d, theta0) : std::nan("");
        csv.row({d, nu, q, quad ? std::abs(nu - q) / q : std::nan(""), nu / bracket(d)});
    }
    return 0;
}

int cmd_kernel_check(Invocation& inv)
{
    inv.config.require_known(std::set<std::string>{"e", "theta0", "u0", "speeds", "constants", "consistency_grid_n",
                                                   "threads", "seed"} +
                             weight_keys());
    double const e = restitution_from(inv.config, "e", 0.5);
    BathParams const bath = bath_from(inv.config);
    WeightParams fallback;
    fallback.b = 1.0;
    fallback.beta = 0.5;
    fallback.q = 2.0;
    WeightParams const w = weight_from(inv.config, fallback);
    if (!(w.beta > 0.0 && w.beta < 1.0)) {
        throw ConfigError("weight_beta must lie in (0, 1)");
    }
    auto const speeds = inv.config.get_list("speeds", {0.0, 1.0, 2.0, 4.0, 8.0, 10.0});
    std::string const which = inv.config.get_string("constants", "derived");
    KernelConstants k;
    if (which == "derived") {
        k = KernelConstants::derived(e, bath.theta0);
    } else if (which != "unit") {
        throw ConfigError("constants must be derived or unit");
    }
    auto const gn = inv.config.get_int("consistency_grid_n", 21);
    int const threads = static_cast<int>(inv.config.get_int("threads", 0));
    auto const rep = kernel_bound_check(w, bath, k, speeds);
    Json j = to_json(rep);
    j["constants"] = {{"C", k.C}, {"mu", k.mu}, {"kind", which}};
    // exponent shift is odd under v <-> v_*
    Vec3 const v{0.7, -0.2, 0.4};
    Vec3 const vs{-0.3, 0.5, 1.1};
    j["exponent_shift"] = {kernel_exponent_shift(v, vs, bath.u0), kernel_exponent_shift(vs, v, bath.u0)};
    Json mass = Json::array();
    for (double s : {0.0, 1.0, 2.5}) {
        Vec3 const vstar = bath.u0 + Vec3{s * std::sqrt(bath.theta0), 0.0, 0.0};
        double const m = kernel_mass(vstar, bath, k);
        mass.push_back({{"speed", s}, {"integral", m}, {"nu_e", collision_frequency_nu(vstar, bath)}});
    }
    j["kernel_mass"] = mass;
    if (gn > 0) {
        GridParams gp;
        gp.n = static_cast<int>(gn);
        auto const grid = make_grid(gp, e, bath);
        AssemblyOptions aopt;
        aopt.threads = threads;
        auto const m = assemble_bath_operator(grid, e, bath, aopt);
        Json cons = Json::array();
        for (double s : {0.0, 1.0, 2.0}) {
            // nearest node along x
            int const off = static_cast<int>(std::lround(s * std::sqrt(bath.theta0) / grid.h()));
            int const c = grid.half();
            std::size_t const idx = (static_cast<std::size_t>(c + off) * grid.n + c) * grid.n + c;
            Vec3 const node = grid.node(idx);
            double const exact = kernel_mass(node, bath, k);
            double const disc = discrete_gain_mass(m, idx);
            cons.push_back({{"node_offset", norm(node - bath.u0)}, {"integral", exact}, {"discrete", disc},
                            {"relative_difference", std::abs(disc - exact) / exact}});
        }
        j["discrete_consistency"] = {{"grid_n", grid.n}, {"nodes", cons}};
    }
    Sink sink(inv);
    write_json_report(sink.get(), make_provenance("kernel-check", inv.config, deterministic_seed(inv.config)), j);
    return 0;
}

int cmd_verify(Invocation& inv)
{
    inv.config.require_known({"seed", "threads", "criteria"});
    VerifyOptions opt;
    opt.seed = inv.config.get_u64("seed", opt.seed);
    opt.threads = static_cast<int>(inv.config.get_int("threads", 0));
    for (double c : inv.config.get_list("criteria", {})) {
        int const id = static_cast<int>(c);
        if (id != c || id < 1 || id > kCriterionCount) {
            throw ConfigError(fmt::format("criteria entries must be integers in 1..{}", kCriterionCount));
        }
        opt.only.insert(id);
    }
    std::ostream& err = *inv.err;
    opt.on_result = [&err](CriterionResult const& r) { err << format_result_line(r) << std::endl; };
    auto const results = run_verification(opt);
    Json arr = Json::array();
    bool all = true;
    for (auto const& r : results) {
        arr.push_back({{"id", r.id}, {"name", r.name}, {"passed", r.passed}, {"summary", r.summary},
                       {"details", r.details}, {"seconds", r.seconds}});
        all = all && r.passed;
    }
    Sink sink(inv);
    write_json_report(sink.get(), make_provenance("verify", inv.config, opt.seed), {{"criteria", arr}, {"passed", all}});
    return all ? 0 : 1;
}

Json error_json(std::string const& command, std::string const& type, std::string const& message)
{
    return {{"error", {{"command", command}, {"type", type}, {"message", message}}}};
}

} // namespace

int run(std::vector<std::string> const& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Inelastic Boltzmann equation with a thermal bath: simulation and operator analysis", "gbk"};
    app.require_subcommand(1);
    app.set_version_flag("--version", GBK_VERSION);

    Invocation inv;
    inv.out = &out;
    inv.err = &err;
    std::string config_path;
    std::vector<std::string> overrides;

    using Handler = int (*)(Invocation&);
    std::vector<std::pair<CLI::App*, Handler>> subs;
    auto add = [&](char const* name, char const* help, Handler h) {
        CLI::App* s = app.add_subcommand(name, help);
        s->add_option("-c,--config", config_path, "key = value config file");
        s->add_option("-o,--out", inv.out_path, "output file (default stdout)");
        s->add_option("--set", overrides, "override one key: --set key=value");
        subs.emplace_back(s, h);
        return s;
    };
    add("simulate", "DSMC run, moment time series as CSV", cmd_simulate)
        ->add_option("--dump", inv.dump_path, "binary dump of the final ensemble");
    add("steady", "steady state and its distance to M as JSON", cmd_steady);
    add("sweep", "steady states over alphas as CSV", cmd_sweep);
    add("relax", "relaxation after a kick from the steady state as JSON", cmd_relax);
    add("spectrum", "assemble an operator and report its spectrum as JSON", cmd_spectrum)
        ->add_option("--matrix", inv.matrix_path, "raw f64 dump of the matrix with a JSON sidecar");
    add("split-probe", "support and size checks of the truncated split", cmd_split_probe);
    add("freq", "collision frequency table as CSV", cmd_freq);
    add("kernel-check", "explicit bath kernel study as JSON", cmd_kernel_check);
    add("verify", "acceptance criteria; nonzero exit on any failure", cmd_verify);

    std::vector<std::string> argv_store{"gbk"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char const*> argv;
    for (auto const& a : argv_store) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (CLI::CallForHelp const&) {
        out << app.help();
        return 0;
    } catch (CLI::CallForVersion const&) {
        out << GBK_VERSION << '\n';
        return 0;
    } catch (CLI::ParseError const& ex) {
        err << ex.what() << '\n' << "run 'gbk --help' for usage\n";
        return 2;
    }

    Handler handler = nullptr;
    for (auto const& [s, h] : subs) {
        if (s->parsed()) {
            inv.command = s->get_name();
            handler = h;
        }
    }
    try {
        inv.config = config_path.empty() ? Config{} : Config::load(config_path);
        for (auto const& o : overrides) {
            inv.config.set_assignment(o);
        }
        return handler(inv);
    } catch (ConfigError const& ex) {
        err << error_json(inv.command, "usage", ex.what()).dump() << '\n';
        return 2;
    } catch (StationarityError const& ex) {
        Json j = error_json(inv.command, "stationarity", ex.what());
        std::vector<double> t;
        std::vector<double> temp;
        for (auto const& r : ex.series()) {
            t.push_back(r.t);
            temp.push_back(r.temperature);
        }
        j["error"]["series"] = {{"t", t}, {"temperature", temp}};
        err << j.dump() << '\n';
        return 1;
    } catch (std::invalid_argument const& ex) {
        err << error_json(inv.command, "invalid_argument", ex.what()).dump() << '\n';
        return 1;
    } catch (std::exception const& ex) {
        err << error_json(inv.command, "compute", ex.what()).dump() << '\n';
        return 1;
    }
}

} // namespace gbk::cli
