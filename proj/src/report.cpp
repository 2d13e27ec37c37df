#include "gbk/report.hpp"

#include <fmt/core.h>

#include <bit>
#include <chrono>
#include <cstring>
#include <ctime>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace gbk {

static_assert(std::endian::native == std::endian::little, "binary dumps assume a little-endian host");

namespace {

constexpr char kMagic[8] = {'G', 'B', 'K', 'E', 'N', 'S', '0', '1'};

std::string utc_now()
{
    auto const now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

Json number(double x)
{
    // JSON has no NaN or infinity
    return std::isfinite(x) ? Json(x) : Json(nullptr);
}

template <class T>
void put(std::ostream& out, T const& x)
{
    out.write(reinterpret_cast<char const*>(&x), sizeof x);
}

template <class T>
T get(std::istream& in)
{
    T x{};
    in.read(reinterpret_cast<char*>(&x), sizeof x);
    if (!in) {
        throw std::runtime_error("truncated ensemble file");
    }
    return x;
}

} // namespace

Provenance make_provenance(std::string const& command, Config const& cfg, std::uint64_t seed)
{
    Provenance p;
    p.command = command;
    p.config = cfg.resolved();
    p.seed = seed;
    p.timestamp = utc_now();
    return p;
}

CsvWriter::CsvWriter(std::ostream& out, Provenance const& prov, std::vector<std::string> const& columns)
    : out_(out), columns_(columns.size())
{
    out_ << "# gbk " << prov.version << ' ' << prov.command << '\n';
    out_ << "# timestamp " << prov.timestamp << '\n';
    out_ << "# seed " << prov.seed << '\n';
    for (auto const& kv : prov.config) {
        out_ << "# " << kv.first << " = " << kv.second << '\n';
    }
    for (std::size_t i = 0; i < columns.size(); ++i) {
        out_ << (i ? "," : "") << columns[i];
    }
    out_ << '\n';
}

void CsvWriter::row(std::vector<double> const& values)
{
    if (values.size() != columns_) {
        throw std::logic_error("CSV row width does not match the header");
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        out_ << (i ? "," : "") << format_double(values[i]);
    }
    out_ << '\n';
}

void write_json_report(std::ostream& out, Provenance const& prov, Json const& payload)
{
    Json doc;
    doc["header"] = {{"command", prov.command}, {"config", prov.config}, {"seed", prov.seed},
                     {"version", prov.version}, {"timestamp", prov.timestamp}};
    doc["payload"] = payload;
    out << doc.dump(2) << '\n';
}

std::string strip_header(std::string const& artifact)
{
    auto const first = artifact.find_first_not_of(" \n");
    if (first != std::string::npos && artifact[first] == '{') {
        return Json::parse(artifact).at("payload").dump();
    }
    std::istringstream in(artifact);
    std::string line;
    std::string out;
    while (std::getline(in, line)) {
        if (!line.starts_with('#')) {
            out += line;
            out += '\n';
        }
    }
    return out;
}

std::vector<std::string> series_columns(std::vector<WeightParams> const& norms)
{
    std::vector<std::string> cols{"t", "mass", "px", "py", "pz", "energy", "temperature"};
    for (auto const& w : norms) {
        cols.push_back(fmt::format("wnorm_{}_{}_{}", format_double(w.q), format_double(w.b), format_double(w.beta)));
    }
    return cols;
}

void write_series_csv(std::ostream& out, Provenance const& prov, std::vector<MomentRecord> const& series,
                      std::vector<WeightParams> const& norms)
{
    CsvWriter csv(out, prov, series_columns(norms));
    for (auto const& r : series) {
        std::vector<double> row{r.t, r.mass, r.momentum.x, r.momentum.y, r.momentum.z, r.energy, r.temperature};
        for (auto const& w : r.weighted_norms) {
            row.push_back(w.value);
        }
        csv.row(row);
    }
}

void write_ensemble(std::filesystem::path const& path, ParticleEnsemble const& ens)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
    }
    out.write(kMagic, sizeof kMagic);
    put<std::uint64_t>(out, ens.size());
    put<std::uint64_t>(out, ens.has_positions() ? 1 : 0);
    for (auto const& v : ens.velocities) {
        put(out, v.x), put(out, v.y), put(out, v.z);
    }
    for (auto const& x : ens.positions) {
        put(out, x.x), put(out, x.y), put(out, x.z);
    }
    if (!out) {
        throw std::runtime_error(fmt::format("write to '{}' failed", path.string()));
    }
}

ParticleEnsemble read_ensemble(std::filesystem::path const& path, double rho)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error(fmt::format("cannot read '{}'", path.string()));
    }
    char magic[8];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
        throw std::runtime_error(fmt::format("'{}' is not an ensemble dump", path.string()));
    }
    auto const n = get<std::uint64_t>(in);
    auto const has_pos = get<std::uint64_t>(in);
    ParticleEnsemble ens;
    ens.rho = rho;
    ens.velocities.resize(n);
    for (auto& v : ens.velocities) {
        v.x = get<double>(in), v.y = get<double>(in), v.z = get<double>(in);
    }
    if (has_pos != 0) {
        ens.positions.resize(n);
        for (auto& x : ens.positions) {
            x.x = get<double>(in), x.y = get<double>(in), x.z = get<double>(in);
        }
    }
    return ens;
}

void write_matrix(std::filesystem::path const& path, OperatorMatrix const& m, Provenance const& prov)
{
    {
        std::ofstream out(path, std::ios::binary);
        if (!out) {
            throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
        }
        Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> const rm = m.entries;
        out.write(reinterpret_cast<char const*>(rm.data()), static_cast<std::streamsize>(sizeof(double) * rm.size()));
    }
    Json side;
    side["kind"] = to_string(m.kind);
    side["alpha"] = m.alpha;
    side["e"] = m.e;
    side["rows"] = m.entries.rows();
    side["cols"] = m.entries.cols();
    side["layout"] = "row-major little-endian f64";
    side["grid"] = {{"n", m.grid.n}, {"R", m.grid.R}, {"center", to_json(m.grid.center)}, {"h", m.grid.h()},
                    {"node_order", "x-major: i = (ix * n + iy) * n + iz"}};
    side["bath"] = {{"u0", to_json(m.bath.u0)}, {"theta0", m.bath.theta0}};
    if (m.split) {
        side["delta"] = m.split->delta;
        side["smoothing"] = m.split->smoothing;
    }
    std::ofstream meta(path.string() + ".json");
    write_json_report(meta, prov, side);
}

Json to_json(Vec3 const& v) { return Json::array({number(v.x), number(v.y), number(v.z)}); }

Json to_json(RadialProfile const& p)
{
    Json j;
    j["bin_edges"] = p.bin_edges;
    Json d = Json::array();
    for (double x : p.density) {
        d.push_back(number(x));
    }
    j["density"] = d;
    j["density_stderr"] = p.density_stderr;
    j["center"] = to_json(p.center);
    j["total_mass"] = number(p.total_mass);
    j["outside_mass"] = number(p.outside_mass);
    j["r_max_warning"] = p.r_max_warning;
    return j;
}

Json to_json(RateFit const& f)
{
    return {{"rate", number(f.rate)},       {"intercept", number(f.intercept)}, {"r_squared", number(f.r_squared)},
            {"window", {number(f.t_start), number(f.t_end)}}, {"n_points", f.n_points}};
}

Json to_json(SteadyStateResult const& r)
{
    Json j;
    j["profile"] = to_json(r.profile);
    j["temperature"] = number(r.temperature);
    j["temperature_stderr"] = number(r.temperature_stderr);
    j["profile_temperature"] = number(r.profile.temperature());
    j["alpha"] = r.alpha;
    j["e"] = r.e;
    j["stationarity_score"] = number(r.stationarity_score);
    j["n_particles"] = r.n_particles;
    j["t_burn_in"] = number(r.t_burn_in);
    j["t_average"] = number(r.t_average);
    j["batch_temperatures"] = r.batch_temperatures;
    return j;
}

Json to_json(SpectrumReport const& r, OperatorMatrix const& m)
{
    Json j;
    j["kind"] = to_string(m.kind);
    j["alpha"] = m.alpha;
    j["e"] = m.e;
    j["grid"] = {{"n", m.grid.n}, {"R", m.grid.R}};
    Json ev = Json::array();
    for (auto const& z : r.eigenvalues) {
        ev.push_back({z.real(), z.imag()});
    }
    j["eigenvalues"] = ev;
    j["nearest_zero"] = {r.nearest_zero.real(), r.nearest_zero.imag()};
    j["gap"] = number(r.spectral_gap);
    j["null_residual"] = number(r.null_residual);
    j["null_residual_raw"] = number(r.null_residual_raw);
    j["mass_residual"] = number(r.mass_residual);
    j["eigenvector_cosine"] = r.eigenvector_cosine >= 0.0 ? Json(r.eigenvector_cosine) : Json(nullptr);
    j["max_imag"] = number(r.max_imag);
    j["rate_scale"] = number(r.rate_scale);
    j["real_part_histogram"] = {{"edges", r.real_parts.edges}, {"counts", r.real_parts.counts}};
    j["notes"] = r.notes;
    return j;
}

Json to_json(CheckResult const& r)
{
    Json j;
    j["name"] = r.name;
    j["passed"] = r.passed;
    j["trials"] = r.trials;
    j["violations"] = r.violations;
    j["max_slack"] = number(r.max_slack);
    j["worst_slack"] = number(r.worst_slack);
    Json w = Json::object();
    for (auto const& [k, v] : r.witness) {
        w[k] = number(v);
    }
    j["witness"] = w;
    Json p = Json::object();
    for (auto const& [k, v] : r.params) {
        p[k] = number(v);
    }
    j["params"] = p;
    return j;
}

Json to_json(KernelBoundReport const& r)
{
    Json s = Json::array();
    for (auto const& x : r.samples) {
        s.push_back({{"speed", x.speed}, {"h", number(x.h)}, {"ratio", number(x.ratio)}, {"converged", x.converged},
                     {"error", x.error}});
    }
    return {{"samples", s}, {"K", number(r.K)}, {"trend_ok", r.trend_ok}, {"fitted_increase", number(r.fitted_increase)}, {"max_step_growth", number(r.max_step_growth)}};
}

} // namespace gbk
