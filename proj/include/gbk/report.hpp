#pragma once

#include "gbk/carleman.hpp"
#include "gbk/config.hpp"
#include "gbk/diagnostics.hpp"
#include "gbk/inequalities.hpp"
#include "gbk/spectrum.hpp"
#include "gbk/steady_state.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace gbk {

using Json = nlohmann::json;

/// Reproducibility header written into every artifact.
struct Provenance {
    std::string command;
    std::map<std::string, std::string> config; // resolved, defaults included
    std::uint64_t seed{0};
    std::string version{GBK_VERSION};
    std::string timestamp; // UTC, ISO 8601
};

Provenance make_provenance(std::string const& command, Config const& cfg, std::uint64_t seed);

/// CSV with `#` header lines, `.` decimal and 17 significant digits.
class CsvWriter {
public:
    CsvWriter(std::ostream& out, Provenance const& prov, std::vector<std::string> const& columns);
    void row(std::vector<double> const& values);

private:
    std::ostream& out_;
    std::size_t columns_;
};

/// {"header": ..., "payload": ...} with sorted keys.
void write_json_report(std::ostream& out, Provenance const& prov, Json const& payload);

/// Artifact text with the header removed, for byte comparison of reruns.
std::string strip_header(std::string const& artifact);

std::vector<std::string> series_columns(std::vector<WeightParams> const& norms);
void write_series_csv(std::ostream& out, Provenance const& prov, std::vector<MomentRecord> const& series,
                      std::vector<WeightParams> const& norms);

/// Magic "GBKENS01", u64 N, u64 has_positions, then little-endian f64 velocity triplets and position triplets.
void write_ensemble(std::filesystem::path const& path, ParticleEnsemble const& ens);
ParticleEnsemble read_ensemble(std::filesystem::path const& path, double rho = 1.0);

/// Raw row-major f64 entries plus `<path>.json` describing the grid.
void write_matrix(std::filesystem::path const& path, OperatorMatrix const& m, Provenance const& prov);

Json to_json(Vec3 const& v);
Json to_json(RadialProfile const& p);
Json to_json(RateFit const& f);
Json to_json(SteadyStateResult const& r);
Json to_json(SpectrumReport const& r, OperatorMatrix const& m);
Json to_json(CheckResult const& r);
Json to_json(KernelBoundReport const& r);

} // namespace gbk
