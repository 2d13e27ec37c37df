#pragma once

#include "gbk/dsmc.hpp"
#include "gbk/operators.hpp"
#include "gbk/steady_state.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gbk {

/// Invalid configuration or usage; the CLI maps it to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Flat `key = value` configuration with `#` comments.
/// Every getter records the value it resolved, defaults included.
class Config {
public:
    static Config parse(std::string_view text, std::string const& source = "<string>");
    static Config load(std::filesystem::path const& path);

    void set(std::string const& key, std::string const& value);
    /// Applies a `key=value` override.
    void set_assignment(std::string const& assignment);
    [[nodiscard]] bool has(std::string const& key) const { return values_.count(key) != 0; }

    double get_double(std::string const& key, double fallback) const;
    long long get_int(std::string const& key, long long fallback) const;
    std::uint64_t get_u64(std::string const& key, std::uint64_t fallback) const;
    bool get_bool(std::string const& key, bool fallback) const;
    std::string get_string(std::string const& key, std::string const& fallback) const;
    std::vector<double> get_list(std::string const& key, std::vector<double> const& fallback) const;
    Vec3 get_vec3(std::string const& key, Vec3 const& fallback) const;

    /// Throws ConfigError naming the first key outside `allowed`.
    void require_known(std::set<std::string> const& allowed) const;

    [[nodiscard]] std::map<std::string, std::string> const& raw() const noexcept { return values_; }
    /// Keys read so far with the values actually used.
    [[nodiscard]] std::map<std::string, std::string> const& resolved() const noexcept { return resolved_; }

private:
    std::optional<std::string> lookup(std::string const& key) const;

    std::map<std::string, std::string> values_;
    mutable std::map<std::string, std::string> resolved_;
    std::string source_{"<string>"};
};

std::string format_double(double x);

std::set<std::string> sim_config_keys();
SimConfig sim_config_from(Config const& c);

std::set<std::string> steady_option_keys();
SteadyOptions steady_options_from(Config const& c);

/// Keys weight_q, weight_b, weight_beta.
std::set<std::string> weight_keys();
WeightParams weight_from(Config const& c, WeightParams const& fallback = {});

std::set<std::string> split_keys();
SplitParams split_from(Config const& c);

struct GridParams {
    int n{13};
    double R{0.0}; // 0 means 6 sqrt(theta_sharp)
};
std::set<std::string> grid_keys();
GridParams grid_from(Config const& c);
VelocityGrid make_grid(GridParams const& g, double e, BathParams const& bath);

} // namespace gbk
