#pragma once

#include "gbk/kinetics.hpp"
#include "gbk/vec3.hpp"

#include <vector>

namespace gbk {

/// N particles of equal statistical weight rho / N.
struct ParticleEnsemble {
    std::vector<Vec3> velocities;
    std::vector<Vec3> positions; // empty in homogeneous mode
    double rho{1.0};

    [[nodiscard]] std::size_t size() const noexcept { return velocities.size(); }
    [[nodiscard]] bool has_positions() const noexcept { return !positions.empty(); }
    [[nodiscard]] double particle_weight() const noexcept
    {
        return rho / static_cast<double>(velocities.size());
    }
    void validate() const;
};

struct WeightedNorm {
    WeightParams weight;
    double value{0.0};
};

struct MomentRecord {
    double t{0.0};
    double mass{0.0};
    Vec3 momentum{};
    double energy{0.0};
    double temperature{0.0};
    std::vector<WeightedNorm> weighted_norms;
};

} // namespace gbk
