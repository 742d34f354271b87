#pragma once

#include "legible/gridworld.hpp"
#include "legible/mirror.hpp"
#include "legible/tunnel.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace legible {

/// On-disk description of a policy ensemble: member Q-table files, the
/// pursued index (-1 when chosen at evaluation time), the prior, the f/g
/// transforms, and the environment the tables were trained for.
struct EnsembleManifest {
    std::string env_kind; // "gridworld" | "tunnel"
    int grid_size = 7;
    std::vector<GridWorld::Cell> grid_goals;
    std::optional<TunnelSpec> tunnel_spec;

    std::vector<std::string> qtable_files; // relative to the manifest directory
    int pursued_index = -1;
    std::vector<double> prior;
    DistributionModel transform_f = EpsilonGreedy{0.1};
    DistributionModel transform_g = EpsilonGreedy{0.1};

    std::string to_json() const;
    static EnsembleManifest from_json(const std::string& text);
};

void save_manifest(const EnsembleManifest& m, const std::filesystem::path& file);
EnsembleManifest load_manifest(const std::filesystem::path& file);

/// Loads the referenced Q-tables and checks dimension agreement against
/// the manifest's environment. Throws on any mismatch.
PolicyEnsemble load_ensemble(const EnsembleManifest& m, const std::filesystem::path& manifest_dir,
                             std::size_t pursued_index);

} // namespace legible
