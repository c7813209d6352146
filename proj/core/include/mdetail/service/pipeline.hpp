#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mdetail/chains/chains.hpp"
#include "mdetail/gan/conditioning.hpp"
#include "mdetail/gan/tasks.hpp"
#include "mdetail/geometry/geometry.hpp"
#include "mdetail/scene/scene.hpp"
#include "mdetail/style/style.hpp"

namespace mdetail::service {

struct DetailOptions {
    std::uint64_t seed = 0;
    chains::ChainOptions chain;
    geometry::DetailProfile profile;
    /// Base directory for exemplar file paths in distributions.
    std::filesystem::path exemplar_dir;
};

/// Reports (building id, stage name) as a building progresses.
using ProgressFn = std::function<void(const std::string& building, const std::string& stage)>;

/// Everything needed to regenerate a building's downstream stages after a label edit.
struct BuildingState {
    scene::Building building;
    style::BuildingStyle style;
    std::vector<chains::FacadeChainResult> facades;
    std::optional<chains::RoofChainResult> roof;
    std::filesystem::path dir;
};

/// Per-block row of the stats table.
struct BlockStats {
    std::string block;
    int roofs = 0;
    int facades = 0;
    int windows = 0;
    double seconds = 0;
};

struct StatsTable {
    std::vector<BlockStats> rows;

    BlockStats totals() const;
    /// Fixed-width text table with a totals row.
    std::string to_text() const;
    std::string to_json() const;
    static StatsTable from_json(const std::string& text);
};

/// Style vectors of one building: a pure function of the seed and the building id.
style::BuildingStyle building_style(const style::StyleDistribution& dist, std::uint64_t seed, const std::string& id);

/// Runs every chain of a building and writes its outputs under `dir`.
BuildingState detail_building(const scene::Building& building, const style::BuildingStyle& style,
                              chains::NetworkSet& nets, const std::filesystem::path& dir,
                              const DetailOptions& options, const ProgressFn& progress = {});

/// Window merge, normal/material maps and geometry; rewrites the model files.
void write_building_outputs(const BuildingState& state, const DetailOptions& options);

/// Replaces the regularized boxes of one facade and re-runs only the stages
/// downstream of the regularizers. Returns the regenerated stage names.
std::vector<std::string> apply_label_edit(BuildingState& state, std::size_t facade_index,
                                          const std::vector<regularize::DetailBox>& windows,
                                          const std::vector<regularize::DetailBox>& details,
                                          chains::NetworkSet& nets, const DetailOptions& options);

/// Details the selected blocks (indices into scene.blocks) and writes
/// `<out>/<building>/...` plus `<out>/stats.json`.
StatsTable detail_scene(const scene::MassModelScene& scene, const std::vector<std::size_t>& blocks,
                        const style::StyleDistribution& dist, chains::NetworkSet& nets,
                        const std::filesystem::path& out, const DetailOptions& options,
                        const ProgressFn& progress = {}, std::map<std::string, BuildingState>* states = nullptr);

/// FNV-1a digests of every output file except timing records, keyed by relative path.
std::map<std::string, std::string> output_checksums(const std::filesystem::path& dir);
/// Digest over output_checksums.
std::string combined_checksum(const std::filesystem::path& dir);

/// Preview grid of one property: a synthetic network input and `n` outputs
/// for styles drawn from the distribution. Deterministic in `seed`.
struct Preview {
    gan::Task task = gan::Task::facade_textures;
    Image content;  ///< content channels of the input
    Image mask;
    std::optional<gan::ConditionedInput> conditioned;
    std::vector<style::StyleVector> styles;
    std::vector<Image> images;  ///< label outputs are quantized and rendered
};

/// The network that consumes a property's style vector.
gan::Task task_for_property(style::Property property);

Preview preview_samples(const style::StyleDistribution& dist, style::Property property, int n, std::uint64_t seed,
                        chains::NetworkSet& nets);

/// Encodes the first style encoder serving `property` on a base64 PNG or a file path.
style::StyleVector encode_exemplar_source(style::Property property, const std::string& exemplar,
                                          chains::NetworkSet& nets, const std::filesystem::path& base_dir = {});

std::string base64_encode(std::span<const unsigned char> bytes);
std::vector<unsigned char> base64_decode(const std::string& text);

} // namespace mdetail::service
