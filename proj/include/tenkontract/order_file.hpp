#pragma once

#include "tenkontract/pathopt.hpp"
#include "tenkontract/slicer.hpp"

#include <memory>
#include <string>

#include "json.hpp"

namespace tenkontract {

/// JSON order file: leaves, steps with specs and costs, slices, score, params.
[[nodiscard]] nlohmann::json order_to_json(const ContractionTree& tree, const SliceSet& slices,
                                           const ScoreParams& params);

struct LoadedOrder {
    ContractionTree tree;
    SliceSet slices;
};

/// Rebuilds the tree over `net` (slices applied) including pinned label orders.
[[nodiscard]] LoadedOrder order_from_json(const nlohmann::json& doc, const TensorNetwork& net,
                                          std::shared_ptr<const ConfigTableCache> configs);

[[nodiscard]] nlohmann::json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);
[[nodiscard]] std::string read_text_file(const std::string& path);

}  // namespace tenkontract
