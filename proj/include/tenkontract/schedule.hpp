#pragma once

#include "tenkontract/pathopt.hpp"
#include "tenkontract/precision.hpp"

#include <cstddef>

#include "json.hpp"

namespace tenkontract {

struct MixedSchedule {
    PrecisionSchedule schedule;
    double replaced_tcc_ratio = 0.0;  // share of total T_cc moved to the low setting
};

/// The k steps with the largest T_cc run at `low`, all others at `high`.
/// Accumulation is FP32 unless both settings are fp64.
[[nodiscard]] MixedSchedule schedule_from_topk(const ContractionTree& tree, std::size_t k,
                                               const PrecisionSetting& low, const PrecisionSetting& high);

[[nodiscard]] nlohmann::json schedule_to_json(const PrecisionSchedule& schedule);
[[nodiscard]] PrecisionSchedule schedule_from_json(const nlohmann::json& doc);

}  // namespace tenkontract
