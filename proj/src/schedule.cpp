#include "tenkontract/schedule.hpp"

#include "tenkontract/engine.hpp"
#include "tenkontract/error.hpp"

namespace tenkontract {

MixedSchedule schedule_from_topk(const ContractionTree& tree, std::size_t k, const PrecisionSetting& low,
                                 const PrecisionSetting& high) {
    if (k > tree.step_count()) {
        throw ValidationError("top-k of " + std::to_string(k) + " exceeds the " + std::to_string(tree.step_count()) +
                              " contraction steps");
    }
    const bool all_fp64 = low.format == formats::fp64() && high.format == formats::fp64();
    MixedSchedule out{PrecisionSchedule(high, all_fp64 ? formats::fp64() : formats::fp32()), 0.0};
    const auto ranked = rank_steps_by_cost(tree);
    double replaced = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const int node = ranked[i];
        out.schedule.set_override(static_cast<std::size_t>(node) - tree.leaf_count(), low);
        replaced += tree.node(node).macs;
    }
    out.replaced_tcc_ratio = tree.total_macs() > 0.0 ? replaced / tree.total_macs() : 0.0;
    return out;
}

namespace {

nlohmann::json setting_to_json(const PrecisionSetting& s) {
    return {{"fmt", s.format.name}, {"mode", s.mode == SplitMode::Triple ? 3 : 1}};
}

PrecisionSetting setting_from_json(const nlohmann::json& j) {
    return {format_by_name(j.at("fmt").get<std::string>()), split_mode_from_int(j.value("mode", 1))};
}

}  // namespace

nlohmann::json schedule_to_json(const PrecisionSchedule& schedule) {
    nlohmann::json overrides = nlohmann::json::array();
    for (const auto& [step, s] : schedule.overrides()) {
        auto j = setting_to_json(s);
        j["step"] = step;
        overrides.push_back(j);
    }
    return {{"default", setting_to_json(schedule.default_setting())},
            {"accum", schedule.accumulation().name},
            {"overrides", overrides},
            {"rescale", schedule.rescale}};
}

PrecisionSchedule schedule_from_json(const nlohmann::json& doc) {
    try {
        PrecisionSchedule s(setting_from_json(doc.at("default")), format_by_name(doc.value("accum", "fp32")));
        if (doc.contains("overrides")) {
            for (const auto& o : doc.at("overrides")) s.set_override(o.at("step").get<std::size_t>(), setting_from_json(o));
        }
        s.rescale = doc.value("rescale", false);
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("schedule JSON: ") + e.what());
    }
}

}  // namespace tenkontract
