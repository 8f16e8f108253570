#include "tenkontract/order_file.hpp"

#include "tenkontract/error.hpp"

#include <fstream>
#include <sstream>

namespace tenkontract {

namespace {

// Merged labels are keyed by their qubit mask so files stay valid across runs.
nlohmann::json label_to_json(const NetworkShape& shape, Label l) {
    if (!shape.is_merged(l)) return l;
    std::ostringstream s;
    s << "m" << std::hex << shape.qubit_mask(l);
    return s.str();
}

Label label_from_json(const NetworkShape& shape, const nlohmann::json& j) {
    if (j.is_number_integer()) return j.get<Label>();
    const auto text = j.get<std::string>();
    if (text.size() < 2 || text[0] != 'm') throw ParseError("bad label '" + text + "' in order file");
    return shape.merged_label(std::stoull(text.substr(1), nullptr, 16));
}

nlohmann::json labels_to_json(const NetworkShape& shape, const std::vector<Label>& labels) {
    nlohmann::json out = nlohmann::json::array();
    for (Label l : labels) out.push_back(label_to_json(shape, l));
    return out;
}

// Same text as EinsumSpec::to_string() except merged labels use their mask key.
std::string spec_text(const NetworkShape& shape, const EinsumSpec& spec) {
    auto join = [&](const std::vector<Label>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) s += ",";
            const auto j = label_to_json(shape, v[i]);
            s += j.is_string() ? j.get<std::string>() : std::to_string(v[i]);
        }
        return s;
    };
    return join(spec.lhs) + ";" + join(spec.rhs) + "->" + join(spec.out);
}

}  // namespace

nlohmann::json order_to_json(const ContractionTree& tree, const SliceSet& slices, const ScoreParams& params) {
    const auto& shape = tree.shape();
    nlohmann::json leaves = nlohmann::json::array();
    for (std::size_t i = 0; i < tree.leaf_count(); ++i) leaves.push_back(i);
    nlohmann::json steps = nlohmann::json::array();
    for (std::size_t i = 0; i < tree.step_count(); ++i) {
        const int id = tree.step_node(i);
        const auto& nd = tree.node(id);
        const auto cost = tree.node_cost(id, params.model);
        steps.push_back({{"lhs", nd.left},
                         {"rhs", nd.right},
                         {"out", id},
                         {"spec", spec_text(shape, tree.spec(id))},
                         {"Tcc", cost.tcc},
                         {"Tmc", cost.tmc}});
    }
    nlohmann::json pins = nlohmann::json::array();
    for (std::size_t i = 0; i < tree.node_count(); ++i) {
        const auto& nd = tree.node(static_cast<int>(i));
        if (nd.pinned) pins.push_back({{"node", i}, {"labels", labels_to_json(shape, nd.labels)}});
    }
    return {{"leaves", leaves},
            {"steps", steps},
            {"pins", pins},
            {"slices", slices.bonds},
            {"score", tree_score(tree, params)},
            {"params",
             {{"alpha", params.alpha},
              {"beta", params.beta},
              {"log_base", params.log_base},
              {"balance", params.balance.enabled},
              {"balance_weight", params.balance.weight}}}};
}

LoadedOrder order_from_json(const nlohmann::json& doc, const TensorNetwork& net,
                            std::shared_ptr<const ConfigTableCache> configs) {
    try {
        TensorNetwork sliced = net;
        const auto slice_ids = doc.value("slices", std::vector<Label>{});
        for (Label l : slice_ids) {
            auto it = sliced.bonds.find(l);
            if (it == sliced.bonds.end() || it->second.open) {
                throw ValidationError("order file slices invalid bond " + std::to_string(l));
            }
            it->second.sliced = true;
        }
        if (doc.at("leaves").size() != net.tensors.size()) {
            throw ValidationError("order file covers " + std::to_string(doc.at("leaves").size()) +
                                  " tensors, network has " + std::to_string(net.tensors.size()));
        }
        auto shape = std::make_shared<const NetworkShape>(sliced, std::move(configs));
        std::vector<std::pair<int, int>> steps;
        for (const auto& s : doc.at("steps")) steps.emplace_back(s.at("lhs").get<int>(), s.at("rhs").get<int>());
        ContractionTree tree(shape, steps);
        if (doc.contains("pins")) {
            for (const auto& p : doc.at("pins")) {
                std::vector<Label> labels;
                for (const auto& l : p.at("labels")) labels.push_back(label_from_json(*shape, l));
                tree.pin_order(p.at("node").get<int>(), std::move(labels));
            }
            tree.reannotate();
        }
        tree.canonicalize();
        return {std::move(tree), slice_set_of(sliced, slice_ids)};
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("order file: ") + e.what());
    }
}

nlohmann::json read_json_file(const std::string& path) {
    const std::string text = read_text_file(path);
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("'" + path + "': " + e.what());
    }
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write '" + path + "'");
    out << text;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace tenkontract
