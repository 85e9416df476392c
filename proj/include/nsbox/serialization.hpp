#pragma once

// JSON interchange for behaviors:
//   {"parties": n, "inputs": [...], "outputs": [...], "table": nested}
// where "table" nests one array level per party input (in party order), then
// one per party output, so table[x][y][a][b] is p(a,b|x,y) for two parties.

#include <vector>

#include "json.hpp"
#include "nsbox/behavior.hpp"

namespace nsbox {

namespace detail {

inline nlohmann::json nested_from_flat(const std::vector<int>& dims, std::size_t level,
                                       const std::vector<double>& flat, std::size_t& pos) {
    if (level == dims.size()) return flat[pos++];
    nlohmann::json arr = nlohmann::json::array();
    for (int i = 0; i < dims[level]; ++i) {
        arr.push_back(nested_from_flat(dims, level + 1, flat, pos));
    }
    return arr;
}

inline void flat_from_nested(const nlohmann::json& node, const std::vector<int>& dims,
                             std::size_t level, std::vector<double>& flat) {
    if (level == dims.size()) {
        if (!node.is_number()) throw ArgumentError("behavior JSON: non-numeric table entry");
        flat.push_back(node.get<double>());
        return;
    }
    if (!node.is_array() || node.size() != static_cast<std::size_t>(dims[level])) {
        throw ArgumentError("behavior JSON: table nesting does not match scenario shape");
    }
    for (const auto& child : node) flat_from_nested(child, dims, level + 1, flat);
}

}  // namespace detail

inline nlohmann::json behavior_to_json(const Behavior& b) {
    std::vector<int> dims = b.inputs_per_party();
    dims.insert(dims.end(), b.outputs_per_party().begin(), b.outputs_per_party().end());
    std::size_t pos = 0;
    nlohmann::json j;
    j["parties"] = b.parties();
    j["inputs"] = b.inputs_per_party();
    j["outputs"] = b.outputs_per_party();
    j["table"] = detail::nested_from_flat(dims, 0, b.table(), pos);
    return j;
}

inline Behavior behavior_from_json(const nlohmann::json& j) {
    for (const char* key : {"parties", "inputs", "outputs", "table"}) {
        if (!j.contains(key)) throw ArgumentError(std::string("behavior JSON: missing ") + key);
    }
    const auto inputs = j["inputs"].get<std::vector<int>>();
    const auto outputs = j["outputs"].get<std::vector<int>>();
    if (j["parties"].get<std::size_t>() != inputs.size()) {
        throw ArgumentError("behavior JSON: parties does not match inputs length");
    }
    std::vector<int> dims = inputs;
    dims.insert(dims.end(), outputs.begin(), outputs.end());
    std::vector<double> flat;
    detail::flat_from_nested(j["table"], dims, 0, flat);
    return Behavior(inputs, outputs, std::move(flat));
}

}  // namespace nsbox
