#pragma once

// rtree-v1 JSON encoding of MetricTree.
//
//   {"format": "rtree-v1",
//    "nodes": [{"id": 0, "parent": null, "edge_len": 0.0}, ...],
//    "root": 0, "marked": 3 | null,
//    "leaf_mass": {"3": 0.5, ...} | null,
//    "labels": {"3": "A1", ...} | null}
//
// Nodes may additionally carry "junction": true, and a tree with unnormalised
// masses carries "mass_total". Writers sort nodes by id; readers accept any
// order but require ids 0..n-1.

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "srt/metric_tree.hpp"

namespace srt {

nlohmann::json tree_to_json(const MetricTree& t);
MetricTree tree_from_json(const nlohmann::json& j);

void write_tree(std::ostream& os, const MetricTree& t);
MetricTree read_tree_file(const std::string& path);

}  // namespace srt
