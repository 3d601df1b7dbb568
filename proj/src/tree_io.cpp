#include "srt/tree_io.hpp"

#include <fstream>
#include <ostream>

#include "srt/errors.hpp"

namespace srt {

using nlohmann::json;

json tree_to_json(const MetricTree& t) {
  json nodes = json::array();
  for (std::size_t v = 0; v < t.size(); ++v) {
    const auto id = static_cast<NodeId>(v);
    json node = {{"id", id},
                 {"parent", id == t.root() ? json(nullptr) : json(t.parent(id))},
                 {"edge_len", t.edge_len(id)}};
    if (t.junction(id)) node["junction"] = true;
    nodes.push_back(std::move(node));
  }
  json j = {{"format", "rtree-v1"}, {"nodes", std::move(nodes)}, {"root", t.root()}};
  j["marked"] = t.marked() ? json(*t.marked()) : json(nullptr);
  if (t.has_mass()) {
    json masses = json::object();
    for (std::size_t v = 0; v < t.size(); ++v)
      if (t.mass(static_cast<NodeId>(v)) != 0.0) masses[std::to_string(v)] = t.mass(static_cast<NodeId>(v));
    j["leaf_mass"] = std::move(masses);
    if (t.mass_total() != 1.0) j["mass_total"] = t.mass_total();
  } else {
    j["leaf_mass"] = nullptr;
  }
  if (t.labels().empty()) {
    j["labels"] = nullptr;
  } else {
    json labels = json::object();
    for (const auto& [id, text] : t.labels()) labels[std::to_string(id)] = text;
    j["labels"] = std::move(labels);
  }
  return j;
}

namespace {

NodeId parse_id(const std::string& key) {
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(key, &used);
  } catch (const std::exception&) {
    throw DomainError("rtree-v1: bad node id key '" + key + "'");
  }
  if (used != key.size()) throw DomainError("rtree-v1: bad node id key '" + key + "'");
  return static_cast<NodeId>(v);
}

}  // namespace

MetricTree tree_from_json(const json& j) {
  try {
    if (!j.is_object() || j.value("format", "") != "rtree-v1")
      throw DomainError("rtree-v1: missing or wrong format tag");
    const auto& nodes = j.at("nodes");
    const auto n = nodes.size();
    std::vector<const json*> by_id(n, nullptr);
    for (const auto& node : nodes) {
      const auto id = node.at("id").get<long>();
      if (id < 0 || static_cast<std::size_t>(id) >= n || by_id[id])
        throw DomainError("rtree-v1: node ids must be exactly 0..n-1");
      by_id[id] = &node;
    }
    TreeBuilder b;
    for (std::size_t v = 0; v < n; ++v) {
      const json& node = *by_id[v];
      const json& p = node.at("parent");
      b.add_node(p.is_null() ? kNoNode : p.get<NodeId>(), node.at("edge_len").get<double>(),
                 node.value("junction", false));
    }
    b.set_root(j.at("root").get<NodeId>());
    if (j.contains("marked") && !j["marked"].is_null()) b.set_marked(j["marked"].get<NodeId>());
    if (j.contains("leaf_mass") && !j["leaf_mass"].is_null()) {
      for (const auto& [key, value] : j["leaf_mass"].items()) {
        const NodeId id = parse_id(key);
        if (id < 0 || static_cast<std::size_t>(id) >= n) throw DomainError("rtree-v1: leaf_mass id out of range");
        b.set_mass(id, value.get<double>());
      }
      b.set_mass_total(j.value("mass_total", 1.0));
    }
    if (j.contains("labels") && !j["labels"].is_null())
      for (const auto& [key, value] : j["labels"].items()) b.set_label(parse_id(key), value.get<std::string>());
    return std::move(b).build();
  } catch (const json::exception& e) {
    throw DomainError(std::string("rtree-v1: ") + e.what());
  }
}

void write_tree(std::ostream& os, const MetricTree& t) { os << tree_to_json(t).dump(1) << '\n'; }

MetricTree read_tree_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open tree file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DomainError("tree file " + path + ": " + e.what());
  }
  return tree_from_json(j);
}

}  // namespace srt
