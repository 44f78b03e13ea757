#pragma once

#include <minmaxdelay/instance.hpp>

#include <json.hpp>

#include <stdexcept>
#include <string>

namespace mmd {

// Raised when an input document cannot be understood. The message names
// the offending field so users can fix the file.
struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

using ordered_json = nlohmann::ordered_json;

inline const ordered_json& field(const ordered_json& obj, const std::string& key, const std::string& where) {
  if (!obj.is_object()) throw ParseError(where + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(where + ": missing field '" + key + "'");
  return *it;
}

inline std::string string_field(const ordered_json& obj, const std::string& key, const std::string& where) {
  const auto& v = field(obj, key, where);
  if (!v.is_string()) throw ParseError(where + "." + key + ": expected a string");
  return v.get<std::string>();
}

inline std::int64_t int_field(const ordered_json& obj, const std::string& key, const std::string& where) {
  const auto& v = field(obj, key, where);
  if (!v.is_number_integer()) throw ParseError(where + "." + key + ": expected an integer");
  return v.get<std::int64_t>();
}

// Rationals appear either as a JSON integer or as a "p/q" string.
inline Rational rational_field(const ordered_json& obj, const std::string& key, const std::string& where) {
  const auto& v = field(obj, key, where);
  if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
  if (v.is_string()) {
    if (auto r = Rational::parse(v.get<std::string>())) return *r;
    throw ParseError(where + "." + key + ": cannot parse rational '" + v.get<std::string>() + "'");
  }
  throw ParseError(where + "." + key + ": expected an integer or a 'p/q' string");
}

// Integers write as JSON numbers, everything else as "p/q" strings.
inline ordered_json rational_json(const Rational& r) {
  if (r.is_integer() && r.numerator().fits_slong_p())
    return ordered_json(r.to_int64());
  return ordered_json(r.str());
}

}  // namespace detail

inline GraphInstance read_instance(const std::string& text) {
  detail::ordered_json doc;
  try {
    doc = detail::ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("not valid JSON: ") + e.what());
  }
  GraphInstance g;
  const auto& nodes = detail::field(doc, "nodes", "instance");
  if (!nodes.is_array()) throw ParseError("instance.nodes: expected an array");
  for (const auto& n : nodes) {
    if (!n.is_string()) throw ParseError("instance.nodes: expected strings");
    g.nodes.push_back(n.get<std::string>());
  }
  const auto& edges = detail::field(doc, "edges", "instance");
  if (!edges.is_array()) throw ParseError("instance.edges: expected an array");
  int i = 0;
  for (const auto& e : edges) {
    std::string where = "edges[" + std::to_string(i++) + "]";
    Edge edge;
    edge.id = detail::string_field(e, "id", where);
    edge.tail = detail::string_field(e, "tail", where);
    edge.head = detail::string_field(e, "head", where);
    edge.capacity = detail::int_field(e, "capacity", where);
    edge.delay = detail::int_field(e, "delay", where);
    g.edges.push_back(std::move(edge));
  }
  g.source = detail::string_field(doc, "source", "instance");
  g.sink = detail::string_field(doc, "sink", "instance");
  g.rate = detail::rational_field(doc, "rate", "instance");
  return g;
}

inline std::string write_instance(const GraphInstance& g) {
  detail::ordered_json doc;
  doc["nodes"] = g.nodes;
  doc["edges"] = detail::ordered_json::array();
  for (const auto& e : g.edges) {
    detail::ordered_json je;
    je["id"] = e.id;
    je["tail"] = e.tail;
    je["head"] = e.head;
    je["capacity"] = e.capacity;
    je["delay"] = e.delay;
    doc["edges"].push_back(std::move(je));
  }
  doc["source"] = g.source;
  doc["sink"] = g.sink;
  doc["rate"] = detail::rational_json(g.rate);
  return doc.dump(2) + "\n";
}

// Flow documents list each carrying path with its rate and delay, plus the
// two headline aggregates. `g` supplies the per-path delays.
inline detail::ordered_json flow_json(const GraphInstance& g, const PathFlow& flow) {
  detail::ordered_json doc;
  doc["paths"] = detail::ordered_json::array();
  for (const auto& p : flow.paths) {
    detail::ordered_json jp;
    jp["path"] = p.edges;
    jp["rate"] = detail::rational_json(p.rate);
    jp["delay"] = path_delay(g, p.edges);
    doc["paths"].push_back(std::move(jp));
  }
  if (!flow.paths.empty()) doc["max_delay"] = max_delay(g, flow);
  doc["total_rate"] = detail::rational_json(flow.total_rate());
  return doc;
}

inline std::string write_flow(const GraphInstance& g, const PathFlow& flow) {
  return flow_json(g, flow).dump(2) + "\n";
}

inline PathFlow read_flow(const std::string& text) {
  detail::ordered_json doc;
  try {
    doc = detail::ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("not valid JSON: ") + e.what());
  }
  PathFlow flow;
  const auto& paths = detail::field(doc, "paths", "flow");
  if (!paths.is_array()) throw ParseError("flow.paths: expected an array");
  int i = 0;
  for (const auto& p : paths) {
    std::string where = "paths[" + std::to_string(i++) + "]";
    const auto& ids = detail::field(p, "path", where);
    if (!ids.is_array()) throw ParseError(where + ".path: expected an array");
    FlowPath fp;
    for (const auto& id : ids) {
      if (!id.is_string()) throw ParseError(where + ".path: expected edge id strings");
      fp.edges.push_back(id.get<std::string>());
    }
    fp.rate = detail::rational_field(p, "rate", where);
    flow.paths.push_back(std::move(fp));
  }
  return flow;
}

}  // namespace mmd
