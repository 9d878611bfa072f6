#ifndef QG_GRAPH_IO_HPP
#define QG_GRAPH_IO_HPP

#include <string>

#include "qg/graph.hpp"

namespace qg {

/// Parses a graph document:
///
/// {
///   "vertices": ["v1", "v2"],
///   "edges": [{"id": "e1", "from": "v1", "to": "v2", "length": 1.0}],
///   "leads": [{"vertex": "v1", "count": 3}]
/// }
///
/// Throws ValidationError with a distinct message per failure mode
/// (malformed document, nonpositive length, unknown vertex, duplicate id,
/// disconnected graph).
MetricGraph load_graph(const std::string& text);

/// Reads the file and parses it.
MetricGraph load_graph_file(const std::string& path);

/// Serializes back to the document schema.
std::string graph_to_json(const MetricGraph& g);

} // namespace qg

#endif
