#ifndef QG_INVARIANTS_HPP
#define QG_INVARIANTS_HPP

#include <optional>

#include "qg/graph.hpp"

namespace qg {

enum class GraphType { TypeI, TypeII };

/// Combinatorial invariants of a metric graph with leads. A value of
/// std::nullopt in g / d_upper means "infinite" (type I graphs).
/// d_conjecture = min(g-1, #V0) is only meaningful for type II graphs;
/// it is reported literally for type I as well.
struct GraphInvariants {
    GraphType graph_type = GraphType::TypeI;
    std::optional<int> g;        // shortest cycle, or shortest degree-1 path
    double total_length = 0.0;
    int v0_size = 0;
    int d_lower = 0;             // 1 iff some marked vertex has no loop
    std::optional<int> d_upper;  // g - 1
    std::optional<int> d_conjecture;
};

/// Classifies the graph after suppressing bare degree-2 vertices (series
/// edges merged, lengths added). Loops count as 1-vertex cycles and parallel
/// pairs as 2-vertex cycles.
GraphInvariants compute_invariants(const MetricGraph& g);

/// The degree-2 normalization itself; exposed for tests.
MetricGraph suppress_degree_two(const MetricGraph& g);

} // namespace qg

#endif
