#ifndef QG_GRAPH_HPP
#define QG_GRAPH_HPP

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace qg {

/// Input or model validation failure (CLI exit code 1).
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerical failure that survived all configured retries (CLI exit code 2).
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

struct Edge {
    std::string id;
    int from = -1;
    int to = -1;
    double length = 0.0;
};

/// A finite metric graph with leads: vertices, weighted edges (loops and
/// parallel edges allowed) and a number of semi-infinite leads per vertex.
/// Immutable after construction; safe to share across threads.
class MetricGraph {
public:
    /// Validates and builds. Throws ValidationError on nonpositive length,
    /// duplicate ids, unknown vertex references or a disconnected graph.
    static MetricGraph make(std::vector<std::string> vertices,
                            std::vector<Edge> edges,
                            std::map<std::string, int> leads);

    int num_vertices() const { return static_cast<int>(vertices_.size()); }
    int num_edges() const { return static_cast<int>(edges_.size()); }
    int num_leads() const { return total_leads_; }

    const std::vector<std::string>& vertex_names() const { return vertices_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const Edge& edge(int i) const { return edges_.at(i); }

    /// Lead count n_v at vertex v (0 if none).
    int lead_count(int v) const { return lead_count_.at(v); }
    /// Vertices with at least one lead, ascending.
    const std::vector<int>& marked_vertices() const { return v0_; }

    /// Edge endpoints incident to v (a loop counts twice) plus lead count.
    int degree(int v) const;
    /// Edge endpoints only.
    int edge_degree(int v) const;

    /// Sum of edge lengths |L|.
    double total_length() const;

    int vertex_index(const std::string& name) const;

    /// Same graph with new edge lengths (input edge order).
    MetricGraph with_lengths(const std::vector<double>& lengths) const;

    std::vector<double> edge_lengths() const;

private:
    MetricGraph() = default;
    std::vector<std::string> vertices_;
    std::vector<Edge> edges_;
    std::vector<int> lead_count_;
    std::vector<int> v0_;
    int total_leads_ = 0;
};

} // namespace qg

#endif
