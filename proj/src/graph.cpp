#include "qg/graph.hpp"

#include <algorithm>
#include <set>

namespace qg {

MetricGraph MetricGraph::make(std::vector<std::string> vertices,
                              std::vector<Edge> edges,
                              std::map<std::string, int> leads) {
    MetricGraph g;
    if (vertices.empty())
        throw ValidationError("graph has no vertices");

    std::map<std::string, int> index;
    for (int i = 0; i < static_cast<int>(vertices.size()); ++i) {
        if (!index.emplace(vertices[i], i).second)
            throw ValidationError("duplicate vertex id \"" + vertices[i] + "\"");
    }

    std::set<std::string> edge_ids;
    for (auto& e : edges) {
        if (!edge_ids.insert(e.id).second)
            throw ValidationError("duplicate edge id \"" + e.id + "\"");
        if (!(e.length > 0.0))
            throw ValidationError("edge \"" + e.id + "\" has nonpositive length");
        if (e.from < 0 || e.from >= static_cast<int>(vertices.size()) ||
            e.to < 0 || e.to >= static_cast<int>(vertices.size()))
            throw ValidationError("edge \"" + e.id + "\" references an unknown vertex");
    }

    g.vertices_ = std::move(vertices);
    g.edges_ = std::move(edges);
    g.lead_count_.assign(g.vertices_.size(), 0);
    for (auto& [name, count] : leads) {
        auto it = index.find(name);
        if (it == index.end())
            throw ValidationError("lead attached to unknown vertex \"" + name + "\"");
        if (count < 1)
            throw ValidationError("lead count at \"" + name + "\" must be >= 1");
        g.lead_count_[it->second] = count;
        g.total_leads_ += count;
    }
    for (int v = 0; v < g.num_vertices(); ++v)
        if (g.lead_count_[v] > 0) g.v0_.push_back(v);

    // connectivity over edges (leads never connect anything)
    std::vector<std::vector<int>> adj(g.vertices_.size());
    for (auto& e : g.edges_) {
        adj[e.from].push_back(e.to);
        adj[e.to].push_back(e.from);
    }
    std::vector<char> seen(g.vertices_.size(), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (int w : adj[v])
            if (!seen[w]) { seen[w] = 1; stack.push_back(w); }
    }
    if (std::find(seen.begin(), seen.end(), 0) != seen.end())
        throw ValidationError("graph is disconnected");

    return g;
}

int MetricGraph::degree(int v) const { return edge_degree(v) + lead_count_.at(v); }

int MetricGraph::edge_degree(int v) const {
    int d = 0;
    for (const auto& e : edges_) {
        if (e.from == v) ++d;
        if (e.to == v) ++d;
    }
    return d;
}

double MetricGraph::total_length() const {
    double s = 0.0;
    for (const auto& e : edges_) s += e.length;
    return s;
}

int MetricGraph::vertex_index(const std::string& name) const {
    for (int i = 0; i < num_vertices(); ++i)
        if (vertices_[i] == name) return i;
    throw ValidationError("unknown vertex \"" + name + "\"");
}

MetricGraph MetricGraph::with_lengths(const std::vector<double>& lengths) const {
    if (lengths.size() != edges_.size())
        throw ValidationError("length vector size does not match edge count");
    MetricGraph g = *this;
    for (size_t i = 0; i < lengths.size(); ++i) {
        if (!(lengths[i] > 0.0))
            throw ValidationError("edge \"" + g.edges_[i].id + "\" has nonpositive length");
        g.edges_[i].length = lengths[i];
    }
    return g;
}

std::vector<double> MetricGraph::edge_lengths() const {
    std::vector<double> l(edges_.size());
    for (size_t i = 0; i < edges_.size(); ++i) l[i] = edges_[i].length;
    return l;
}

} // namespace qg
