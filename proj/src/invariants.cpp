#include "qg/invariants.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <map>

namespace qg {

namespace {

constexpr int kInf = std::numeric_limits<int>::max();

// Unweighted BFS distance (edge count) from src to dst, optionally skipping
// one edge index. Returns kInf when unreachable.
int bfs_dist(const MetricGraph& g, int src, int dst, int skip_edge) {
    std::vector<int> dist(g.num_vertices(), kInf);
    std::deque<int> q{src};
    dist[src] = 0;
    while (!q.empty()) {
        int v = q.front();
        q.pop_front();
        if (v == dst) return dist[v];
        for (int i = 0; i < g.num_edges(); ++i) {
            if (i == skip_edge) continue;
            const Edge& e = g.edge(i);
            int w = -1;
            if (e.from == v) w = e.to;
            else if (e.to == v) w = e.from;
            else continue;
            if (dist[w] == kInf) {
                dist[w] = dist[v] + 1;
                q.push_back(w);
            }
        }
    }
    return dist[dst];
}

// Minimal number of vertices in a simple cycle of the multigraph:
// 1 for a loop, 2 for a parallel pair, else girth of the underlying
// simple graph (shortest cycle through each edge, with that edge removed).
int shortest_cycle(const MetricGraph& g) {
    int best = kInf;
    std::map<std::pair<int, int>, int> pair_count;
    for (int i = 0; i < g.num_edges(); ++i) {
        const Edge& e = g.edge(i);
        if (e.from == e.to) return 1;
        auto key = std::minmax(e.from, e.to);
        if (++pair_count[{key.first, key.second}] >= 2) best = std::min(best, 2);
    }
    for (int i = 0; i < g.num_edges(); ++i) {
        const Edge& e = g.edge(i);
        int d = bfs_dist(g, e.from, e.to, i);
        if (d != kInf && d + 1 < best) best = d + 1;
    }
    return best;
}

// Minimal edge count of a path joining two distinct degree-1 vertices of G.
int shortest_leaf_path(const MetricGraph& g) {
    std::vector<int> leaves;
    for (int v = 0; v < g.num_vertices(); ++v)
        if (g.degree(v) == 1) leaves.push_back(v);
    int best = kInf;
    for (size_t a = 0; a < leaves.size(); ++a)
        for (size_t b = a + 1; b < leaves.size(); ++b)
            best = std::min(best, bfs_dist(g, leaves[a], leaves[b], -1));
    return best;
}

} // namespace

MetricGraph suppress_degree_two(const MetricGraph& g0) {
    // Work on mutable copies; suppress one vertex at a time.
    std::vector<std::string> verts = g0.vertex_names();
    std::vector<Edge> edges = g0.edges();
    std::vector<int> leads(g0.num_vertices());
    for (int v = 0; v < g0.num_vertices(); ++v) leads[v] = g0.lead_count(v);

    bool changed = true;
    while (changed) {
        changed = false;
        for (size_t v = 0; v < verts.size(); ++v) {
            if (leads[v] != 0) continue;
            std::vector<size_t> inc;
            for (size_t i = 0; i < edges.size(); ++i) {
                if (edges[i].from == static_cast<int>(v)) inc.push_back(i);
                if (edges[i].to == static_cast<int>(v)) inc.push_back(i);
            }
            // need exactly two edge-ends belonging to two distinct edges
            if (inc.size() != 2 || inc[0] == inc[1]) continue;
            Edge e1 = edges[inc[0]], e2 = edges[inc[1]];
            int a = (e1.from == static_cast<int>(v)) ? e1.to : e1.from;
            int b = (e2.from == static_cast<int>(v)) ? e2.to : e2.from;
            Edge merged{e1.id + "+" + e2.id, a, b, e1.length + e2.length};
            edges.erase(edges.begin() + std::max(inc[0], inc[1]));
            edges.erase(edges.begin() + std::min(inc[0], inc[1]));
            edges.push_back(merged);
            // drop vertex v, reindex
            verts.erase(verts.begin() + v);
            leads.erase(leads.begin() + v);
            for (auto& e : edges) {
                if (e.from > static_cast<int>(v)) --e.from;
                if (e.to > static_cast<int>(v)) --e.to;
            }
            changed = true;
            break;
        }
    }

    std::map<std::string, int> lead_map;
    for (size_t v = 0; v < verts.size(); ++v)
        if (leads[v] > 0) lead_map[verts[v]] = leads[v];
    return MetricGraph::make(verts, edges, lead_map);
}

GraphInvariants compute_invariants(const MetricGraph& g0) {
    MetricGraph g = suppress_degree_two(g0);

    GraphInvariants inv;
    inv.total_length = g0.total_length();
    inv.v0_size = static_cast<int>(g0.marked_vertices().size());

    int cyc = shortest_cycle(g);
    int leaf = shortest_leaf_path(g);
    int gval = std::min(cyc, leaf);

    int degree_one = 0;
    for (int v = 0; v < g.num_vertices(); ++v)
        if (g.degree(v) == 1) ++degree_one;

    bool acyclic = (cyc == kInf);
    inv.graph_type = (acyclic && degree_one <= 1) ? GraphType::TypeI : GraphType::TypeII;

    if (inv.graph_type == GraphType::TypeI) {
        inv.g = std::nullopt;
        inv.d_upper = std::nullopt;
    } else {
        inv.g = gval;
        inv.d_upper = gval - 1;
    }

    // d >= 1 iff some marked vertex carries no loop (on the normalized graph)
    inv.d_lower = 0;
    for (int v : g.marked_vertices()) {
        bool has_loop = false;
        for (const auto& e : g.edges())
            if (e.from == v && e.to == v) has_loop = true;
        if (!has_loop) { inv.d_lower = 1; break; }
    }

    if (inv.d_upper)
        inv.d_conjecture = std::min(*inv.d_upper, inv.v0_size);
    else
        inv.d_conjecture = inv.v0_size;

    return inv;
}

} // namespace qg
