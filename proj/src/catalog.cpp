#include "qg/catalog.hpp"

#include <cmath>
#include <map>

namespace qg {

namespace {

int as_count(double x, const char* what) {
    int n = static_cast<int>(std::lround(x));
    if (std::abs(x - n) > 1e-9 || n < 0)
        throw ValidationError(std::string(what) + " must be a nonnegative integer");
    return n;
}

std::vector<double> expand_lengths(const std::vector<double>& lengths, size_t n_edges) {
    std::vector<double> out(n_edges, 1.0);
    if (lengths.empty()) return out;
    if (lengths.size() == 1) {
        out.assign(n_edges, lengths[0]);
        return out;
    }
    if (lengths.size() != n_edges)
        throw ValidationError("lengths must have 1 or #edges entries");
    return lengths;
}

MetricGraph from_adjacency(const std::vector<std::pair<int, int>>& adj, int nv,
                           const std::vector<double>& params,
                           const std::vector<double>& lengths) {
    std::vector<std::string> verts;
    for (int i = 0; i < nv; ++i) verts.push_back("v" + std::to_string(i));
    auto len = expand_lengths(lengths, adj.size());
    std::vector<Edge> edges;
    for (size_t i = 0; i < adj.size(); ++i)
        edges.push_back({"e" + std::to_string(i + 1), adj[i].first, adj[i].second, len[i]});
    std::map<std::string, int> leads;
    if (params.empty()) {
        leads["v0"] = 1;
    } else {
        if (params.size() > static_cast<size_t>(nv))
            throw ValidationError("more lead counts than vertices");
        for (size_t i = 0; i < params.size(); ++i) {
            int c = as_count(params[i], "lead count");
            if (c > 0) leads[verts[i]] = c;
        }
    }
    return MetricGraph::make(verts, edges, leads);
}

} // namespace

MetricGraph catalog(const std::string& name, const std::vector<double>& params,
                    const std::vector<double>& lengths) {
    if (name == "star") {
        if (params.size() != 2) throw ValidationError("star expects params {l, N}");
        double l = params[0];
        int N = as_count(params[1], "lead count N");
        if (N < 1) throw ValidationError("star needs N >= 1 leads");
        return MetricGraph::make({"c", "p"}, {{"e1", 0, 1, l}}, {{"c", N}});
    }
    if (name == "interval_Gnn") {
        if (params.size() != 3) throw ValidationError("interval_Gnn expects params {l, N, N'}");
        double l = params[0];
        int N = as_count(params[1], "lead count N");
        int N2 = as_count(params[2], "lead count N'");
        if (N < 1 || N2 < 1) throw ValidationError("interval_Gnn needs N, N' >= 1");
        return MetricGraph::make({"v", "w"}, {{"e1", 0, 1, l}}, {{"v", N}, {"w", N2}});
    }
    if (name == "Y") {
        if (params.size() != 2) throw ValidationError("Y expects params {l, L}");
        return MetricGraph::make({"c", "p", "q"},
                                 {{"e1", 0, 1, params[0]}, {"e2", 0, 2, params[1]}},
                                 {{"c", 1}});
    }
    if (name == "circular") {
        if (params.empty()) throw ValidationError("circular expects params {N_1,..,N_p}");
        int p = static_cast<int>(params.size());
        auto len = expand_lengths(lengths, p);
        std::vector<std::string> verts;
        std::map<std::string, int> leads;
        for (int i = 0; i < p; ++i) {
            verts.push_back("v" + std::to_string(i));
            int c = as_count(params[i], "lead count");
            if (c < 1) throw ValidationError("circular needs every N_i >= 1");
            leads[verts[i]] = c;
        }
        std::vector<Edge> edges;
        for (int i = 0; i < p; ++i)
            edges.push_back({"e" + std::to_string(i + 1), i, (i + 1) % p, len[i]});
        return MetricGraph::make(verts, edges, leads);
    }
    if (name == "tetrahedron") {
        std::vector<std::pair<int, int>> adj;
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j) adj.push_back({i, j});
        return from_adjacency(adj, 4, params, lengths);
    }
    if (name == "cube") {
        std::vector<std::pair<int, int>> adj;
        for (int i = 0; i < 8; ++i)
            for (int b = 0; b < 3; ++b) {
                int j = i ^ (1 << b);
                if (i < j) adj.push_back({i, j});
            }
        return from_adjacency(adj, 8, params, lengths);
    }
    if (name == "petersen") {
        std::vector<std::pair<int, int>> adj;
        for (int i = 0; i < 5; ++i) adj.push_back({i, (i + 1) % 5});       // outer cycle
        for (int i = 0; i < 5; ++i) adj.push_back({5 + i, 5 + (i + 2) % 5}); // inner star
        for (int i = 0; i < 5; ++i) adj.push_back({i, 5 + i});             // spokes
        return from_adjacency(adj, 10, params, lengths);
    }
    if (name == "dodecahedron") {
        // generalized Petersen graph GP(10,2)
        std::vector<std::pair<int, int>> adj;
        for (int i = 0; i < 10; ++i) adj.push_back({i, (i + 1) % 10});
        for (int i = 0; i < 10; ++i) adj.push_back({10 + i, 10 + (i + 2) % 10});
        for (int i = 0; i < 10; ++i) adj.push_back({i, 10 + i});
        return from_adjacency(adj, 20, params, lengths);
    }
    throw ValidationError("unknown catalog graph \"" + name + "\"");
}

const std::vector<std::string>& catalog_names() {
    static const std::vector<std::string> names = {
        "star", "interval_Gnn", "Y", "circular",
        "tetrahedron", "cube", "petersen", "dodecahedron"};
    return names;
}

} // namespace qg
