#include "qg/graph_io.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace qg {

using nlohmann::ordered_json;

MetricGraph load_graph(const std::string& text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const std::exception& e) {
        throw ValidationError(std::string("graph document parse error: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("vertices") || !doc.contains("edges"))
        throw ValidationError("graph document must contain \"vertices\" and \"edges\"");

    std::vector<std::string> verts;
    std::map<std::string, int> index;
    for (const auto& v : doc["vertices"]) {
        if (!v.is_string()) throw ValidationError("vertex ids must be strings");
        verts.push_back(v.get<std::string>());
        index.emplace(verts.back(), static_cast<int>(verts.size()) - 1);
    }

    auto vertex_of = [&](const ordered_json& j, const char* field) {
        if (!j.contains(field) || !j[field].is_string())
            throw ValidationError(std::string("edge record missing string field \"") + field + "\"");
        auto it = index.find(j[field].get<std::string>());
        if (it == index.end())
            throw ValidationError("edge references unknown vertex \"" +
                                  j[field].get<std::string>() + "\"");
        return it->second;
    };

    std::vector<Edge> edges;
    for (const auto& je : doc["edges"]) {
        Edge e;
        if (!je.contains("id") || !je["id"].is_string())
            throw ValidationError("edge record missing string field \"id\"");
        e.id = je["id"].get<std::string>();
        e.from = vertex_of(je, "from");
        e.to = vertex_of(je, "to");
        if (!je.contains("length") || !je["length"].is_number())
            throw ValidationError("edge \"" + e.id + "\" missing numeric \"length\"");
        e.length = je["length"].get<double>();
        edges.push_back(e);
    }

    std::map<std::string, int> leads;
    if (doc.contains("leads")) {
        for (const auto& jl : doc["leads"]) {
            if (!jl.contains("vertex") || !jl["vertex"].is_string() ||
                !jl.contains("count") || !jl["count"].is_number_integer())
                throw ValidationError("lead records need a string \"vertex\" and integer \"count\"");
            std::string v = jl["vertex"].get<std::string>();
            if (leads.count(v))
                throw ValidationError("duplicate lead record for vertex \"" + v + "\"");
            leads[v] = jl["count"].get<int>();
        }
    }

    return MetricGraph::make(std::move(verts), std::move(edges), std::move(leads));
}

MetricGraph load_graph_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open graph document \"" + path + "\"");
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_graph(ss.str());
}

std::string graph_to_json(const MetricGraph& g) {
    ordered_json doc;
    doc["vertices"] = g.vertex_names();
    doc["edges"] = ordered_json::array();
    for (const auto& e : g.edges()) {
        doc["edges"].push_back({{"id", e.id},
                                {"from", g.vertex_names()[e.from]},
                                {"to", g.vertex_names()[e.to]},
                                {"length", e.length}});
    }
    doc["leads"] = ordered_json::array();
    for (int v : g.marked_vertices())
        doc["leads"].push_back({{"vertex", g.vertex_names()[v]}, {"count", g.lead_count(v)}});
    return doc.dump(2);
}

} // namespace qg
