#include "mgm/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "mgm/util.hpp"

namespace mgm {

namespace {

constexpr double kEdgeEps = 1e-8;

struct Pick {
    double weight = 0.0;
    int sign = +1;
    bool present = false;
};

// reduce a group of raw entries to (weight, sign); `use` masks baseline slots
Pick reduce_group(const std::vector<double>& values, const std::vector<bool>& use,
                  EdgeAggregation mode) {
    Pick pick;
    double max_abs = 0.0, sum_abs = 0.0, max_val = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (!use[k] || std::abs(values[k]) <= kEdgeEps) continue;
        pick.present = true;
        sum_abs += std::abs(values[k]);
        if (std::abs(values[k]) > max_abs) {
            max_abs = std::abs(values[k]);
            max_val = values[k];
        }
    }
    if (!pick.present) return pick;
    pick.weight = mode == EdgeAggregation::MaxAbs ? max_abs : sum_abs;
    pick.sign = max_val >= 0.0 ? +1 : -1;
    return pick;
}

}  // namespace

int MixedGraph::find_node(const std::string& name) const {
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i].name == name) return static_cast<int>(i);
    return -1;
}

MixedGraph aggregate(const Theta& theta, const VariableSchema& schema, EdgeAggregation mode) {
    const auto& sh = theta.shape();
    if (!sh.matches(schema)) throw DataError("theta shape does not match schema");
    MixedGraph g;
    for (const auto& v : schema.variables()) g.nodes.push_back({v.name, v.category, v.kind});

    for (int s = 0; s < sh.p; ++s)
        for (int t = s + 1; t < sh.p; ++t) {
            const double b = theta.beta(s, t);
            if (std::abs(b) <= kEdgeEps) continue;
            GraphEdge e;
            e.a = schema.continuous(s).name;
            e.b = schema.continuous(t).name;
            e.weight = std::abs(b);
            e.sign = -b >= 0.0 ? +1 : -1;  // the density carries -beta x x
            e.group_values = {b};
            g.edges.push_back(std::move(e));
        }
    for (int s = 0; s < sh.p; ++s)
        for (int j = 0; j < sh.q; ++j) {
            std::vector<double> vals(sh.levels[j]);
            std::vector<bool> use(sh.levels[j]);
            for (int l = 0; l < sh.levels[j]; ++l) {
                vals[l] = theta.rho(s, j, l);
                use[l] = l != sh.baseline[j];
            }
            const Pick pick = reduce_group(vals, use, mode);
            if (!pick.present) continue;
            GraphEdge e;
            e.a = schema.continuous(s).name;
            e.b = schema.discrete(j).name;
            e.weight = pick.weight;
            e.sign = pick.sign;
            e.group_values = std::move(vals);
            g.edges.push_back(std::move(e));
        }
    for (int r = 0; r < sh.q; ++r)
        for (int j = r + 1; j < sh.q; ++j) {
            std::vector<double> vals;
            std::vector<bool> use;
            vals.reserve(sh.levels[r] * sh.levels[j]);
            for (int l = 0; l < sh.levels[r]; ++l)
                for (int m = 0; m < sh.levels[j]; ++m) {
                    vals.push_back(theta.phi(r, j, l, m));
                    use.push_back(l != sh.baseline[r] && m != sh.baseline[j]);
                }
            const Pick pick = reduce_group(vals, use, mode);
            if (!pick.present) continue;
            GraphEdge e;
            e.a = schema.discrete(r).name;
            e.b = schema.discrete(j).name;
            e.weight = pick.weight;
            e.sign = pick.sign;
            e.group_values = std::move(vals);
            g.edges.push_back(std::move(e));
        }
    return g;
}

MixedGraph neighborhood(const MixedGraph& g, const std::string& node) {
    if (g.find_node(node) < 0) throw DataError("unknown node: " + node);
    MixedGraph out;
    out.nodes.push_back(g.nodes[g.find_node(node)]);
    std::vector<GraphEdge> incident;
    for (const auto& e : g.edges)
        if (e.a == node || e.b == node) incident.push_back(e);
    std::sort(incident.begin(), incident.end(), [&](const GraphEdge& a, const GraphEdge& b) {
        if (a.weight != b.weight) return a.weight > b.weight;
        if (a.sign != b.sign) return a.sign > b.sign;  // positive before negative at ties
        const std::string& an = a.a == node ? a.b : a.a;
        const std::string& bn = b.a == node ? b.b : b.a;
        return an < bn;
    });
    int rank = 0;
    for (auto& e : incident) {
        e.rank = ++rank;
        const std::string& other = e.a == node ? e.b : e.a;
        if (out.find_node(other) < 0) out.nodes.push_back(g.nodes[g.find_node(other)]);
        out.edges.push_back(std::move(e));
    }
    return out;
}

double visual_weight(double x) {
    if (x < 0.0) throw UsageError("visual_weight requires a nonnegative weight");
    return std::log1p(10.0 * x);
}

namespace {

nlohmann::ordered_json graph_to_json(const MixedGraph& g) {
    nlohmann::ordered_json doc;
    doc["nodes"] = nlohmann::ordered_json::array();
    for (const auto& n : g.nodes)
        doc["nodes"].push_back({{"name", n.name},
                                {"category", to_string(n.category)},
                                {"kind", n.kind == VarKind::Continuous ? "continuous" : "discrete"}});
    doc["edges"] = nlohmann::ordered_json::array();
    for (const auto& e : g.edges) {
        nlohmann::ordered_json je = {{"a", e.a},
                                     {"b", e.b},
                                     {"weight", e.weight},
                                     {"sign", e.sign > 0 ? "+" : "-"},
                                     {"visual_weight", visual_weight(e.weight)},
                                     {"group_values", e.group_values}};
        if (e.rank > 0) je["rank"] = e.rank;
        doc["edges"].push_back(std::move(je));
    }
    return doc;
}

void write_graphml(const MixedGraph& g, std::ostream& out) {
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
        << "  <key id=\"category\" for=\"node\" attr.name=\"category\" attr.type=\"string\"/>\n"
        << "  <key id=\"kind\" for=\"node\" attr.name=\"kind\" attr.type=\"string\"/>\n"
        << "  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n"
        << "  <key id=\"sign\" for=\"edge\" attr.name=\"sign\" attr.type=\"string\"/>\n"
        << "  <key id=\"visual_weight\" for=\"edge\" attr.name=\"visual_weight\" attr.type=\"double\"/>\n"
        << "  <graph id=\"mgm\" edgedefault=\"undirected\">\n";
    for (const auto& n : g.nodes)
        out << "    <node id=\"" << n.name << "\"><data key=\"category\">" << to_string(n.category)
            << "</data><data key=\"kind\">"
            << (n.kind == VarKind::Continuous ? "continuous" : "discrete") << "</data></node>\n";
    for (const auto& e : g.edges)
        out << "    <edge source=\"" << e.a << "\" target=\"" << e.b << "\"><data key=\"weight\">"
            << format_double(e.weight) << "</data><data key=\"sign\">" << (e.sign > 0 ? "+" : "-")
            << "</data><data key=\"visual_weight\">" << format_double(visual_weight(e.weight))
            << "</data></edge>\n";
    out << "  </graph>\n</graphml>\n";
}

void write_dot(const MixedGraph& g, std::ostream& out) {
    out << "graph mgm {\n";
    for (const auto& n : g.nodes)
        out << "  \"" << n.name << "\" [shape="
            << (n.kind == VarKind::Continuous ? "circle" : "rectangle") << ", category=\""
            << to_string(n.category) << "\"];\n";
    for (const auto& e : g.edges)
        out << "  \"" << e.a << "\" -- \"" << e.b << "\" [weight=" << format_double(e.weight)
            << ", color=" << (e.sign > 0 ? "blue" : "red")
            << ", penwidth=" << format_double(visual_weight(e.weight)) << "];\n";
    out << "}\n";
}

}  // namespace

void export_graph(const MixedGraph& g, GraphFormat format, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write graph file: " + path);
    switch (format) {
        case GraphFormat::Json:
            out << graph_to_json(g).dump(2) << '\n';
            break;
        case GraphFormat::GraphMl:
            write_graphml(g, out);
            break;
        case GraphFormat::Dot:
            write_dot(g, out);
            break;
    }
    if (!out) throw DataError("failed while writing graph file: " + path);
}

MixedGraph load_graph_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open graph file: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("bad graph JSON " + path + ": " + e.what());
    }
    MixedGraph g;
    for (const auto& jn : doc.at("nodes"))
        g.nodes.push_back({jn.at("name").get<std::string>(),
                           category_from_string(jn.at("category").get<std::string>()),
                           jn.at("kind").get<std::string>() == "continuous" ? VarKind::Continuous
                                                                            : VarKind::Discrete});
    for (const auto& je : doc.at("edges")) {
        GraphEdge e;
        e.a = je.at("a").get<std::string>();
        e.b = je.at("b").get<std::string>();
        e.weight = je.at("weight").get<double>();
        e.sign = je.at("sign").get<std::string>() == "+" ? +1 : -1;
        e.group_values = je.at("group_values").get<std::vector<double>>();
        if (je.contains("rank")) e.rank = je.at("rank").get<int>();
        g.edges.push_back(std::move(e));
    }
    return g;
}

}  // namespace mgm
