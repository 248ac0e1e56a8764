#ifndef MGM_GRAPH_HPP_
#define MGM_GRAPH_HPP_

#include <string>
#include <vector>

#include "mgm/theta.hpp"

namespace mgm {

struct GraphNode {
    std::string name;
    VarCategory category = VarCategory::Other;
    VarKind kind = VarKind::Continuous;
};

struct GraphEdge {
    std::string a;
    std::string b;
    double weight = 0.0;  // > 0; sign carried separately
    int sign = +1;
    std::vector<double> group_values;  // raw parameter entries backing the edge
    int rank = 0;                      // 1-based within a neighborhood, 0 elsewhere
};

struct MixedGraph {
    std::vector<GraphNode> nodes;
    std::vector<GraphEdge> edges;

    int find_node(const std::string& name) const;  // -1 if absent
};

enum class EdgeAggregation { MaxAbs, SumAbs };

// Builds the signed weighted graph from fitted parameters. A continuous pair
// is an edge iff beta_st is nonzero, displayed with sign -beta_st so that a
// positive sign means positive association. Grouped parameters (rho vectors,
// phi blocks) aggregate over non-baseline entries.
MixedGraph aggregate(const Theta& theta, const VariableSchema& schema,
                     EdgeAggregation mode = EdgeAggregation::MaxAbs);

// Induced star: the node, its adjacent nodes, and exactly the incident
// edges, ranked by strength (|weight| descending, positive first at ties).
MixedGraph neighborhood(const MixedGraph& g, const std::string& node);

// Display transform for edge weights.
double visual_weight(double x);

enum class GraphFormat { Json, GraphMl, Dot };

void export_graph(const MixedGraph& g, GraphFormat format, const std::string& path);
MixedGraph load_graph_json(const std::string& path);

}  // namespace mgm

#endif  // MGM_GRAPH_HPP_
