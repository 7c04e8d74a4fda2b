#pragma once

#include <compare>
#include <span>
#include <string>
#include <vector>

#include "cogtrace/corpus.hpp"
#include "cogtrace/relations.hpp"
#include "cogtrace/taxonomy.hpp"

namespace cogtrace {

struct EdgeKey {
    Element src;
    Element dst;
    RelationKind kind;

    auto operator<=>(const EdgeKey&) const = default;
};

struct GraphNode {
    Element element;
    double weight = 0.0;         // NPMI(element, success) once weighted
    bool weight_flagged = false; // true when the table had no entry
    int64_t first_offset = 0;    // start of the element's earliest qualifying span
    int support = 0;             // qualifying spans of this element in the trace
};

struct GraphEdge {
    EdgeKey key;
    double weight = 0.0;         // NPMI(edge, success) once weighted
    bool weight_flagged = false;
    int support = 0;             // classified span relations collapsed into this edge
};

// Per-trace heterogeneous transition graph. Nodes are cognitive elements;
// edges carry one of the three relation kinds. PARALLEL edges are stored
// directed (canonical span order) but read as symmetric.
struct ReasoningGraph {
    std::string trace_id;
    std::vector<GraphNode> nodes;  // sorted by element ordinal
    std::vector<GraphEdge> edges;  // sorted by EdgeKey
    bool weighted = false;

    const GraphNode* find_node(Element e) const;
    const GraphEdge* find_edge(const EdgeKey& key) const;
    bool contains_edge(const EdgeKey& key) const { return find_edge(key) != nullptr; }
};

// Keeps, for each source span, only the NEXT relation to the earliest
// non-overlapping target (target.start >= source.end, ties by normalized
// order). NEXT relations to overlapping targets and all PARALLEL/CONTAINS
// relations pass through unchanged. Idempotent; output order preserves input.
std::vector<SpanRelation> refine_next_edges(const std::vector<SpanRelation>& relations);

// Span filtering, pairwise classification, refinement, and element-level
// deduplication. Same-element relations are dropped (no self-loops).
ReasoningGraph build_trace_graph(const Trace& trace, const RelationConfig& cfg);

// Graphs for every trace in the view, in view order.
std::vector<ReasoningGraph> build_graphs(const CorpusView& view, const RelationConfig& cfg,
                                         int jobs = 1);

struct AssociationTable;  // stats.hpp

// Copies NPMI weights from the table onto nodes and edges. Entries missing
// from the table get weight 0 and a flag.
ReasoningGraph weight_graph(ReasoningGraph graph, const AssociationTable& table);

// Node-link JSON serialization; byte-stable for identical graphs.
std::string graph_to_json(const ReasoningGraph& graph);
ReasoningGraph graph_from_json(const std::string& text);

// DOT export: node label = element id, edge style keyed by relation kind
// (NEXT solid, CONTAINS dashed, PARALLEL dotted), weights as labels.
std::string graph_to_dot(const ReasoningGraph& graph);

}  // namespace cogtrace
