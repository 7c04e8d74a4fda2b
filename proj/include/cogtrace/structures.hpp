#pragma once

#include <string>
#include <vector>

#include "cogtrace/corpus.hpp"
#include "cogtrace/stats.hpp"
#include "cogtrace/taxonomy.hpp"

namespace cogtrace {

enum class StructureKind {
    prototype,   // frequency-greedy: how models most commonly sequence elements
    successful,  // NPMI-greedy: sequences most associated with correct outcomes
};

std::string_view to_string(StructureKind kind);
StructureKind parse_structure_kind(std::string_view label);

struct StructureNode {
    Element element;
    double score = 0.0;  // presence probability (prototype) or NPMI (successful)
};

struct StructureEdge {
    Element src;
    Element dst;
    RelationKind kind = RelationKind::NEXT;
    double score = 0.0;  // edge frequency (prototype) or edge NPMI (successful)
};

// An extracted acyclic structure: a typed path grown greedily from a start
// node, at most v_max nodes. Edge i connects nodes[i] to nodes[i+1].
struct StructureGraph {
    StructureKind kind = StructureKind::prototype;
    std::vector<StructureNode> nodes;  // extraction order
    std::vector<StructureEdge> edges;  // extraction order, size = nodes.size() - 1
    int v_max = 7;
    std::string slice_descriptor;
};

struct ExtractConfig {
    int v_max = 7;             // node budget (Figure-5-style 7-node patterns)
    int min_edge_support = 2;  // candidate edges must occur in >= this many traces;
                               // 0 reproduces the paper's rule exactly
};

// Greedy forward search over edge occurrence frequencies. Start node is the
// most frequent initial element; each step follows the highest-frequency edge
// to an unvisited target. Ties: higher score, NEXT < CONTAINS < PARALLEL,
// then element ordinal.
// Throws EmptySliceError / InsufficientDataError.
StructureGraph extract_prototype(const CorpusView& slice, const AssociationTable& table,
                                 const ExtractConfig& cfg);

// Greedy search over edge NPMI. Start node is the element with maximal
// NPMI(element, success) among elements that initiate correct traces; each
// step follows the highest-NPMI edge to an unvisited target, stopping at
// v_max nodes, when no outgoing edge remains, or when every remaining
// candidate has non-positive NPMI.
// Throws EmptySliceError / NoSuccessesError / InsufficientDataError.
StructureGraph extract_successful(const CorpusView& slice, const AssociationTable& table,
                                  const ExtractConfig& cfg);

// Deterministic textual walk: a header line, one line per node, then one line
// per edge in extraction order.
std::string linearize(const StructureGraph& structure);

// Parses linearize() output back into a structure.
StructureGraph parse_structure(const std::string& text);

// DOT export mirroring the two-panel figure style.
std::string structure_to_dot(const StructureGraph& structure);

}  // namespace cogtrace
