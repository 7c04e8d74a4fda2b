#include "cogtrace/graph.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cogtrace/errors.hpp"
#include "cogtrace/stats.hpp"
#include "cogtrace/util.hpp"

namespace cogtrace {

using nlohmann::ordered_json;

const GraphNode* ReasoningGraph::find_node(Element e) const {
    for (const auto& n : nodes) {
        if (n.element == e) return &n;
    }
    return nullptr;
}

const GraphEdge* ReasoningGraph::find_edge(const EdgeKey& key) const {
    auto it = std::lower_bound(edges.begin(), edges.end(), key,
                               [](const GraphEdge& e, const EdgeKey& k) { return e.key < k; });
    if (it != edges.end() && it->key == key) return &*it;
    return nullptr;
}

std::vector<SpanRelation> refine_next_edges(const std::vector<SpanRelation>& relations) {
    // Earliest non-overlapping NEXT target per source span. Normalized order
    // makes the smallest dst_index the smallest start with the ingest
    // tie-break applied.
    std::map<size_t, size_t> keep;  // src_index -> dst_index to keep
    for (const auto& r : relations) {
        if (r.kind != RelationKind::NEXT) continue;
        if (r.dst.start < r.src.end) continue;  // overlapping target: untouched
        auto [it, inserted] = keep.emplace(r.src_index, r.dst_index);
        if (!inserted && r.dst_index < it->second) {
            it->second = r.dst_index;
        }
    }
    std::vector<SpanRelation> out;
    out.reserve(relations.size());
    for (const auto& r : relations) {
        if (r.kind == RelationKind::NEXT && r.dst.start >= r.src.end) {
            auto it = keep.find(r.src_index);
            if (it == keep.end() || it->second != r.dst_index) continue;
        }
        out.push_back(r);
    }
    return out;
}

ReasoningGraph build_trace_graph(const Trace& trace, const RelationConfig& cfg) {
    cfg.validate();
    ReasoningGraph g;
    g.trace_id = trace.trace_id;

    std::vector<Span> spans = qualifying_spans(trace, cfg.min_score);
    if (spans.empty()) return g;

    std::map<Element, GraphNode> nodes;
    for (const Span& s : spans) {
        auto [it, inserted] = nodes.try_emplace(s.element);
        GraphNode& n = it->second;
        if (inserted) {
            n.element = s.element;
            n.first_offset = s.start;
        }
        n.first_offset = std::min(n.first_offset, s.start);
        n.support += 1;
    }

    std::vector<SpanRelation> relations = refine_next_edges(classify_all_pairs(spans, cfg));

    std::map<EdgeKey, GraphEdge> edges;
    for (const auto& r : relations) {
        if (r.src.element == r.dst.element) continue;  // no self-loops
        EdgeKey key{r.src.element, r.dst.element, r.kind};
        auto [it, inserted] = edges.try_emplace(key);
        if (inserted) it->second.key = key;
        it->second.support += 1;
    }

    for (auto& [e, node] : nodes) g.nodes.push_back(node);
    for (auto& [k, edge] : edges) g.edges.push_back(edge);
    return g;
}

std::vector<ReasoningGraph> build_graphs(const CorpusView& view, const RelationConfig& cfg,
                                         int jobs) {
    std::vector<ReasoningGraph> graphs(view.size());
    parallel_for_index(view.size(), jobs,
                       [&](size_t i) { graphs[i] = build_trace_graph(view[i], cfg); });
    return graphs;
}

ReasoningGraph weight_graph(ReasoningGraph graph, const AssociationTable& table) {
    for (auto& n : graph.nodes) {
        const ElementStats& es = table.element(n.element);
        if (es.present_traces > 0) {
            n.weight = es.assoc.npmi;
            n.weight_flagged = false;
        } else {
            n.weight = 0.0;
            n.weight_flagged = true;
        }
    }
    for (auto& e : graph.edges) {
        const EdgeStats* es = table.find_edge(e.key);
        if (es != nullptr) {
            e.weight = es->assoc.npmi;
            e.weight_flagged = false;
        } else {
            e.weight = 0.0;
            e.weight_flagged = true;
        }
    }
    graph.weighted = true;
    return graph;
}

std::string graph_to_json(const ReasoningGraph& graph) {
    ordered_json obj;
    obj["trace_id"] = graph.trace_id;
    obj["weighted"] = graph.weighted;
    ordered_json nodes = ordered_json::array();
    for (const auto& n : graph.nodes) {
        ordered_json nj;
        nj["element"] = std::string(element_info(n.element).id);
        nj["weight"] = n.weight;
        nj["weight_flagged"] = n.weight_flagged;
        nj["first_offset"] = n.first_offset;
        nj["support"] = n.support;
        nodes.push_back(std::move(nj));
    }
    obj["nodes"] = std::move(nodes);
    ordered_json edges = ordered_json::array();
    for (const auto& e : graph.edges) {
        ordered_json ej;
        ej["src"] = std::string(element_info(e.key.src).id);
        ej["dst"] = std::string(element_info(e.key.dst).id);
        ej["kind"] = std::string(to_string(e.key.kind));
        ej["weight"] = e.weight;
        ej["weight_flagged"] = e.weight_flagged;
        ej["support"] = e.support;
        edges.push_back(std::move(ej));
    }
    obj["edges"] = std::move(edges);
    return obj.dump(2) + "\n";
}

ReasoningGraph graph_from_json(const std::string& text) {
    ordered_json obj;
    try {
        obj = ordered_json::parse(text);
    } catch (const ordered_json::exception& e) {
        throw MalformedRecordError(std::string("invalid graph JSON: ") + e.what());
    }
    ReasoningGraph g;
    g.trace_id = obj.at("trace_id").get<std::string>();
    g.weighted = obj.value("weighted", false);
    for (const auto& nj : obj.at("nodes")) {
        GraphNode n;
        n.element = parse_element(nj.at("element").get<std::string>()).element;
        n.weight = nj.value("weight", 0.0);
        n.weight_flagged = nj.value("weight_flagged", false);
        n.first_offset = nj.value("first_offset", int64_t{0});
        n.support = nj.value("support", 0);
        g.nodes.push_back(n);
    }
    for (const auto& ej : obj.at("edges")) {
        GraphEdge e;
        e.key.src = parse_element(ej.at("src").get<std::string>()).element;
        e.key.dst = parse_element(ej.at("dst").get<std::string>()).element;
        e.key.kind = parse_relation_kind(ej.at("kind").get<std::string>());
        e.weight = ej.value("weight", 0.0);
        e.weight_flagged = ej.value("weight_flagged", false);
        e.support = ej.value("support", 0);
        g.edges.push_back(e);
    }
    return g;
}

namespace {

const char* dot_style(RelationKind kind) {
    switch (kind) {
        case RelationKind::NEXT: return "solid";
        case RelationKind::CONTAINS: return "dashed";
        case RelationKind::PARALLEL: return "dotted";
    }
    return "solid";
}

}  // namespace

std::string graph_to_dot(const ReasoningGraph& graph) {
    std::ostringstream out;
    out << "digraph \"" << graph.trace_id << "\" {\n";
    out << "  rankdir=LR;\n";
    out << "  node [shape=box];\n";
    for (const auto& n : graph.nodes) {
        out << "  \"" << element_info(n.element).id << "\"";
        if (graph.weighted) {
            out << " [label=\"" << element_info(n.element).id << "\\n"
                << format_fixed(n.weight, 3) << "\"]";
        }
        out << ";\n";
    }
    for (const auto& e : graph.edges) {
        out << "  \"" << element_info(e.key.src).id << "\" -> \""
            << element_info(e.key.dst).id << "\" [style=" << dot_style(e.key.kind)
            << ", label=\"";
        if (graph.weighted) {
            out << format_fixed(e.weight, 3);
        } else {
            out << "x" << e.support;
        }
        out << "\"];\n";
    }
    out << "}\n";
    return out.str();
}

}  // namespace cogtrace
