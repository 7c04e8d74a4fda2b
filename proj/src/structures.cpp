#include "cogtrace/structures.hpp"

#include <algorithm>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "cogtrace/errors.hpp"
#include "cogtrace/relations.hpp"
#include "cogtrace/util.hpp"

namespace cogtrace {

std::string_view to_string(StructureKind kind) {
    return kind == StructureKind::prototype ? "prototype" : "successful";
}

StructureKind parse_structure_kind(std::string_view label) {
    if (label == "prototype") return StructureKind::prototype;
    if (label == "successful") return StructureKind::successful;
    throw Error("unknown structure kind: '" + std::string(label) + "'");
}

namespace {

struct Candidate {
    EdgeKey key;
    double score;
};

// Tie-break shared by both extractions: higher score, then NEXT < CONTAINS <
// PARALLEL, then target element ordinal.
bool better_candidate(const Candidate& a, const Candidate& b) {
    if (a.score != b.score) return a.score > b.score;
    int ra = relation_preference_rank(a.key.kind);
    int rb = relation_preference_rank(b.key.kind);
    if (ra != rb) return ra < rb;
    return a.key.dst < b.key.dst;
}

// Best-scoring outgoing edge from `current` to an unvisited target, or
// nullopt when no candidate qualifies.
std::optional<Candidate> best_edge(const AssociationTable& table, Element current,
                                   const std::array<bool, kElementCount>& visited,
                                   const ExtractConfig& cfg, bool use_npmi) {
    std::optional<Candidate> best;
    for (const auto& [key, es] : table.edges) {
        if (key.src != current) continue;
        if (visited[static_cast<size_t>(key.dst)]) continue;
        if (es.support_traces < cfg.min_edge_support) continue;
        double score = use_npmi ? es.assoc.npmi : es.freq;
        if (use_npmi && score <= 0.0) continue;  // non-positive NPMI never extends G*
        Candidate c{key, score};
        if (!best || better_candidate(c, *best)) best = c;
    }
    return best;
}

StructureGraph grow(const AssociationTable& table, Element start, const ExtractConfig& cfg,
                    StructureKind kind) {
    StructureGraph g;
    g.kind = kind;
    g.v_max = cfg.v_max;
    g.slice_descriptor = table.slice_descriptor;

    const bool use_npmi = kind == StructureKind::successful;
    auto node_score = [&](Element e) {
        const ElementStats& es = table.element(e);
        return use_npmi ? es.assoc.npmi : es.presence;
    };

    std::array<bool, kElementCount> visited{};
    Element current = start;
    visited[static_cast<size_t>(current)] = true;
    g.nodes.push_back({current, node_score(current)});

    while (static_cast<int>(g.nodes.size()) < cfg.v_max) {
        auto next = best_edge(table, current, visited, cfg, use_npmi);
        if (!next) break;
        visited[static_cast<size_t>(next->key.dst)] = true;
        g.nodes.push_back({next->key.dst, node_score(next->key.dst)});
        g.edges.push_back({next->key.src, next->key.dst, next->key.kind, next->score});
        current = next->key.dst;
    }
    return g;
}

void check_extract_inputs(const CorpusView& slice, const ExtractConfig& cfg) {
    if (cfg.v_max < 1) {
        throw std::invalid_argument("v_max must be >= 1");
    }
    if (slice.empty()) {
        throw EmptySliceError("structure extraction requires a non-empty slice");
    }
}

}  // namespace

StructureGraph extract_prototype(const CorpusView& slice, const AssociationTable& table,
                                 const ExtractConfig& cfg) {
    check_extract_inputs(slice, cfg);
    if (table.n_nonempty == 0) {
        throw InsufficientDataError("no trace in the slice has a qualifying span");
    }

    // Start node: most frequent initial element. Ties by element ordinal.
    std::optional<Element> start;
    double best_rate = -1.0;
    for (const auto& info : all_elements()) {
        double rate = table.element(info.element).first_rate;
        if (rate > best_rate && rate > 0.0) {
            best_rate = rate;
            start = info.element;
        }
    }
    if (!start) {
        throw InsufficientDataError("first-element distribution is empty");
    }
    return grow(table, *start, cfg, StructureKind::prototype);
}

StructureGraph extract_successful(const CorpusView& slice, const AssociationTable& table,
                                  const ExtractConfig& cfg) {
    check_extract_inputs(slice, cfg);
    if (table.n_correct == 0) {
        throw NoSuccessesError("slice has no correct traces");
    }

    // Start node: maximal NPMI(element, success) among elements that initiate
    // at least one correct trace. Ties by element ordinal.
    std::optional<Element> start;
    double best_score = 0.0;
    for (const auto& info : all_elements()) {
        const ElementStats& es = table.element(info.element);
        if (es.first_correct_traces == 0) continue;
        if (!start || es.assoc.npmi > best_score) {
            best_score = es.assoc.npmi;
            start = info.element;
        }
    }
    if (!start) {
        throw InsufficientDataError("no element initiates a correct trace");
    }
    return grow(table, *start, cfg, StructureKind::successful);
}

std::string linearize(const StructureGraph& structure) {
    std::ostringstream out;
    out << "# kind=" << to_string(structure.kind) << " v_max=" << structure.v_max
        << " slice=" << structure.slice_descriptor << '\n';
    for (const auto& n : structure.nodes) {
        out << "node " << element_info(n.element).id << " (" << format_fixed(n.score, 6)
            << ")\n";
    }
    for (const auto& e : structure.edges) {
        out << "edge " << element_info(e.src).id << " -[" << to_string(e.kind) << "]-> "
            << element_info(e.dst).id << " (" << format_fixed(e.score, 6) << ")\n";
    }
    return out.str();
}

StructureGraph parse_structure(const std::string& text) {
    StructureGraph g;
    std::istringstream in(text);
    std::string line;
    bool saw_header = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string tok;
        ls >> tok;
        if (tok == "#") {
            std::string field;
            while (ls >> field) {
                auto eq = field.find('=');
                if (eq == std::string::npos) continue;
                std::string key = field.substr(0, eq);
                std::string value = field.substr(eq + 1);
                if (key == "kind") {
                    g.kind = parse_structure_kind(value);
                } else if (key == "v_max") {
                    g.v_max = std::stoi(value);
                } else if (key == "slice") {
                    // Descriptor may contain spaces; take the rest of the line.
                    std::string rest;
                    std::getline(ls, rest);
                    g.slice_descriptor = value + rest;
                }
            }
            saw_header = true;
        } else if (tok == "node") {
            std::string id, score;
            ls >> id >> score;
            StructureNode n;
            n.element = parse_element(id).element;
            n.score = std::stod(score.substr(1));  // strip '('
            g.nodes.push_back(n);
        } else if (tok == "edge") {
            std::string src, arrow, dst, score;
            ls >> src >> arrow >> dst >> score;
            StructureEdge e;
            e.src = parse_element(src).element;
            e.dst = parse_element(dst).element;
            auto lb = arrow.find('[');
            auto rb = arrow.find(']');
            if (lb == std::string::npos || rb == std::string::npos || rb <= lb) {
                throw Error("malformed structure edge line: " + line);
            }
            e.kind = parse_relation_kind(arrow.substr(lb + 1, rb - lb - 1));
            e.score = std::stod(score.substr(1));
            g.edges.push_back(e);
        } else {
            throw Error("unrecognized structure line: " + line);
        }
    }
    if (!saw_header || g.nodes.empty()) {
        throw Error("structure file missing header or nodes");
    }
    if (g.edges.size() + 1 != g.nodes.size()) {
        throw Error("structure file has inconsistent node/edge counts");
    }
    return g;
}

namespace {

const char* structure_edge_style(RelationKind kind) {
    switch (kind) {
        case RelationKind::NEXT: return "solid";
        case RelationKind::CONTAINS: return "dashed";
        case RelationKind::PARALLEL: return "dotted";
    }
    return "solid";
}

}  // namespace

std::string structure_to_dot(const StructureGraph& structure) {
    std::ostringstream out;
    out << "digraph \"" << to_string(structure.kind) << "\" {\n";
    out << "  rankdir=LR;\n";
    out << "  label=\"" << to_string(structure.kind) << " | " << structure.slice_descriptor
        << "\";\n";
    out << "  node [shape=box, style=rounded];\n";
    for (const auto& n : structure.nodes) {
        out << "  \"" << element_info(n.element).id << "\" [label=\""
            << element_info(n.element).id << "\\n" << format_fixed(n.score, 3) << "\"];\n";
    }
    for (const auto& e : structure.edges) {
        out << "  \"" << element_info(e.src).id << "\" -> \"" << element_info(e.dst).id
            << "\" [style=" << structure_edge_style(e.kind) << ", label=\""
            << format_fixed(e.score, 3) << "\"];\n";
    }
    out << "}\n";
    return out.str();
}

}  // namespace cogtrace
