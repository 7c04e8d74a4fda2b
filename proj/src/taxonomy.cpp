#include "cogtrace/taxonomy.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_map>

#include "cogtrace/errors.hpp"

namespace cogtrace {

namespace {

constexpr std::array<ElementInfo, kElementCount> kElements = {{
    {Element::logical_coherence, "logical_coherence", "Logical coherence", Dimension::invariant, 0},
    {Element::compositionality, "compositionality", "Compositionality", Dimension::invariant, 1},
    {Element::productivity, "productivity", "Productivity", Dimension::invariant, 2},
    {Element::conceptual_processing, "conceptual_processing", "Conceptual processing", Dimension::invariant, 3},
    {Element::self_awareness, "self_awareness", "Self-awareness", Dimension::metacognitive, 4},
    {Element::context_awareness, "context_awareness", "Context awareness", Dimension::metacognitive, 5},
    {Element::strategy_selection, "strategy_selection", "Strategy selection", Dimension::metacognitive, 6},
    {Element::goal_management, "goal_management", "Goal management", Dimension::metacognitive, 7},
    {Element::evaluation, "evaluation", "Evaluation", Dimension::metacognitive, 8},
    {Element::sequential_organization, "sequential_organization", "Sequential organization", Dimension::representation, 9},
    {Element::hierarchical_organization, "hierarchical_organization", "Hierarchical organization", Dimension::representation, 10},
    {Element::network_organization, "network_organization", "Network organization", Dimension::representation, 11},
    {Element::ordinal_organization, "ordinal_organization", "Ordinal organization", Dimension::representation, 12},
    {Element::causal_organization, "causal_organization", "Causal organization", Dimension::representation, 13},
    {Element::temporal_organization, "temporal_organization", "Temporal organization", Dimension::representation, 14},
    {Element::spatial_organization, "spatial_organization", "Spatial organization", Dimension::representation, 15},
    {Element::context_alignment, "context_alignment", "Context alignment", Dimension::operation, 16},
    {Element::knowledge_alignment, "knowledge_alignment", "Knowledge alignment", Dimension::operation, 17},
    {Element::verification, "verification", "Verification", Dimension::operation, 18},
    {Element::selective_attention, "selective_attention", "Selective attention", Dimension::operation, 19},
    {Element::adaptive_detail_management, "adaptive_detail_management", "Adaptive detail management", Dimension::operation, 20},
    {Element::decomposition_integration, "decomposition_integration", "Decomposition and integration", Dimension::operation, 21},
    {Element::representational_restructuring, "representational_restructuring", "Representational restructuring", Dimension::operation, 22},
    {Element::pattern_recognition, "pattern_recognition", "Pattern recognition", Dimension::operation, 23},
    {Element::abstraction, "abstraction", "Abstraction", Dimension::operation, 24},
    {Element::forward_chaining, "forward_chaining", "Forward chaining", Dimension::operation, 25},
    {Element::backward_chaining, "backward_chaining", "Backward chaining", Dimension::operation, 26},
    {Element::backtracking, "backtracking", "Backtracking", Dimension::operation, 27},
}};

constexpr std::array<ProblemTypeInfo, kProblemTypeCount> kProblemTypes = {{
    {ProblemType::logical, "logical", "Logical", std::nullopt, 0},
    {ProblemType::algorithmic, "algorithmic", "Algorithmic", 0, 1},
    {ProblemType::story_problem, "story_problem", "Story Problems", 1, 2},
    {ProblemType::rule_using, "rule_using", "Rule-Using", 2, 3},
    {ProblemType::decision_making, "decision_making", "Decision-Making", 3, 4},
    {ProblemType::troubleshooting, "troubleshooting", "Troubleshooting", 4, 5},
    {ProblemType::diagnosis_solution, "diagnosis_solution", "Diagnosis-Solution", 5, 6},
    {ProblemType::strategic_performance, "strategic_performance", "Strategic Performance", 6, 7},
    {ProblemType::case_analysis, "case_analysis", "Case Analysis", 7, 8},
    {ProblemType::design, "design", "Design", 8, 9},
    {ProblemType::dilemma, "dilemma", "Dilemma", 9, 10},
    {ProblemType::factual_recall, "factual_recall", "Factual Recall", std::nullopt, 11},
    {ProblemType::creative_expressive, "creative_expressive", "Creative/Expressive", std::nullopt, 12},
}};

// Lowercases and maps separator characters to '_', collapsing runs.
std::string normalize_label(std::string_view label) {
    std::string out;
    out.reserve(label.size());
    for (char c : label) {
        unsigned char uc = static_cast<unsigned char>(c);
        char mapped;
        if (c == ' ' || c == '-' || c == '/' || c == '_' || c == '\t') {
            mapped = '_';
        } else {
            mapped = static_cast<char>(std::tolower(uc));
        }
        if (mapped == '_' && (out.empty() || out.back() == '_')) {
            continue;
        }
        out.push_back(mapped);
    }
    while (!out.empty() && out.back() == '_') {
        out.pop_back();
    }
    return out;
}

const std::unordered_map<std::string, const ElementInfo*>& element_lookup() {
    static const auto* map = [] {
        auto* m = new std::unordered_map<std::string, const ElementInfo*>();
        for (const auto& e : kElements) {
            (*m)[normalize_label(e.id)] = &e;
            (*m)[normalize_label(e.display_name)] = &e;
        }
        return m;
    }();
    return *map;
}

const std::unordered_map<std::string, const ProblemTypeInfo*>& problem_type_lookup() {
    static const auto* map = [] {
        auto* m = new std::unordered_map<std::string, const ProblemTypeInfo*>();
        for (const auto& t : kProblemTypes) {
            (*m)[normalize_label(t.id)] = &t;
            (*m)[normalize_label(t.display_name)] = &t;
        }
        // Singular/plural variants seen in the wild.
        (*m)["story_problems"] = &kProblemTypes[2];
        (*m)["algorithm"] = &kProblemTypes[1];
        (*m)["algorithms"] = &kProblemTypes[1];
        (*m)["dilemmas"] = &kProblemTypes[10];
        return m;
    }();
    return *map;
}

}  // namespace

const std::array<ElementInfo, kElementCount>& all_elements() {
    return kElements;
}

const ElementInfo& element_info(Element e) {
    return kElements[static_cast<size_t>(e)];
}

const ElementInfo* find_element(std::string_view label) {
    const auto& lookup = element_lookup();
    auto it = lookup.find(normalize_label(label));
    return it == lookup.end() ? nullptr : it->second;
}

const ElementInfo& parse_element(std::string_view label) {
    const ElementInfo* info = find_element(label);
    if (info == nullptr) {
        throw UnknownElementError("unknown cognitive element: '" + std::string(label) + "'");
    }
    return *info;
}

std::vector<ElementInfo> list_elements(std::optional<Dimension> dimension) {
    std::vector<ElementInfo> out;
    for (const auto& e : kElements) {
        if (!dimension || e.dimension == *dimension) {
            out.push_back(e);
        }
    }
    return out;
}

const std::array<ProblemTypeInfo, kProblemTypeCount>& all_problem_types() {
    return kProblemTypes;
}

const ProblemTypeInfo& problem_type_info(ProblemType t) {
    return kProblemTypes[static_cast<size_t>(t)];
}

const ProblemTypeInfo* find_problem_type(std::string_view label) {
    const auto& lookup = problem_type_lookup();
    auto it = lookup.find(normalize_label(label));
    return it == lookup.end() ? nullptr : it->second;
}

const ProblemTypeInfo& parse_problem_type(std::string_view label) {
    const ProblemTypeInfo* info = find_problem_type(label);
    if (info == nullptr) {
        throw UnknownProblemTypeError("unknown problem type: '" + std::string(label) + "'");
    }
    return *info;
}

int relation_preference_rank(RelationKind kind) {
    switch (kind) {
        case RelationKind::NEXT: return 0;
        case RelationKind::CONTAINS: return 1;
        case RelationKind::PARALLEL: return 2;
    }
    return 3;
}

std::string_view to_string(RelationKind kind) {
    switch (kind) {
        case RelationKind::PARALLEL: return "PARALLEL";
        case RelationKind::CONTAINS: return "CONTAINS";
        case RelationKind::NEXT: return "NEXT";
    }
    return "?";
}

std::string_view to_string(Dimension dim) {
    switch (dim) {
        case Dimension::invariant: return "invariant";
        case Dimension::metacognitive: return "metacognitive";
        case Dimension::representation: return "representation";
        case Dimension::operation: return "operation";
    }
    return "?";
}

RelationKind parse_relation_kind(std::string_view label) {
    std::string norm = normalize_label(label);
    if (norm == "parallel") return RelationKind::PARALLEL;
    if (norm == "contains") return RelationKind::CONTAINS;
    if (norm == "next") return RelationKind::NEXT;
    throw Error("unknown relation kind: '" + std::string(label) + "'");
}

PresenceScore presence_score_from_int(int value) {
    if (value < 0 || value > 2) {
        throw MalformedRecordError("presence score must be 0, 1 or 2; got " + std::to_string(value));
    }
    return static_cast<PresenceScore>(value);
}

Modality parse_modality(std::string_view label) {
    std::string norm = normalize_label(label);
    if (norm == "text") return Modality::text;
    if (norm == "audio") return Modality::audio;
    if (norm == "image") return Modality::image;
    throw MalformedRecordError("unknown modality: '" + std::string(label) + "'");
}

std::string_view to_string(Modality m) {
    switch (m) {
        case Modality::text: return "text";
        case Modality::audio: return "audio";
        case Modality::image: return "image";
    }
    return "?";
}

}  // namespace cogtrace
