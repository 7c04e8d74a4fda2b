#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cogtrace {

// The four dimensions the 28 cognitive elements fall into.
enum class Dimension {
    invariant,
    metacognitive,
    representation,
    operation,
};

// The fixed vocabulary of cognitive elements. Enumerator order is the
// canonical table order; the underlying value is the element's ordinal.
enum class Element : int {
    logical_coherence = 0,
    compositionality,
    productivity,
    conceptual_processing,
    self_awareness,
    context_awareness,
    strategy_selection,
    goal_management,
    evaluation,
    sequential_organization,
    hierarchical_organization,
    network_organization,
    ordinal_organization,
    causal_organization,
    temporal_organization,
    spatial_organization,
    context_alignment,
    knowledge_alignment,
    verification,
    selective_attention,
    adaptive_detail_management,
    decomposition_integration,
    representational_restructuring,
    pattern_recognition,
    abstraction,
    forward_chaining,
    backward_chaining,
    backtracking,
};

inline constexpr int kElementCount = 28;

struct ElementInfo {
    Element element;
    std::string_view id;            // stable snake_case token
    std::string_view display_name;  // human-readable name
    Dimension dimension;
    int ordinal;                    // 0..27, canonical table order
};

// The 13-category problem typology. Enumerator order is the canonical
// display order: logical (unranked) first, then the ten structuredness-ranked
// types from well- to ill-structured, then the two non-problem-solving types.
enum class ProblemType : int {
    logical = 0,
    algorithmic,
    story_problem,
    rule_using,
    decision_making,
    troubleshooting,
    diagnosis_solution,
    strategic_performance,
    case_analysis,
    design,
    dilemma,
    factual_recall,
    creative_expressive,
};

inline constexpr int kProblemTypeCount = 13;

struct ProblemTypeInfo {
    ProblemType type;
    std::string_view id;
    std::string_view display_name;
    // Position on the well-structured -> ill-structured continuum (0..9).
    // Unset for logical, factual_recall, creative_expressive, which sit
    // outside the ranking.
    std::optional<int> structuredness_rank;
    int display_ordinal;  // 0..12, canonical column order
};

// Span relationship kinds.
enum class RelationKind {
    PARALLEL,
    CONTAINS,
    NEXT,
};

// Tie-break preference used during greedy extraction: NEXT < CONTAINS < PARALLEL.
int relation_preference_rank(RelationKind kind);

std::string_view to_string(RelationKind kind);
std::string_view to_string(Dimension dim);
RelationKind parse_relation_kind(std::string_view label);  // throws Error on no match

// Three-level annotation score: 0=absent, 1=partially present, 2=present.
enum class PresenceScore : int {
    absent = 0,
    partially_present = 1,
    present = 2,
};

PresenceScore presence_score_from_int(int value);  // throws MalformedRecordError

enum class Modality {
    text,
    audio,
    image,
};

Modality parse_modality(std::string_view label);  // throws MalformedRecordError
std::string_view to_string(Modality m);

// --- Cognitive elements ---

const std::array<ElementInfo, kElementCount>& all_elements();
const ElementInfo& element_info(Element e);

// Case-insensitive lookup by id or display name; spaces, hyphens, slashes and
// underscores are interchangeable. Returns nullptr when nothing matches.
const ElementInfo* find_element(std::string_view label);

// Same lookup, throwing UnknownElementError when nothing matches.
const ElementInfo& parse_element(std::string_view label);

// Elements in canonical table order, optionally restricted to one dimension.
std::vector<ElementInfo> list_elements(std::optional<Dimension> dimension = std::nullopt);

// --- Problem types ---

const std::array<ProblemTypeInfo, kProblemTypeCount>& all_problem_types();
const ProblemTypeInfo& problem_type_info(ProblemType t);
const ProblemTypeInfo* find_problem_type(std::string_view label);
const ProblemTypeInfo& parse_problem_type(std::string_view label);  // throws UnknownProblemTypeError

}  // namespace cogtrace
