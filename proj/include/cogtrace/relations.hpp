#pragma once

#include <optional>
#include <span>
#include <vector>

#include "cogtrace/corpus.hpp"
#include "cogtrace/taxonomy.hpp"

namespace cogtrace {

enum class FullContainmentPolicy {
    none,      // a fully covering b with a large length ratio yields no relation
    contains,  // label that case CONTAINS instead
};

struct RelationConfig {
    int64_t tau_par = 20;       // Manhattan-distance threshold for PARALLEL
    double tau_overlap = 0.8;   // overlap-ratio threshold for CONTAINS / NEXT
    FullContainmentPolicy full_containment_policy = FullContainmentPolicy::none;
    PresenceScore min_score = PresenceScore::partially_present;

    void validate() const;  // throws std::invalid_argument on out-of-range values
};

// A classified relationship between two spans of one trace. src is the span
// that comes first in canonical (normalized) order, so src.start <= dst.start.
struct SpanRelation {
    Span src;
    Span dst;
    RelationKind kind = RelationKind::NEXT;
    // PARALLEL: Manhattan distance. CONTAINS: overlap ratio. NEXT: distance
    // for disjoint pairs, otherwise the ratio that fell below tau_overlap.
    double metric = 0.0;
    // Positions of src/dst in the normalized span sequence the relation was
    // classified from. Identity for refinement; 0 when classified standalone.
    size_t src_index = 0;
    size_t dst_index = 0;
};

// |b.start - a.start| + |b.end - a.end|
int64_t manhattan_distance(const Span& a, const Span& b);

// Classifies one ordered pair through the three stages, in order:
//   1. PARALLEL when manhattan_distance(a, b) < tau_par
//   2. CONTAINS when b.start <= a.end <= b.end and
//      (a.end - b.start)/(b.end - b.start) > tau_overlap
//   3. NEXT when a.end < b.start, or a.end < b.end with that ratio
//      <= tau_overlap, or a.end > b.end with
//      (b.end - b.start)/(a.end - a.start) < tau_overlap
// When no stage fires (a covers b with length ratio >= tau_overlap) the
// full-containment policy decides. Requires a.start <= b.start.
// Throws DegenerateSpanError on zero-length spans.
std::optional<SpanRelation> classify_relation(const Span& a, const Span& b,
                                              const RelationConfig& cfg);

// Classifies every ordered pair (i < j) of an already normalized,
// score-filtered span sequence. Output is in pair-index order.
std::vector<SpanRelation> classify_all_pairs(std::span<const Span> spans,
                                             const RelationConfig& cfg);

// Spans with score >= min_score, in normalized order.
std::vector<Span> qualifying_spans(const Trace& trace, PresenceScore min_score);

}  // namespace cogtrace
