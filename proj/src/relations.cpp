#include "cogtrace/relations.hpp"

#include <cstdlib>
#include <sstream>
#include <stdexcept>

#include "cogtrace/errors.hpp"

namespace cogtrace {

void RelationConfig::validate() const {
    if (tau_par < 0) {
        throw std::invalid_argument("tau_par must be >= 0");
    }
    if (!(tau_overlap > 0.0) || tau_overlap > 1.0) {
        throw std::invalid_argument("tau_overlap must be in (0, 1]");
    }
}

int64_t manhattan_distance(const Span& a, const Span& b) {
    return std::llabs(b.start - a.start) + std::llabs(b.end - a.end);
}

std::optional<SpanRelation> classify_relation(const Span& a, const Span& b,
                                              const RelationConfig& cfg) {
    if (a.length() <= 0 || b.length() <= 0) {
        std::ostringstream msg;
        msg << "zero-length span in pair [" << a.start << "," << a.end << ") / ["
            << b.start << "," << b.end << ")";
        throw DegenerateSpanError(msg.str());
    }
    if (a.start > b.start) {
        throw std::invalid_argument("classify_relation requires a.start <= b.start");
    }

    auto make = [&](RelationKind kind, double metric) {
        SpanRelation r;
        r.src = a;
        r.dst = b;
        r.kind = kind;
        r.metric = metric;
        return r;
    };

    // Stage 1: near-simultaneous spans.
    int64_t distance = manhattan_distance(a, b);
    if (distance < cfg.tau_par) {
        return make(RelationKind::PARALLEL, static_cast<double>(distance));
    }

    // Stage 2: a ends inside b and covers most of b's prefix.
    if (b.start <= a.end && a.end <= b.end) {
        double rho = static_cast<double>(a.end - b.start) / static_cast<double>(b.end - b.start);
        if (rho > cfg.tau_overlap) {
            return make(RelationKind::CONTAINS, rho);
        }
    }

    // Stage 3: sequential.
    if (a.end < b.start) {
        return make(RelationKind::NEXT, static_cast<double>(distance));
    }
    if (a.end < b.end) {
        double rho = static_cast<double>(a.end - b.start) / static_cast<double>(b.end - b.start);
        if (rho <= cfg.tau_overlap) {
            return make(RelationKind::NEXT, rho);
        }
        return std::nullopt;  // unreachable: rho > tau_overlap was stage 2
    }
    if (a.end > b.end) {
        double ratio = static_cast<double>(b.length()) / static_cast<double>(a.length());
        if (ratio < cfg.tau_overlap) {
            return make(RelationKind::NEXT, ratio);
        }
        // Full containment: a covers b entirely and b fills most of a.
        if (cfg.full_containment_policy == FullContainmentPolicy::contains) {
            return make(RelationKind::CONTAINS, ratio);
        }
        return std::nullopt;
    }

    // Only reachable when a.end == b.end and tau_overlap == 1: stage 2 needs a
    // strict inequality, so the pair falls through to the containment policy.
    if (cfg.full_containment_policy == FullContainmentPolicy::contains) {
        double ratio = static_cast<double>(b.length()) / static_cast<double>(a.length());
        return make(RelationKind::CONTAINS, ratio);
    }
    return std::nullopt;
}

std::vector<SpanRelation> classify_all_pairs(std::span<const Span> spans,
                                             const RelationConfig& cfg) {
    std::vector<SpanRelation> out;
    for (size_t i = 0; i + 1 < spans.size(); ++i) {
        for (size_t j = i + 1; j < spans.size(); ++j) {
            auto rel = classify_relation(spans[i], spans[j], cfg);
            if (rel) {
                rel->src_index = i;
                rel->dst_index = j;
                out.push_back(*rel);
            }
        }
    }
    return out;
}

std::vector<Span> qualifying_spans(const Trace& trace, PresenceScore min_score) {
    std::vector<Span> out;
    for (const Span& s : trace.spans) {
        if (s.score >= min_score) out.push_back(s);
    }
    normalize_spans(out);
    return out;
}

}  // namespace cogtrace
