#include <doctest.h>

#include <random>

#include "cogtrace/errors.hpp"
#include "cogtrace/relations.hpp"
#include "testutil.hpp"

using namespace cogtrace;
using namespace cogtrace::testutil;

namespace {

constexpr Element A = Element::logical_coherence;
constexpr Element B = Element::compositionality;
constexpr Element C = Element::productivity;

std::optional<RelationKind> classify_kind(int64_t as, int64_t ae, int64_t bs, int64_t be,
                                          const RelationConfig& cfg = {}) {
    auto rel = classify_relation(make_span(A, as, ae), make_span(B, bs, be), cfg);
    if (!rel) return std::nullopt;
    return rel->kind;
}

}  // namespace

TEST_CASE("manhattan distance") {
    CHECK(manhattan_distance(make_span(A, 0, 10), make_span(B, 0, 10)) == 0);
    CHECK(manhattan_distance(make_span(A, 5, 40), make_span(B, 10, 45)) == 10);
    CHECK(manhattan_distance(make_span(A, 0, 10), make_span(B, 12, 30)) == 32);
}

TEST_CASE("stage examples") {
    // Stage 1: distance 10 < 20.
    CHECK(classify_kind(5, 40, 10, 45) == RelationKind::PARALLEL);
    // Stage 2: rho = 85/90 > 0.8.
    CHECK(classify_kind(0, 95, 10, 100) == RelationKind::CONTAINS);
    // Stage 3: disjoint, distance 100 >= 20.
    CHECK(classify_kind(0, 10, 50, 60) == RelationKind::NEXT);
}

TEST_CASE("stage 1 precedence: close pairs are PARALLEL regardless of overlap") {
    // rho would be 1.0 (a.end == b.end), but distance 10 < tau_par wins.
    CHECK(classify_kind(0, 100, 10, 100) == RelationKind::PARALLEL);
    std::mt19937_64 rng(3);
    RelationConfig cfg;
    for (int i = 0; i < 500; ++i) {
        std::uniform_int_distribution<int64_t> d(0, 200);
        int64_t as = d(rng), bs = as + (d(rng) % 10);
        int64_t ae = as + 1 + d(rng), be = bs + 1 + d(rng);
        Span a = make_span(A, as, ae), b = make_span(B, bs, be);
        if (manhattan_distance(a, b) < cfg.tau_par) {
            auto rel = classify_relation(a, b, cfg);
            REQUIRE(rel.has_value());
            CHECK(rel->kind == RelationKind::PARALLEL);
        }
    }
}

TEST_CASE("boundary inequalities") {
    // Distance exactly tau_par is not PARALLEL; spans here are disjoint -> NEXT.
    CHECK(classify_kind(0, 10, 20, 30) == RelationKind::NEXT);  // distance 40
    CHECK(classify_kind(0, 10, 10, 20) == RelationKind::NEXT);  // distance 20, touching
    // rho exactly 0.8 is not CONTAINS; a ends inside b -> NEXT instead.
    CHECK(classify_kind(0, 90, 10, 110) == RelationKind::NEXT);  // rho = 80/100
    // rho just above 0.8 is CONTAINS (distance kept >= tau_par).
    CHECK(classify_kind(0, 91, 10, 110) == RelationKind::CONTAINS);  // rho = 0.81
}

TEST_CASE("full containment policy") {
    // a covers b and b fills most of a: len(b)/len(a) = 80/100 >= 0.8.
    CHECK(classify_kind(0, 100, 10, 90) == std::nullopt);
    RelationConfig contains_cfg;
    contains_cfg.full_containment_policy = FullContainmentPolicy::contains;
    CHECK(classify_kind(0, 100, 10, 90, contains_cfg) == RelationKind::CONTAINS);
    // Small b inside a is NEXT via the length-ratio clause: 30/100 < 0.8.
    CHECK(classify_kind(0, 100, 30, 60) == RelationKind::NEXT);
}

TEST_CASE("tau_par = 0 makes PARALLEL impossible") {
    RelationConfig cfg;
    cfg.tau_par = 0;
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int64_t> d(0, 100);
    for (int i = 0; i < 1000; ++i) {
        int64_t as = d(rng), bs = as + (d(rng) % 20);
        Span a = make_span(A, as, as + 1 + d(rng));
        Span b = make_span(B, bs, bs + 1 + d(rng));
        auto rel = classify_relation(a, b, cfg);
        if (rel) CHECK(rel->kind != RelationKind::PARALLEL);
    }
}

TEST_CASE("tau_overlap = 1 disables stage-2 CONTAINS") {
    RelationConfig cfg;
    cfg.tau_overlap = 1.0;
    std::mt19937_64 rng(9);
    std::uniform_int_distribution<int64_t> d(0, 100);
    for (int i = 0; i < 1000; ++i) {
        int64_t as = d(rng), bs = as + (d(rng) % 30);
        Span a = make_span(A, as, as + 1 + d(rng));
        Span b = make_span(B, bs, bs + 1 + d(rng));
        auto rel = classify_relation(a, b, cfg);
        if (rel) CHECK(rel->kind != RelationKind::CONTAINS);
    }
}

TEST_CASE("disjoint distant spans always classify NEXT") {
    std::mt19937_64 rng(13);
    RelationConfig cfg;
    std::uniform_int_distribution<int64_t> d(0, 300);
    for (int i = 0; i < 1000; ++i) {
        int64_t as = d(rng);
        int64_t ae = as + 1 + (d(rng) % 50);
        int64_t bs = ae + 1 + d(rng);
        Span a = make_span(A, as, ae), b = make_span(B, bs, bs + 1 + d(rng));
        if (manhattan_distance(a, b) >= cfg.tau_par) {
            auto rel = classify_relation(a, b, cfg);
            REQUIRE(rel.has_value());
            CHECK(rel->kind == RelationKind::NEXT);
        }
    }
}

TEST_CASE("classify_relation is pure and validates input") {
    Span a = make_span(A, 0, 30), b = make_span(B, 40, 90);
    RelationConfig cfg;
    auto r1 = classify_relation(a, b, cfg);
    auto r2 = classify_relation(a, b, cfg);
    REQUIRE(r1.has_value());
    REQUIRE(r2.has_value());
    CHECK(r1->kind == r2->kind);
    CHECK(r1->metric == r2->metric);

    CHECK_THROWS_AS(classify_relation(make_span(A, 5, 5), b, cfg), DegenerateSpanError);
    CHECK_THROWS_AS(classify_relation(a, make_span(B, 50, 50), cfg), DegenerateSpanError);
    CHECK_THROWS_AS(classify_relation(b, a, cfg), std::invalid_argument);
}

TEST_CASE("classify_all_pairs enumerates ordered pairs") {
    RelationConfig cfg;
    SUBCASE("single span yields nothing") {
        std::vector<Span> spans = {make_span(A, 0, 10)};
        CHECK(classify_all_pairs(spans, cfg).empty());
    }
    SUBCASE("three disjoint far-apart spans yield three NEXT relations") {
        std::vector<Span> spans = {make_span(A, 0, 10), make_span(B, 50, 60),
                                   make_span(C, 100, 110)};
        auto rels = classify_all_pairs(spans, cfg);
        REQUIRE(rels.size() == 3);
        for (const auto& r : rels) CHECK(r.kind == RelationKind::NEXT);
        CHECK(rels[0].src_index == 0);
        CHECK(rels[0].dst_index == 1);
        CHECK(rels[1].src_index == 0);
        CHECK(rels[1].dst_index == 2);
        CHECK(rels[2].src_index == 1);
        CHECK(rels[2].dst_index == 2);
    }
    SUBCASE("identical intervals of different elements are PARALLEL") {
        std::vector<Span> spans = {make_span(A, 0, 10), make_span(B, 0, 10)};
        auto rels = classify_all_pairs(spans, cfg);
        REQUIRE(rels.size() == 1);
        CHECK(rels[0].kind == RelationKind::PARALLEL);
        CHECK(rels[0].metric == 0.0);
    }
}

TEST_CASE("qualifying_spans filters by score and normalizes") {
    Trace t = make_trace("t", {make_span(A, 50, 60, 0), make_span(B, 0, 10, 1),
                               make_span(C, 20, 30, 2)});
    auto min1 = qualifying_spans(t, PresenceScore::partially_present);
    REQUIRE(min1.size() == 2);
    CHECK(min1[0].element == B);
    CHECK(min1[1].element == C);
    auto min2 = qualifying_spans(t, PresenceScore::present);
    REQUIRE(min2.size() == 1);
    CHECK(min2[0].element == C);
    auto min0 = qualifying_spans(t, PresenceScore::absent);
    CHECK(min0.size() == 3);
}

TEST_CASE("relation config validation") {
    RelationConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.tau_par = -1;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.tau_par = 20;
    cfg.tau_overlap = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.tau_overlap = 1.5;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
