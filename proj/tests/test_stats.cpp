#include <doctest.h>

#include <cmath>
#include <random>

#include "cogtrace/errors.hpp"
#include "cogtrace/stats.hpp"
#include "cogtrace/util.hpp"
#include "testutil.hpp"

using namespace cogtrace;
using namespace cogtrace::testutil;

namespace {

constexpr Element X = Element::verification;
constexpr Element A = Element::logical_coherence;
constexpr Element B = Element::compositionality;

// Traces where `with_x` controls the event span and `correct` the outcome.
Corpus event_corpus(const std::vector<std::pair<bool, bool>>& rows) {
    std::vector<Trace> traces;
    for (size_t i = 0; i < rows.size(); ++i) {
        std::vector<Span> spans;
        spans.push_back(make_span(Element::selective_attention, 0, 10));
        if (rows[i].first) spans.push_back(make_span(X, 100, 120));
        traces.push_back(make_trace("t" + std::to_string(i), std::move(spans), rows[i].second));
    }
    return Corpus(std::move(traces));
}

}  // namespace

TEST_CASE("presence_rate counts traces with a qualifying span") {
    Corpus all_have = event_corpus({{true, true}, {true, false}, {true, true}});
    CHECK(presence_rate(all_have.all(), X, PresenceScore::partially_present) == 1.0);

    Corpus none_have = event_corpus({{false, true}, {false, false}});
    CHECK(presence_rate(none_have.all(), X, PresenceScore::partially_present) == 0.0);

    Corpus two_of_five = event_corpus(
        {{true, true}, {true, false}, {false, true}, {false, false}, {false, true}});
    CHECK(presence_rate(two_of_five.all(), X, PresenceScore::partially_present) ==
          doctest::Approx(0.4).epsilon(1e-12));

    Corpus empty;
    CHECK_THROWS_AS(presence_rate(empty.all(), X, PresenceScore::partially_present),
                    EmptySliceError);
}

TEST_CASE("npmi trivial cases") {
    SUBCASE("perfect co-occurrence gives 1") {
        // 4 traces, x present exactly in the 2 correct ones.
        Corpus c = event_corpus({{true, true}, {true, true}, {false, false}, {false, false}});
        PmiValues v = element_success_association(c.all(), X, PresenceScore::partially_present);
        CHECK(v.npmi == doctest::Approx(1.0).epsilon(1e-12));
        CHECK_FALSE(v.degenerate);
    }
    SUBCASE("independence gives 0") {
        // x in half of correct and half of incorrect, p(correct) = 0.5.
        Corpus c = event_corpus({{true, true}, {false, true}, {true, false}, {false, false}});
        PmiValues v = element_success_association(c.all(), X, PresenceScore::partially_present);
        CHECK(v.npmi == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(v.pmi == doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("npmi and ppmi match the hand-derived 5-trace example") {
    // 5 traces (3 correct), x in 2 correct + 1 incorrect:
    // p(x) = 0.6, p(y) = 0.6, p(xy) = 0.4.
    Corpus c = event_corpus(
        {{true, true}, {true, true}, {false, true}, {true, false}, {false, false}});
    PmiValues v = element_success_association(c.all(), X, PresenceScore::partially_present);
    double expected_pmi = std::log(0.4 / 0.36);
    double expected_npmi = expected_pmi / (-std::log(0.4));
    CHECK(v.pmi == doctest::Approx(expected_pmi).epsilon(1e-12));
    CHECK(v.npmi == doctest::Approx(expected_npmi).epsilon(1e-12));
    CHECK(v.ppmi == doctest::Approx(expected_pmi).epsilon(1e-12));
    CHECK(v.npmi == doctest::Approx(0.115).epsilon(1e-2));
    CHECK(v.ppmi == doctest::Approx(0.105).epsilon(1e-2));
}

TEST_CASE("ppmi clips negative association to zero") {
    // x present only in incorrect traces but joint nonzero via one overlap.
    Corpus c = event_corpus(
        {{true, false}, {true, false}, {true, true}, {false, true}, {false, true}});
    PmiValues v = element_success_association(c.all(), X, PresenceScore::partially_present);
    CHECK(v.pmi < 0.0);
    CHECK(v.ppmi == 0.0);
}

TEST_CASE("degenerate cases return the documented values") {
    SUBCASE("event never occurs: marginal zero, NPMI 0") {
        Corpus c = event_corpus({{false, true}, {false, false}});
        PmiValues v = element_success_association(c.all(), X, PresenceScore::partially_present);
        CHECK(v.npmi == 0.0);
        CHECK(v.ppmi == 0.0);
        CHECK(v.degenerate);
    }
    SUBCASE("no correct traces: marginal zero, NPMI 0") {
        Corpus c = event_corpus({{true, false}, {false, false}});
        PmiValues v = element_success_association(c.all(), X, PresenceScore::partially_present);
        CHECK(v.npmi == 0.0);
        CHECK(v.degenerate);
    }
    SUBCASE("joint zero with positive marginals: NPMI -1") {
        Corpus c = event_corpus({{true, false}, {false, true}});
        PmiValues v = element_success_association(c.all(), X, PresenceScore::partially_present);
        CHECK(v.npmi == -1.0);
        CHECK(v.ppmi == 0.0);
        CHECK(v.degenerate);
        CHECK(std::isinf(v.pmi));
    }
    SUBCASE("ubiquitous joint event: NPMI 0") {
        Corpus c = event_corpus({{true, true}, {true, true}});
        PmiValues v = element_success_association(c.all(), X, PresenceScore::partially_present);
        CHECK(v.npmi == 0.0);
        CHECK(v.degenerate);
    }
}

TEST_CASE("npmi is 1 exactly when x occurs on the success set with p(xy) < 1") {
    std::mt19937_64 rng(41);
    RandomCorpusOptions opt;
    opt.max_traces = 24;
    for (int trial = 0; trial < 300; ++trial) {
        Corpus corpus = random_corpus(rng, opt);
        CorpusView view = corpus.all();
        AssociationTable table = build_association_table(view, StatsConfig{});
        for (const auto& info : all_elements()) {
            const ElementStats& es = table.element(info.element);
            if (es.assoc.degenerate) continue;
            CHECK(es.assoc.npmi >= -1.0);
            CHECK(es.assoc.npmi <= 1.0);
            CHECK(es.assoc.ppmi >= 0.0);
            bool exactly_success_set =
                es.present_traces == static_cast<int>(table.n_correct) &&
                es.present_traces > 0 &&
                static_cast<size_t>(es.present_traces) < table.n_traces;
            // npmi == 1 requires cx == cy == cxy; check one direction exactly.
            if (es.assoc.npmi == doctest::Approx(1.0).epsilon(1e-12)) {
                // x occurs on exactly the success set.
                PmiValues recheck = element_success_association(
                    view, info.element, PresenceScore::partially_present);
                CHECK(recheck.npmi == doctest::Approx(1.0).epsilon(1e-12));
                CHECK(exactly_success_set);
            }
        }
    }
}

TEST_CASE("edge frequency and first-element distribution") {
    RelationConfig rel;
    std::vector<Trace> traces;
    // Three traces with A -> B, one with only A.
    for (int i = 0; i < 3; ++i) {
        traces.push_back(make_trace("e" + std::to_string(i),
                                    {make_span(A, 0, 10), make_span(B, 50, 60)}, i % 2 == 0));
    }
    traces.push_back(make_trace("solo", {make_span(A, 0, 10)}, false));
    Corpus corpus(std::move(traces));
    CorpusView view = corpus.all();
    auto graphs = build_graphs(view, rel);

    CHECK(edge_frequency(view, graphs, {A, B, RelationKind::NEXT}) ==
          doctest::Approx(0.75).epsilon(1e-12));
    CHECK(edge_frequency(view, graphs, {B, A, RelationKind::NEXT}) == 0.0);

    auto dist = first_element_distribution(view, PresenceScore::partially_present);
    CHECK(dist[static_cast<size_t>(A)] == doctest::Approx(1.0).epsilon(1e-12));

    double sum = 0;
    for (double d : dist) sum += d;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("first-element distribution splits evenly on two starts") {
    std::vector<Trace> traces;
    traces.push_back(make_trace("t1", {make_span(A, 0, 10)}));
    traces.push_back(make_trace("t2", {make_span(B, 0, 10)}));
    Corpus corpus(std::move(traces));
    auto dist = first_element_distribution(corpus.all(), PresenceScore::partially_present);
    CHECK(dist[static_cast<size_t>(A)] == doctest::Approx(0.5));
    CHECK(dist[static_cast<size_t>(B)] == doctest::Approx(0.5));
}

TEST_CASE("association table matches the naive counter on random corpora") {
    std::mt19937_64 rng(43);
    RandomCorpusOptions opt;
    opt.max_traces = 50;
    opt.trace.max_spans = 12;
    StatsConfig cfg;
    for (int trial = 0; trial < 100; ++trial) {
        Corpus corpus = random_corpus(rng, opt);
        CorpusView view = corpus.all();
        auto graphs = build_graphs(view, cfg.relation);
        AssociationTable table = build_association_table(view, graphs, cfg);
        NaiveTable naive = naive_table(view, graphs, cfg.relation.min_score);

        REQUIRE(table.n_traces == naive.n);
        CHECK(table.n_correct == naive.n_correct);
        CHECK(table.n_nonempty == naive.n_nonempty);
        for (size_t e = 0; e < kElementCount; ++e) {
            CHECK(close_rel(table.elements[e].presence, naive.presence[e]));
            CHECK(close_rel(table.elements[e].assoc.pmi, naive.element_assoc[e].pmi));
            CHECK(close_rel(table.elements[e].assoc.ppmi, naive.element_assoc[e].ppmi));
            CHECK(close_rel(table.elements[e].assoc.npmi, naive.element_assoc[e].npmi));
            CHECK(close_rel(table.elements[e].first_rate, naive.first_dist[e]));
        }
        REQUIRE(table.edges.size() == naive.edge_freq.size());
        for (const auto& [key, es] : table.edges) {
            CHECK(close_rel(es.freq, naive.edge_freq.at(key)));
            CHECK(close_rel(es.assoc.npmi, naive.edge_assoc.at(key).npmi));
        }
    }
}

TEST_CASE("slice additivity: presence counts sum over a partition") {
    std::mt19937_64 rng(47);
    Corpus corpus = random_corpus(rng, RandomCorpusOptions{});
    CorpusView view = corpus.all();
    TraceFilter correct_f;
    correct_f.correct = true;
    TraceFilter incorrect_f;
    incorrect_f.correct = false;
    CorpusView cv = view.where(correct_f);
    CorpusView iv = view.where(incorrect_f);
    if (cv.empty() || iv.empty()) return;

    AssociationTable whole = build_association_table(view, StatsConfig{});
    AssociationTable left = build_association_table(cv, StatsConfig{});
    AssociationTable right = build_association_table(iv, StatsConfig{});
    for (size_t e = 0; e < kElementCount; ++e) {
        CHECK(whole.elements[e].present_traces ==
              left.elements[e].present_traces + right.elements[e].present_traces);
    }
}

TEST_CASE("single-trace slice has presence in {0,1}") {
    Corpus c = event_corpus({{true, true}});
    AssociationTable table = build_association_table(c.all(), StatsConfig{});
    for (size_t e = 0; e < kElementCount; ++e) {
        CHECK((table.elements[e].presence == 0.0 || table.elements[e].presence == 1.0));
    }
}

TEST_CASE("no-success slice marks all associations degenerate") {
    Corpus c = event_corpus({{true, false}, {false, false}});
    AssociationTable table = build_association_table(c.all(), StatsConfig{});
    for (size_t e = 0; e < kElementCount; ++e) {
        CHECK(table.elements[e].assoc.npmi == 0.0);
        CHECK(table.elements[e].assoc.degenerate);
    }
}

TEST_CASE("smoothing keeps values finite and moves the estimate") {
    Corpus c = event_corpus(
        {{true, true}, {true, true}, {false, true}, {true, false}, {false, false}});
    StatsConfig raw;
    StatsConfig smoothed;
    smoothed.smoothing_k = 0.5;
    AssociationTable rt = build_association_table(c.all(), raw);
    AssociationTable st = build_association_table(c.all(), smoothed);
    const auto& rx = rt.element(X).assoc;
    const auto& sx = st.element(X).assoc;
    CHECK_FALSE(std::isinf(sx.pmi));
    CHECK(sx.npmi >= -1.0);
    CHECK(sx.npmi <= 1.0);
    CHECK(rx.npmi != sx.npmi);  // smoothing moves the estimate
}

TEST_CASE("heatmap CSVs have 28 element rows in table order") {
    std::mt19937_64 rng(53);
    RandomCorpusOptions opt;
    opt.n_types = 3;
    Corpus corpus = random_corpus(rng, opt);
    TempDir dir("stats");
    write_heatmaps(corpus.all(), StatsConfig{}, GroupBy::problem_type, dir.path());

    std::string csv = read_file(dir.path() / "presence.csv");
    std::istringstream lines(csv);
    std::string header;
    std::getline(lines, header);
    CHECK(header.rfind("element,", 0) == 0);
    size_t rows = 0;
    std::string line;
    std::vector<std::string> ids;
    while (std::getline(lines, line)) {
        if (line.empty()) continue;
        ids.push_back(line.substr(0, line.find(',')));
        ++rows;
    }
    REQUIRE(rows == 28);
    for (size_t i = 0; i < 28; ++i) CHECK(ids[i] == all_elements()[i].id);
    CHECK(std::filesystem::exists(dir.path() / "ppmi.csv"));
    CHECK(std::filesystem::exists(dir.path() / "npmi.csv"));

    // Values carry 6 decimal places.
    CHECK(csv.find('.') != std::string::npos);
    size_t dot = csv.find('.', csv.find('\n'));
    size_t end = csv.find_first_of(",\n", dot);
    CHECK(end - dot - 1 == 6);
}
