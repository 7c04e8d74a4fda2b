#pragma once

// Shared test helpers: corpus builders, random generators, the naive
// statistics oracle, and a scripted transport for record/replay tests. The
// oracle code paths here are intentionally independent of the library
// implementations they check.

#include <array>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <unistd.h>

#include "cogtrace/corpus.hpp"
#include "cogtrace/errors.hpp"
#include "cogtrace/graph.hpp"
#include "cogtrace/model_client.hpp"
#include "cogtrace/stats.hpp"
#include "cogtrace/structures.hpp"
#include "cogtrace/taxonomy.hpp"

namespace cogtrace::testutil {

inline Span make_span(Element e, int64_t start, int64_t end, int score = 2) {
    Span s;
    s.element = e;
    s.start = start;
    s.end = end;
    s.score = static_cast<PresenceScore>(score);
    return s;
}

inline Trace make_trace(std::string id, std::vector<Span> spans, bool correct = true,
                        ProblemType type = ProblemType::algorithmic,
                        std::string model = "model-a") {
    Trace t;
    t.trace_id = std::move(id);
    t.model_id = std::move(model);
    t.modality = Modality::text;
    t.problem_id = t.trace_id;
    t.problem_type = type;
    t.correct = correct;
    int64_t max_end = 0;
    for (const Span& s : spans) max_end = std::max(max_end, s.end);
    t.text_length = max_end + 10;
    t.spans = std::move(spans);
    normalize_spans(t.spans);
    return t;
}

inline Element element_at(int ordinal) {
    return static_cast<Element>(ordinal);
}

// --- Random generators ---

struct RandomTraceOptions {
    int max_spans = 30;
    int64_t max_start = 400;
    int64_t max_len = 90;
    int n_elements = 28;  // restrict to the first N ordinals
};

inline std::vector<Span> random_spans(std::mt19937_64& rng, const RandomTraceOptions& opt) {
    std::uniform_int_distribution<int> n_dist(0, opt.max_spans);
    std::uniform_int_distribution<int64_t> start_dist(0, opt.max_start);
    std::uniform_int_distribution<int64_t> len_dist(1, opt.max_len);
    std::uniform_int_distribution<int> el_dist(0, opt.n_elements - 1);
    std::uniform_int_distribution<int> score_dist(0, 2);
    int n = n_dist(rng);
    std::vector<Span> spans;
    spans.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        int64_t start = start_dist(rng);
        spans.push_back(make_span(element_at(el_dist(rng)), start, start + len_dist(rng),
                                  score_dist(rng)));
    }
    return spans;
}

struct RandomCorpusOptions {
    int max_traces = 50;
    RandomTraceOptions trace;
    int n_types = 4;
    int n_models = 2;
};

inline Corpus random_corpus(std::mt19937_64& rng, const RandomCorpusOptions& opt) {
    std::uniform_int_distribution<int> n_dist(1, opt.max_traces);
    std::uniform_int_distribution<int> type_dist(0, opt.n_types - 1);
    std::uniform_int_distribution<int> model_dist(0, opt.n_models - 1);
    std::uniform_int_distribution<int> coin(0, 1);
    int n = n_dist(rng);
    std::vector<Trace> traces;
    for (int i = 0; i < n; ++i) {
        Trace t = make_trace("t" + std::to_string(i), random_spans(rng, opt.trace),
                             coin(rng) == 1, static_cast<ProblemType>(type_dist(rng)),
                             "model-" + std::to_string(model_dist(rng)));
        t.text_length = opt.trace.max_start + opt.trace.max_len + 1;
        traces.push_back(std::move(t));
    }
    return Corpus(std::move(traces));
}

// --- Naive statistics oracle (independent recount) ---

struct NaivePmi {
    double pmi = 0.0;
    double ppmi = 0.0;
    double npmi = 0.0;
    bool degenerate = false;
};

// Computes the PMI family from raw counts via log-of-counts arithmetic, a
// different float path from the library's log-of-ratio form.
inline NaivePmi naive_pmi(size_t n, size_t cx, size_t cy, size_t cxy) {
    NaivePmi out;
    if (cx == 0 || cy == 0) {
        out.degenerate = true;
        return out;
    }
    if (cxy == 0) {
        out.pmi = -std::numeric_limits<double>::infinity();
        out.npmi = -1.0;
        out.degenerate = true;
        return out;
    }
    if (cxy == n) {
        out.degenerate = true;
        return out;
    }
    double ln = std::log(static_cast<double>(n));
    double lx = std::log(static_cast<double>(cx));
    double ly = std::log(static_cast<double>(cy));
    double lxy = std::log(static_cast<double>(cxy));
    out.pmi = lxy + ln - lx - ly;
    out.ppmi = out.pmi > 0 ? out.pmi : 0.0;
    out.npmi = out.pmi / (ln - lxy);
    return out;
}

struct NaiveTable {
    size_t n = 0;
    size_t n_correct = 0;
    size_t n_nonempty = 0;
    std::array<double, kElementCount> presence{};
    std::array<NaivePmi, kElementCount> element_assoc{};
    std::array<double, kElementCount> first_dist{};
    std::map<EdgeKey, double> edge_freq;
    std::map<EdgeKey, NaivePmi> edge_assoc;
};

// Recounts every table quantity by direct scanning. Graphs must align with
// the view (they are the shared input; the probability arithmetic is what
// this oracle re-derives).
inline NaiveTable naive_table(const CorpusView& view, std::span<const ReasoningGraph> graphs,
                              PresenceScore min_score) {
    NaiveTable table;
    table.n = view.size();
    std::array<size_t, kElementCount> cx{}, cxy{};
    std::array<size_t, kElementCount> first_counts{};
    std::map<EdgeKey, std::pair<size_t, size_t>> ec;

    for (size_t i = 0; i < view.size(); ++i) {
        const Trace& t = view[i];
        if (t.correct) ++table.n_correct;
        std::set<int> present;
        const Span* first_span = nullptr;
        for (const Span& s : t.spans) {
            if (s.score < min_score) continue;
            present.insert(static_cast<int>(s.element));
            if (first_span == nullptr) {
                first_span = &s;
            } else if (s.start < first_span->start ||
                       (s.start == first_span->start &&
                        (s.length() > first_span->length() ||
                         (s.length() == first_span->length() &&
                          s.element < first_span->element)))) {
                first_span = &s;
            }
        }
        for (int e : present) {
            ++cx[static_cast<size_t>(e)];
            if (t.correct) ++cxy[static_cast<size_t>(e)];
        }
        if (first_span != nullptr) {
            ++table.n_nonempty;
            ++first_counts[static_cast<size_t>(first_span->element)];
        }
        for (const auto& edge : graphs[i].edges) {
            auto& c = ec[edge.key];
            ++c.first;
            if (t.correct) ++c.second;
        }
    }
    for (size_t e = 0; e < kElementCount; ++e) {
        table.presence[e] = static_cast<double>(cx[e]) / static_cast<double>(table.n);
        table.element_assoc[e] = naive_pmi(table.n, cx[e], table.n_correct, cxy[e]);
        table.first_dist[e] = table.n_nonempty == 0
                                  ? 0.0
                                  : static_cast<double>(first_counts[e]) /
                                        static_cast<double>(table.n_nonempty);
    }
    for (const auto& [key, counts] : ec) {
        table.edge_freq[key] = static_cast<double>(counts.first) / static_cast<double>(table.n);
        table.edge_assoc[key] = naive_pmi(table.n, counts.first, table.n_correct, counts.second);
    }
    return table;
}

inline bool close_rel(double a, double b, double rel = 1e-12) {
    if (a == b) return true;
    if (std::isinf(a) || std::isinf(b)) return a == b;
    double scale = std::max(std::abs(a), std::abs(b));
    return std::abs(a - b) <= rel * std::max(scale, 1.0);
}

// --- Planted-chain corpora ---

struct PlantSpec {
    std::vector<Element> chain;  // distinct elements, length 3..7
    std::vector<Element> noise;  // distinct from chain
    int n_correct = 10;
    int n_incorrect = 10;
    // Fraction of correct traces carrying a PARALLEL noise attachment on a
    // non-final chain node (kept strictly below 1 so noise NPMI < 1).
    double attach_fraction = 0.4;
    ProblemType type = ProblemType::diagnosis_solution;
    uint64_t seed = 1;
};

// Correct traces carry the chain as far-apart spans (adjacent NEXT edges at
// NPMI 1 after refinement); some also carry a noise span PARALLEL to a
// mid-chain node (positive NPMI strictly below 1). Incorrect traces contain
// only noise elements, so their edges have non-positive NPMI.
inline Corpus planted_corpus(const PlantSpec& spec) {
    std::mt19937_64 rng(spec.seed);
    std::vector<Trace> traces;
    const int k = static_cast<int>(spec.chain.size());
    int attach_budget =
        std::min(spec.n_correct - 1,
                 static_cast<int>(spec.attach_fraction * spec.n_correct));

    for (int i = 0; i < spec.n_correct; ++i) {
        std::vector<Span> spans;
        for (int j = 0; j < k; ++j) {
            spans.push_back(make_span(spec.chain[static_cast<size_t>(j)], j * 100, j * 100 + 50));
        }
        if (i < attach_budget && k >= 2 && !spec.noise.empty()) {
            std::uniform_int_distribution<int> pos_dist(0, k - 2);
            std::uniform_int_distribution<size_t> el_dist(0, spec.noise.size() - 1);
            int j = pos_dist(rng);
            spans.push_back(
                make_span(spec.noise[el_dist(rng)], j * 100 + 2, j * 100 + 52));
        }
        traces.push_back(make_trace("c" + std::to_string(i), std::move(spans), true, spec.type));
    }
    for (int i = 0; i < spec.n_incorrect; ++i) {
        std::vector<Span> spans;
        if (!spec.noise.empty()) {
            std::uniform_int_distribution<size_t> el_dist(0, spec.noise.size() - 1);
            std::uniform_int_distribution<int> count_dist(1, 3);
            int count = count_dist(rng);
            for (int j = 0; j < count; ++j) {
                spans.push_back(make_span(spec.noise[el_dist(rng)], j * 100, j * 100 + 50));
            }
        }
        traces.push_back(
            make_trace("i" + std::to_string(i), std::move(spans), false, spec.type));
    }
    return Corpus(std::move(traces));
}

// --- Greedy-step audit (independent re-derivation of the extraction rule) ---

// Confirms that each chosen edge's score is maximal among edges from the
// current node to unvisited targets under the documented tie-break.
inline bool audit_greedy(const StructureGraph& g, const AssociationTable& table,
                         int min_edge_support) {
    const bool use_npmi = g.kind == StructureKind::successful;
    std::set<int> visited;
    visited.insert(static_cast<int>(g.nodes.front().element));
    for (size_t step = 0; step < g.edges.size(); ++step) {
        const StructureEdge& chosen = g.edges[step];
        double chosen_score = chosen.score;
        for (const auto& [key, es] : table.edges) {
            if (key.src != chosen.src) continue;
            if (visited.contains(static_cast<int>(key.dst))) continue;
            if (es.support_traces < min_edge_support) continue;
            double score = use_npmi ? es.assoc.npmi : es.freq;
            if (use_npmi && score <= 0.0) continue;
            if (score > chosen_score) return false;
            if (score == chosen_score) {
                // Tie-break: kind rank, then target ordinal.
                int rc = relation_preference_rank(chosen.kind);
                int rk = relation_preference_rank(key.kind);
                if (rk < rc) return false;
                if (rk == rc && key.dst < chosen.dst) return false;
            }
        }
        visited.insert(static_cast<int>(chosen.dst));
    }
    return true;
}

// --- Scripted transport ---

// Answers every request through a user-provided function; useful on its own
// and as the inner transport when recording fixture logs.
class ScriptedTransport : public Transport {
public:
    using Script = std::function<std::string(const ModelRequest&)>;
    explicit ScriptedTransport(Script script) : script_(std::move(script)) {}
    std::string complete(const ModelRequest& request) override { return script_(request); }

private:
    Script script_;
};

// Fails `failures` times with ClientError, then delegates.
class FlakyTransport : public Transport {
public:
    FlakyTransport(std::shared_ptr<Transport> inner, int failures)
        : inner_(std::move(inner)), failures_(failures) {}
    std::string complete(const ModelRequest& request) override {
        if (failures_ > 0) {
            --failures_;
            throw ClientError("scripted transport failure");
        }
        return inner_->complete(request);
    }

private:
    std::shared_ptr<Transport> inner_;
    int failures_;
};

// --- Filesystem helpers ---

class TempDir {
public:
    explicit TempDir(const std::string& label) {
        static std::atomic<uint64_t> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("cogtrace-" + label + "-" + std::to_string(counter.fetch_add(1)) + "-" +
                 std::to_string(::getpid()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline std::filesystem::path test_data_dir() {
    return std::filesystem::path(COGTRACE_TEST_DATA_DIR);
}

}  // namespace cogtrace::testutil
