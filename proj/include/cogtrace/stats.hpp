#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "cogtrace/corpus.hpp"
#include "cogtrace/graph.hpp"
#include "cogtrace/relations.hpp"
#include "cogtrace/taxonomy.hpp"

namespace cogtrace {

// PMI family for one event against trace success, natural log.
//   PMI  = ln(p(x,y) / (p(x) p(y)))
//   PPMI = max(0, PMI)
//   NPMI = PMI / (-ln p(x,y)), in [-1, 1]
// Degenerate cases (flagged): a zero marginal is uninformative and yields
// NPMI 0; p(x,y) = 0 with positive marginals yields NPMI -1 (the limit);
// p(x,y) = 1 yields NPMI 0 (a ubiquitous event has no discriminative signal).
struct PmiValues {
    double pmi = 0.0;
    double ppmi = 0.0;
    double npmi = 0.0;
    bool degenerate = false;
};

// Core estimator over trace counts: n traces, cx with the event, cy correct,
// cxy both. smoothing_k > 0 applies add-k smoothing on the 2x2 contingency
// table; the default 0 keeps raw counts.
PmiValues success_association_from_counts(size_t n, size_t cx, size_t cy, size_t cxy,
                                          double smoothing_k = 0.0);

struct ElementStats {
    double presence = 0.0;     // fraction of traces with >= 1 qualifying span
    PmiValues assoc;           // association with success
    double first_rate = 0.0;   // P(element appears first), over non-empty traces
    int present_traces = 0;
    int first_traces = 0;
    int first_correct_traces = 0;  // traces it initiates that are correct
};

struct EdgeStats {
    double freq = 0.0;   // fraction of traces whose graph contains the edge
    PmiValues assoc;
    int support_traces = 0;
};

struct StatsConfig {
    RelationConfig relation;
    double smoothing_k = 0.0;
};

// Corpus-slice statistics: presence rates, PMI/PPMI/NPMI of elements and
// edges versus success, first-element distribution, edge frequencies.
struct AssociationTable {
    std::string slice_descriptor;
    size_t n_traces = 0;
    size_t n_correct = 0;
    size_t n_nonempty = 0;  // traces with >= 1 qualifying span
    StatsConfig cfg;
    std::array<ElementStats, kElementCount> elements{};
    std::map<EdgeKey, EdgeStats> edges;

    const ElementStats& element(Element e) const {
        return elements[static_cast<size_t>(e)];
    }
    const EdgeStats* find_edge(const EdgeKey& key) const {
        auto it = edges.find(key);
        return it == edges.end() ? nullptr : &it->second;
    }
    std::array<double, kElementCount> first_element_distribution() const;
};

// --- Per-quantity operations (each throws EmptySliceError on an empty slice) ---

double presence_rate(const CorpusView& slice, Element element, PresenceScore min_score);

// Association of "trace contains >= 1 qualifying span of element" with success.
PmiValues element_success_association(const CorpusView& slice, Element element,
                                      PresenceScore min_score, double smoothing_k = 0.0);
double element_npmi(const CorpusView& slice, Element element, PresenceScore min_score);
double element_ppmi(const CorpusView& slice, Element element, PresenceScore min_score);

// Association of an arbitrary per-trace event with success.
PmiValues success_association(const CorpusView& slice,
                              const std::function<bool(const Trace&)>& has_event,
                              double smoothing_k = 0.0);

// Fraction of graphs (aligned with the slice) containing the edge key.
double edge_frequency(const CorpusView& slice, std::span<const ReasoningGraph> graphs,
                      const EdgeKey& key);

// Per-element probability that a trace's first qualifying span has that
// element; sums to 1 over traces with at least one qualifying span.
std::array<double, kElementCount> first_element_distribution(const CorpusView& slice,
                                                             PresenceScore min_score);

// Builds the full table; graphs are built internally (or passed pre-built,
// aligned with the slice).
AssociationTable build_association_table(const CorpusView& slice, const StatsConfig& cfg,
                                         int jobs = 1);
AssociationTable build_association_table(const CorpusView& slice,
                                         std::span<const ReasoningGraph> graphs,
                                         const StatsConfig& cfg);

// --- Heatmap export ---

enum class GroupBy {
    problem_type,  // columns in structuredness order
    model,         // columns sorted by model id
};

// Writes presence.csv, ppmi.csv and npmi.csv into outdir: 28 element rows in
// table order, one column per group present in the slice, 6 decimal places.
void write_heatmaps(const CorpusView& slice, const StatsConfig& cfg, GroupBy by,
                    const std::filesystem::path& outdir, int jobs = 1);

// Optional problem-type association view: PPMI between "trace has the
// element" and "trace has the problem type", over the whole slice.
void write_type_association(const CorpusView& slice, const StatsConfig& cfg,
                            const std::filesystem::path& outdir);

}  // namespace cogtrace
