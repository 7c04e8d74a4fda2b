#include "cogtrace/stats.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "cogtrace/errors.hpp"
#include "cogtrace/util.hpp"

namespace cogtrace {

PmiValues success_association_from_counts(size_t n, size_t cx, size_t cy, size_t cxy,
                                          double smoothing_k) {
    PmiValues out;
    if (n == 0) {
        throw EmptySliceError("success association over zero traces");
    }
    double px, py, pxy;
    if (smoothing_k > 0.0) {
        // Add-k over the 2x2 contingency table (x/!x times y/!y).
        double denom = static_cast<double>(n) + 4.0 * smoothing_k;
        px = (static_cast<double>(cx) + 2.0 * smoothing_k) / denom;
        py = (static_cast<double>(cy) + 2.0 * smoothing_k) / denom;
        pxy = (static_cast<double>(cxy) + smoothing_k) / denom;
    } else {
        px = static_cast<double>(cx) / static_cast<double>(n);
        py = static_cast<double>(cy) / static_cast<double>(n);
        pxy = static_cast<double>(cxy) / static_cast<double>(n);
    }

    if (px == 0.0 || py == 0.0) {
        // Uninformative: the event or success never occurs.
        out.degenerate = true;
        return out;
    }
    if (pxy == 0.0) {
        // Perfect negative association; NPMI's limit is -1.
        out.pmi = -std::numeric_limits<double>::infinity();
        out.ppmi = 0.0;
        out.npmi = -1.0;
        out.degenerate = true;
        return out;
    }
    if (pxy == 1.0) {
        // Ubiquitous joint event: PMI is 0/0 in normalized form.
        out.degenerate = true;
        return out;
    }
    out.pmi = std::log(pxy / (px * py));
    out.ppmi = std::max(0.0, out.pmi);
    out.npmi = out.pmi / (-std::log(pxy));
    return out;
}

namespace {

void require_non_empty(const CorpusView& slice) {
    if (slice.empty()) {
        throw EmptySliceError("operation requires a non-empty corpus slice");
    }
}

bool trace_has_element(const Trace& t, Element e, PresenceScore min_score) {
    for (const Span& s : t.spans) {
        if (s.element == e && s.score >= min_score) return true;
    }
    return false;
}

// Index of the first qualifying span in normalized order, or -1.
int first_qualifying_element(const Trace& t, PresenceScore min_score) {
    std::vector<Span> spans = qualifying_spans(t, min_score);
    if (spans.empty()) return -1;
    return static_cast<int>(spans.front().element);
}

}  // namespace

double presence_rate(const CorpusView& slice, Element element, PresenceScore min_score) {
    require_non_empty(slice);
    size_t count = 0;
    for (size_t i = 0; i < slice.size(); ++i) {
        if (trace_has_element(slice[i], element, min_score)) ++count;
    }
    return static_cast<double>(count) / static_cast<double>(slice.size());
}

PmiValues success_association(const CorpusView& slice,
                              const std::function<bool(const Trace&)>& has_event,
                              double smoothing_k) {
    require_non_empty(slice);
    size_t cx = 0, cy = 0, cxy = 0;
    for (size_t i = 0; i < slice.size(); ++i) {
        const Trace& t = slice[i];
        bool x = has_event(t);
        if (x) ++cx;
        if (t.correct) ++cy;
        if (x && t.correct) ++cxy;
    }
    return success_association_from_counts(slice.size(), cx, cy, cxy, smoothing_k);
}

PmiValues element_success_association(const CorpusView& slice, Element element,
                                      PresenceScore min_score, double smoothing_k) {
    return success_association(
        slice, [&](const Trace& t) { return trace_has_element(t, element, min_score); },
        smoothing_k);
}

double element_npmi(const CorpusView& slice, Element element, PresenceScore min_score) {
    return element_success_association(slice, element, min_score).npmi;
}

double element_ppmi(const CorpusView& slice, Element element, PresenceScore min_score) {
    return element_success_association(slice, element, min_score).ppmi;
}

double edge_frequency(const CorpusView& slice, std::span<const ReasoningGraph> graphs,
                      const EdgeKey& key) {
    require_non_empty(slice);
    size_t count = 0;
    for (const auto& g : graphs) {
        if (g.contains_edge(key)) ++count;
    }
    return static_cast<double>(count) / static_cast<double>(slice.size());
}

std::array<double, kElementCount> first_element_distribution(const CorpusView& slice,
                                                             PresenceScore min_score) {
    require_non_empty(slice);
    std::array<size_t, kElementCount> counts{};
    size_t nonempty = 0;
    for (size_t i = 0; i < slice.size(); ++i) {
        int first = first_qualifying_element(slice[i], min_score);
        if (first >= 0) {
            ++counts[static_cast<size_t>(first)];
            ++nonempty;
        }
    }
    std::array<double, kElementCount> dist{};
    if (nonempty == 0) return dist;
    for (size_t i = 0; i < dist.size(); ++i) {
        dist[i] = static_cast<double>(counts[i]) / static_cast<double>(nonempty);
    }
    return dist;
}

std::array<double, kElementCount> AssociationTable::first_element_distribution() const {
    std::array<double, kElementCount> dist{};
    for (size_t i = 0; i < dist.size(); ++i) dist[i] = elements[i].first_rate;
    return dist;
}

AssociationTable build_association_table(const CorpusView& slice, const StatsConfig& cfg,
                                         int jobs) {
    std::vector<ReasoningGraph> graphs = build_graphs(slice, cfg.relation, jobs);
    return build_association_table(slice, graphs, cfg);
}

AssociationTable build_association_table(const CorpusView& slice,
                                         std::span<const ReasoningGraph> graphs,
                                         const StatsConfig& cfg) {
    require_non_empty(slice);
    AssociationTable table;
    table.n_traces = slice.size();
    table.cfg = cfg;

    const size_t n = slice.size();
    const PresenceScore min_score = cfg.relation.min_score;

    // Per-trace event masks, counted in one pass.
    std::array<size_t, kElementCount> el_count{};
    std::array<size_t, kElementCount> el_correct{};
    std::array<size_t, kElementCount> first_count{};
    std::array<size_t, kElementCount> first_correct{};
    struct EdgeCounts {
        size_t count = 0;
        size_t correct = 0;
    };
    std::map<EdgeKey, EdgeCounts> edge_counts;

    for (size_t i = 0; i < n; ++i) {
        const Trace& t = slice[i];
        if (t.correct) ++table.n_correct;
        std::array<bool, kElementCount> present{};
        for (const Span& s : t.spans) {
            if (s.score >= min_score) present[static_cast<size_t>(s.element)] = true;
        }
        for (size_t e = 0; e < present.size(); ++e) {
            if (!present[e]) continue;
            ++el_count[e];
            if (t.correct) ++el_correct[e];
        }
        int first = first_qualifying_element(t, min_score);
        if (first >= 0) {
            ++table.n_nonempty;
            ++first_count[static_cast<size_t>(first)];
            if (t.correct) ++first_correct[static_cast<size_t>(first)];
        }
        for (const GraphEdge& e : graphs[i].edges) {
            EdgeCounts& c = edge_counts[e.key];
            ++c.count;
            if (t.correct) ++c.correct;
        }
    }

    for (size_t e = 0; e < kElementCount; ++e) {
        ElementStats& es = table.elements[e];
        es.present_traces = static_cast<int>(el_count[e]);
        es.presence = static_cast<double>(el_count[e]) / static_cast<double>(n);
        es.assoc = success_association_from_counts(n, el_count[e], table.n_correct,
                                                   el_correct[e], cfg.smoothing_k);
        es.first_traces = static_cast<int>(first_count[e]);
        es.first_correct_traces = static_cast<int>(first_correct[e]);
        es.first_rate = table.n_nonempty == 0
                            ? 0.0
                            : static_cast<double>(first_count[e]) /
                                  static_cast<double>(table.n_nonempty);
    }

    for (const auto& [key, counts] : edge_counts) {
        EdgeStats es;
        es.support_traces = static_cast<int>(counts.count);
        es.freq = static_cast<double>(counts.count) / static_cast<double>(n);
        es.assoc = success_association_from_counts(n, counts.count, table.n_correct,
                                                   counts.correct, cfg.smoothing_k);
        table.edges.emplace(key, es);
    }
    return table;
}

namespace {

struct HeatmapGroup {
    std::string label;
    CorpusView view;
};

std::vector<HeatmapGroup> heatmap_groups(const CorpusView& slice, GroupBy by) {
    std::vector<HeatmapGroup> groups;
    if (by == GroupBy::problem_type) {
        for (ProblemType t : slice.problem_types()) {
            TraceFilter f;
            f.problem_type = t;
            groups.push_back({std::string(problem_type_info(t).id), slice.where(f)});
        }
        // Canonical column order: structuredness layout.
        std::sort(groups.begin(), groups.end(), [](const auto& a, const auto& b) {
            return parse_problem_type(a.label).display_ordinal <
                   parse_problem_type(b.label).display_ordinal;
        });
    } else {
        for (const std::string& m : slice.model_ids()) {
            TraceFilter f;
            f.model_id = m;
            groups.push_back({m, slice.where(f)});
        }
    }
    return groups;
}

std::string render_matrix_csv(const std::vector<std::string>& columns,
                              const std::vector<std::array<double, kElementCount>>& values) {
    std::ostringstream out;
    out << "element";
    for (const auto& c : columns) out << ',' << c;
    out << '\n';
    for (const auto& e : all_elements()) {
        out << e.id;
        for (size_t c = 0; c < columns.size(); ++c) {
            out << ',' << format_fixed(values[c][static_cast<size_t>(e.ordinal)], 6);
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace

void write_heatmaps(const CorpusView& slice, const StatsConfig& cfg, GroupBy by,
                    const std::filesystem::path& outdir, int jobs) {
    require_non_empty(slice);
    std::vector<HeatmapGroup> groups = heatmap_groups(slice, by);

    std::vector<std::string> columns;
    std::vector<std::array<double, kElementCount>> presence, ppmi, npmi;
    for (const auto& g : groups) {
        AssociationTable table = build_association_table(g.view, cfg, jobs);
        std::array<double, kElementCount> pres{}, pp{}, np{};
        for (size_t e = 0; e < kElementCount; ++e) {
            pres[e] = table.elements[e].presence;
            pp[e] = table.elements[e].assoc.ppmi;
            np[e] = table.elements[e].assoc.npmi;
        }
        columns.push_back(g.label);
        presence.push_back(pres);
        ppmi.push_back(pp);
        npmi.push_back(np);
    }

    std::filesystem::create_directories(outdir);
    write_file(outdir / "presence.csv", render_matrix_csv(columns, presence));
    write_file(outdir / "ppmi.csv", render_matrix_csv(columns, ppmi));
    write_file(outdir / "npmi.csv", render_matrix_csv(columns, npmi));
}

void write_type_association(const CorpusView& slice, const StatsConfig& cfg,
                            const std::filesystem::path& outdir) {
    require_non_empty(slice);
    const PresenceScore min_score = cfg.relation.min_score;

    std::vector<std::string> columns;
    std::vector<std::array<double, kElementCount>> values;
    for (ProblemType t : slice.problem_types()) {
        columns.push_back(std::string(problem_type_info(t).id));
        std::array<double, kElementCount> col{};
        for (const auto& e : all_elements()) {
            // PMI between element occurrence and problem-type membership,
            // estimated over the whole slice.
            size_t cx = 0, cy = 0, cxy = 0;
            for (size_t i = 0; i < slice.size(); ++i) {
                const Trace& tr = slice[i];
                bool x = trace_has_element(tr, e.element, min_score);
                bool y = tr.problem_type == t;
                if (x) ++cx;
                if (y) ++cy;
                if (x && y) ++cxy;
            }
            col[static_cast<size_t>(e.ordinal)] =
                success_association_from_counts(slice.size(), cx, cy, cxy, cfg.smoothing_k)
                    .ppmi;
        }
        values.push_back(col);
    }

    std::filesystem::create_directories(outdir);
    write_file(outdir / "type_association_ppmi.csv", render_matrix_csv(columns, values));
}

}  // namespace cogtrace
