#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "cogtrace/taxonomy.hpp"

namespace cogtrace {

// One annotated occurrence of a cognitive element inside a trace.
// Offsets are 0-based character positions; start inclusive, end exclusive.
struct Span {
    Element element;
    int64_t start = 0;
    int64_t end = 0;
    PresenceScore score = PresenceScore::partially_present;

    int64_t length() const { return end - start; }
    bool operator==(const Span&) const = default;
};

// Sorts spans by start ascending, ties by length descending, final tie by
// element ordinal. Idempotent; a permutation of the input.
void normalize_spans(std::vector<Span>& spans);

// A reasoning transcript with its annotations and outcome.
struct Trace {
    std::string trace_id;
    std::string model_id;
    Modality modality = Modality::text;
    std::string problem_id;  // defaults to trace_id when the record omits it
    ProblemType problem_type = ProblemType::logical;
    bool correct = false;
    int64_t text_length = 0;  // character count
    std::optional<std::string> text;
    std::optional<std::string> problem_text;
    std::optional<std::string> answer_text;
    std::vector<Span> spans;  // normalized order
};

Trace normalize_spans(Trace trace);

struct TraceFilter {
    std::optional<std::string> model_id;
    std::optional<ProblemType> problem_type;
    std::optional<Modality> modality;
    std::optional<bool> correct;

    bool matches(const Trace& t) const;
    bool empty() const;
};

// Human-readable slice identifier recorded in tables and structure files.
std::string slice_descriptor(const TraceFilter& filter);

class Corpus;

// Non-owning view over a subset of a corpus. Cheap to copy; the corpus must
// outlive every view.
class CorpusView {
public:
    CorpusView() = default;
    CorpusView(const Corpus* corpus, std::vector<size_t> indices)
        : corpus_(corpus), indices_(std::move(indices)) {}

    size_t size() const { return indices_.size(); }
    bool empty() const { return indices_.empty(); }
    const Trace& operator[](size_t i) const;
    size_t corpus_index(size_t i) const { return indices_[i]; }
    const Corpus& corpus() const { return *corpus_; }

    CorpusView where(const TraceFilter& filter) const;

    // Distinct model ids / problem types present, in deterministic order.
    std::vector<std::string> model_ids() const;
    std::vector<ProblemType> problem_types() const;

private:
    const Corpus* corpus_ = nullptr;
    std::vector<size_t> indices_;
};

class Corpus {
public:
    Corpus() = default;
    explicit Corpus(std::vector<Trace> traces);

    const std::vector<Trace>& traces() const { return traces_; }
    size_t size() const { return traces_.size(); }
    const Trace* find(const std::string& trace_id) const;

    CorpusView all() const;
    CorpusView slice(const TraceFilter& filter) const;

private:
    std::vector<Trace> traces_;
    std::unordered_map<std::string, size_t> by_id_;
    std::map<std::string, std::vector<size_t>> by_model_;
    std::map<ProblemType, std::vector<size_t>> by_type_;
    std::vector<size_t> correct_, incorrect_;

    void rebuild_index();
};

struct LoadOptions {
    // Strict aborts on the first invalid record; lenient skips and counts.
    bool strict = true;
};

struct LoadReport {
    size_t loaded = 0;
    size_t skipped = 0;
    std::vector<std::string> errors;  // one message per skipped record
};

// Reads line-delimited trace records (one JSON object per line, UTF-8).
// Required fields: trace_id, model_id, modality, problem_type, correct,
// text_length (derivable when text is present), spans. Optional: problem_id,
// text, problem_text, answer_text.
Corpus load_corpus(std::istream& in, const LoadOptions& options, LoadReport* report = nullptr);
Corpus load_corpus_file(const std::filesystem::path& path, const LoadOptions& options,
                        LoadReport* report = nullptr);

// Writes records in canonical field order with normalized spans.
// load(save(c)) reproduces c exactly.
void save_corpus(const Corpus& corpus, std::ostream& out);
void save_corpus_file(const Corpus& corpus, const std::filesystem::path& path);

}  // namespace cogtrace
