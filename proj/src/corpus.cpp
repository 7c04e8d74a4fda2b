#include "cogtrace/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cogtrace/errors.hpp"
#include "cogtrace/util.hpp"

namespace cogtrace {

using nlohmann::json;
using nlohmann::ordered_json;

void normalize_spans(std::vector<Span>& spans) {
    std::sort(spans.begin(), spans.end(), [](const Span& a, const Span& b) {
        if (a.start != b.start) return a.start < b.start;
        if (a.length() != b.length()) return a.length() > b.length();
        return a.element < b.element;
    });
}

Trace normalize_spans(Trace trace) {
    normalize_spans(trace.spans);
    return trace;
}

bool TraceFilter::matches(const Trace& t) const {
    if (model_id && t.model_id != *model_id) return false;
    if (problem_type && t.problem_type != *problem_type) return false;
    if (modality && t.modality != *modality) return false;
    if (correct && t.correct != *correct) return false;
    return true;
}

bool TraceFilter::empty() const {
    return !model_id && !problem_type && !modality && !correct;
}

std::string slice_descriptor(const TraceFilter& filter) {
    if (filter.empty()) return "all";
    std::string out;
    auto append = [&out](std::string_view key, std::string_view value) {
        if (!out.empty()) out += ' ';
        out += key;
        out += '=';
        out += value;
    };
    if (filter.model_id) append("model", *filter.model_id);
    if (filter.problem_type) append("problem_type", problem_type_info(*filter.problem_type).id);
    if (filter.modality) append("modality", to_string(*filter.modality));
    if (filter.correct) append("correct", *filter.correct ? "true" : "false");
    return out;
}

const Trace& CorpusView::operator[](size_t i) const {
    return corpus_->traces()[indices_[i]];
}

CorpusView CorpusView::where(const TraceFilter& filter) const {
    std::vector<size_t> out;
    for (size_t idx : indices_) {
        if (filter.matches(corpus_->traces()[idx])) out.push_back(idx);
    }
    return CorpusView(corpus_, std::move(out));
}

std::vector<std::string> CorpusView::model_ids() const {
    std::set<std::string> seen;
    for (size_t i = 0; i < size(); ++i) seen.insert((*this)[i].model_id);
    return {seen.begin(), seen.end()};
}

std::vector<ProblemType> CorpusView::problem_types() const {
    std::set<int> seen;
    for (size_t i = 0; i < size(); ++i) seen.insert(static_cast<int>((*this)[i].problem_type));
    std::vector<ProblemType> out;
    for (int t : seen) out.push_back(static_cast<ProblemType>(t));
    return out;
}

Corpus::Corpus(std::vector<Trace> traces) : traces_(std::move(traces)) {
    rebuild_index();
}

void Corpus::rebuild_index() {
    by_id_.clear();
    by_model_.clear();
    by_type_.clear();
    correct_.clear();
    incorrect_.clear();
    for (size_t i = 0; i < traces_.size(); ++i) {
        const Trace& t = traces_[i];
        by_id_.emplace(t.trace_id, i);
        by_model_[t.model_id].push_back(i);
        by_type_[t.problem_type].push_back(i);
        (t.correct ? correct_ : incorrect_).push_back(i);
    }
}

const Trace* Corpus::find(const std::string& trace_id) const {
    auto it = by_id_.find(trace_id);
    return it == by_id_.end() ? nullptr : &traces_[it->second];
}

CorpusView Corpus::all() const {
    std::vector<size_t> idx(traces_.size());
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    return CorpusView(this, std::move(idx));
}

CorpusView Corpus::slice(const TraceFilter& filter) const {
    return all().where(filter);
}

namespace {

int64_t require_int(const json& obj, const char* field) {
    auto it = obj.find(field);
    if (it == obj.end() || !it->is_number_integer()) {
        throw MalformedRecordError(std::string("missing or non-integer field '") + field + "'");
    }
    return it->get<int64_t>();
}

std::string require_string(const json& obj, const char* field) {
    auto it = obj.find(field);
    if (it == obj.end() || !it->is_string()) {
        throw MalformedRecordError(std::string("missing or non-string field '") + field + "'");
    }
    return it->get<std::string>();
}

Trace parse_record(const std::string& line) {
    json obj;
    try {
        obj = json::parse(line);
    } catch (const json::exception& e) {
        throw MalformedRecordError(std::string("invalid JSON: ") + e.what());
    }
    if (!obj.is_object()) {
        throw MalformedRecordError("record is not a JSON object");
    }

    Trace t;
    t.trace_id = require_string(obj, "trace_id");
    if (t.trace_id.empty()) throw MalformedRecordError("trace_id must be non-empty");
    t.model_id = require_string(obj, "model_id");
    t.modality = parse_modality(require_string(obj, "modality"));
    t.problem_type = parse_problem_type(require_string(obj, "problem_type")).type;

    auto correct_it = obj.find("correct");
    if (correct_it == obj.end() || !correct_it->is_boolean()) {
        throw MalformedRecordError("missing or non-boolean field 'correct'");
    }
    t.correct = correct_it->get<bool>();

    if (auto it = obj.find("problem_id"); it != obj.end() && it->is_string()) {
        t.problem_id = it->get<std::string>();
    }
    if (t.problem_id.empty()) t.problem_id = t.trace_id;

    if (auto it = obj.find("text"); it != obj.end() && !it->is_null()) {
        if (!it->is_string()) throw MalformedRecordError("field 'text' must be a string");
        t.text = it->get<std::string>();
    }
    if (auto it = obj.find("problem_text"); it != obj.end() && it->is_string()) {
        t.problem_text = it->get<std::string>();
    }
    if (auto it = obj.find("answer_text"); it != obj.end() && it->is_string()) {
        t.answer_text = it->get<std::string>();
    }

    if (obj.contains("text_length")) {
        t.text_length = require_int(obj, "text_length");
        if (t.text_length < 0) throw MalformedRecordError("text_length must be non-negative");
        if (t.text && utf8_length(*t.text) != t.text_length) {
            throw MalformedRecordError("text_length does not match character count of text");
        }
    } else if (t.text) {
        t.text_length = utf8_length(*t.text);
    } else {
        throw MalformedRecordError("text_length is required when text is absent");
    }

    auto spans_it = obj.find("spans");
    if (spans_it == obj.end() || !spans_it->is_array()) {
        throw MalformedRecordError("missing or non-array field 'spans'");
    }
    for (const auto& sj : *spans_it) {
        if (!sj.is_object()) throw MalformedRecordError("span entries must be objects");
        Span s;
        s.element = parse_element(require_string(sj, "element")).element;
        s.start = require_int(sj, "start");
        s.end = require_int(sj, "end");
        s.score = presence_score_from_int(static_cast<int>(require_int(sj, "score")));
        if (s.start < 0 || s.start >= s.end || s.end > t.text_length) {
            std::ostringstream msg;
            msg << "span [" << s.start << "," << s.end << ") of element '"
                << element_info(s.element).id << "' out of bounds for text_length "
                << t.text_length;
            throw SpanOutOfBoundsError(msg.str());
        }
        t.spans.push_back(s);
    }
    normalize_spans(t.spans);
    return t;
}

}  // namespace

Corpus load_corpus(std::istream& in, const LoadOptions& options, LoadReport* report) {
    std::vector<Trace> traces;
    std::set<std::string> seen_ids;
    LoadReport local;
    LoadReport& rep = report ? *report : local;

    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        // Tolerate \r\n input and blank lines.
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        try {
            Trace t = parse_record(line);
            if (!seen_ids.insert(t.trace_id).second) {
                throw DuplicateTraceIdError("duplicate trace_id '" + t.trace_id + "'");
            }
            traces.push_back(std::move(t));
            ++rep.loaded;
        } catch (const Error& e) {
            if (options.strict) {
                throw;
            }
            ++rep.skipped;
            rep.errors.push_back("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return Corpus(std::move(traces));
}

Corpus load_corpus_file(const std::filesystem::path& path, const LoadOptions& options,
                        LoadReport* report) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open corpus file: " + path.string());
    }
    return load_corpus(in, options, report);
}

void save_corpus(const Corpus& corpus, std::ostream& out) {
    for (const Trace& t : corpus.traces()) {
        ordered_json obj;
        obj["trace_id"] = t.trace_id;
        obj["model_id"] = t.model_id;
        obj["modality"] = std::string(to_string(t.modality));
        obj["problem_id"] = t.problem_id;
        obj["problem_type"] = std::string(problem_type_info(t.problem_type).id);
        obj["correct"] = t.correct;
        obj["text_length"] = t.text_length;
        if (t.text) obj["text"] = *t.text;
        if (t.problem_text) obj["problem_text"] = *t.problem_text;
        if (t.answer_text) obj["answer_text"] = *t.answer_text;
        ordered_json spans = ordered_json::array();
        for (const Span& s : t.spans) {
            ordered_json sj;
            sj["element"] = std::string(element_info(s.element).id);
            sj["start"] = s.start;
            sj["end"] = s.end;
            sj["score"] = static_cast<int>(s.score);
            spans.push_back(std::move(sj));
        }
        obj["spans"] = std::move(spans);
        out << obj.dump() << '\n';
    }
}

void save_corpus_file(const Corpus& corpus, const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write corpus file: " + path.string());
    }
    save_corpus(corpus, out);
}

}  // namespace cogtrace
