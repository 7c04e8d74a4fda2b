#include "cogtrace/annotate.hpp"

#include <sstream>

#include <nlohmann/json.hpp>

#include "cogtrace/errors.hpp"
#include "cogtrace/template.hpp"
#include "cogtrace/util.hpp"

namespace cogtrace {

using nlohmann::json;

namespace {

constexpr std::string_view kExplanationMarker = "###EXPLANATION";
constexpr std::string_view kScoreMarker = "###SCORE";
constexpr std::string_view kSpansMarker = "###SPANS";

std::string_view trim(std::string_view s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

// Marker must sit on its own line.
size_t find_marker(std::string_view reply, std::string_view marker, size_t from) {
    size_t pos = from;
    while ((pos = reply.find(marker, pos)) != std::string_view::npos) {
        size_t line_start = reply.rfind('\n', pos);
        line_start = line_start == std::string_view::npos ? 0 : line_start + 1;
        size_t line_end = reply.find('\n', pos);
        line_end = line_end == std::string_view::npos ? reply.size() : line_end;
        if (trim(reply.substr(line_start, line_end - line_start)) == marker) {
            return pos;
        }
        pos += marker.size();
    }
    return std::string_view::npos;
}

std::string_view after_marker_line(std::string_view reply, size_t marker_pos) {
    size_t nl = reply.find('\n', marker_pos);
    return nl == std::string_view::npos ? std::string_view{} : reply.substr(nl + 1);
}

}  // namespace

AnnotationResult parse_annotation_reply(std::string_view reply, Element element,
                                        int64_t text_length) {
    AnnotationResult result;
    result.raw_reply = std::string(reply);

    size_t expl_pos = find_marker(reply, kExplanationMarker, 0);
    if (expl_pos == std::string_view::npos) {
        throw UnparseableReplyError("reply missing ###EXPLANATION marker");
    }
    size_t score_pos = find_marker(reply, kScoreMarker, expl_pos + kExplanationMarker.size());
    if (score_pos == std::string_view::npos) {
        throw UnparseableReplyError("reply missing ###SCORE marker after explanation");
    }

    size_t expl_start = reply.find('\n', expl_pos);
    expl_start = expl_start == std::string_view::npos ? reply.size() : expl_start + 1;
    size_t expl_end = reply.rfind('\n', score_pos);
    result.explanation =
        std::string(trim(reply.substr(expl_start, expl_end > expl_start ? expl_end - expl_start : 0)));

    std::string_view tail = after_marker_line(reply, score_pos);
    size_t spans_pos = find_marker(tail, kSpansMarker, 0);
    std::string_view score_section =
        spans_pos == std::string_view::npos ? tail : tail.substr(0, spans_pos);

    // First non-empty line after ###SCORE carries the score.
    std::string score_token;
    {
        std::istringstream lines{std::string(score_section)};
        std::string line;
        while (std::getline(lines, line)) {
            std::string_view t = trim(line);
            if (!t.empty()) {
                score_token = std::string(t);
                break;
            }
        }
    }
    while (!score_token.empty() &&
           (score_token.back() == '.' || score_token.back() == ')' || score_token.back() == ',')) {
        score_token.pop_back();
    }
    if (score_token != "0" && score_token != "1" && score_token != "2") {
        throw UnparseableReplyError("score line must be 0, 1 or 2; got '" + score_token + "'");
    }
    result.score = static_cast<PresenceScore>(score_token[0] - '0');

    if (spans_pos != std::string_view::npos) {
        std::string_view spans_text = trim(after_marker_line(tail, spans_pos));
        if (!spans_text.empty()) {
            json arr;
            try {
                arr = json::parse(spans_text);
            } catch (const json::exception& e) {
                throw UnparseableReplyError(std::string("###SPANS section is not valid JSON: ") +
                                            e.what());
            }
            if (!arr.is_array()) {
                throw UnparseableReplyError("###SPANS section must be a JSON array");
            }
            for (const auto& sj : arr) {
                if (!sj.is_object() || !sj.contains("start") || !sj.contains("end")) {
                    result.warnings.push_back("span entry missing start/end; dropped");
                    continue;
                }
                Span s;
                s.element = element;
                s.start = sj["start"].get<int64_t>();
                s.end = sj["end"].get<int64_t>();
                s.score = result.score;
                if (s.start < 0 || s.start >= s.end || s.end > text_length) {
                    std::ostringstream w;
                    w << "span [" << s.start << "," << s.end
                      << ") out of bounds for text length " << text_length << "; dropped";
                    result.warnings.push_back(w.str());
                    continue;
                }
                result.spans.push_back(s);
            }
        }
        normalize_spans(result.spans);
    }
    return result;
}

AnnotationResult annotate_trace(std::string_view trace_text, Element element,
                                std::string_view rubric_template, const ModelClient& client) {
    const ElementInfo& info = element_info(element);
    std::map<std::string, std::string> vars;
    vars["element"] = std::string(info.display_name);
    vars["element_id"] = std::string(info.id);
    vars["trace"] = std::string(trace_text);
    std::string prompt = render_template(rubric_template, vars);
    std::string reply = client.complete(prompt);
    return parse_annotation_reply(reply, element, utf8_length(trace_text));
}

}  // namespace cogtrace
