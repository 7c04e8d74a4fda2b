#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "cogtrace/corpus.hpp"
#include "cogtrace/model_client.hpp"
#include "cogtrace/taxonomy.hpp"

namespace cogtrace {

struct AnnotationResult {
    PresenceScore score = PresenceScore::absent;
    std::string explanation;
    std::vector<Span> spans;            // validated; out-of-bounds entries dropped
    std::vector<std::string> warnings;  // one per dropped span
    std::string raw_reply;
};

// Expected reply layout (the markers the rubric templates instruct):
//   ###EXPLANATION
//   <one or more lines>
//   ###SCORE
//   <0|1|2>
//   ###SPANS            (optional)
//   [{"start": 12, "end": 80}, ...]
// Missing/misordered markers or a score outside {0,1,2} raise
// UnparseableReplyError.
AnnotationResult parse_annotation_reply(std::string_view reply, Element element,
                                        int64_t text_length);

// Renders the rubric template ({{element}}, {{element_id}}, {{definition}}
// optional, {{trace}}), dispatches it, and parses the reply. Span bounds are
// validated against the character length of trace_text.
AnnotationResult annotate_trace(std::string_view trace_text, Element element,
                                std::string_view rubric_template, const ModelClient& client);

}  // namespace cogtrace
