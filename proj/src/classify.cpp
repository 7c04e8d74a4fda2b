#include "cogtrace/classify.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "cogtrace/errors.hpp"
#include "cogtrace/template.hpp"

namespace cogtrace {

namespace {

std::string_view trim(std::string_view s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string last_non_empty_line(std::string_view text) {
    std::string result;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        std::string_view t = trim(line);
        if (!t.empty()) result = std::string(t);
    }
    return result;
}

std::string types_listing() {
    std::string out;
    for (const auto& t : all_problem_types()) {
        if (!out.empty()) out += ", ";
        out += t.id;
    }
    return out;
}

}  // namespace

std::optional<ProblemType> parse_vote_reply(std::string_view reply) {
    std::string line = last_non_empty_line(reply);
    if (line.empty()) return std::nullopt;
    // Tolerate surrounding punctuation like "Answer: dilemma."
    while (!line.empty() && (line.back() == '.' || line.back() == '!' || line.back() == '"')) {
        line.pop_back();
    }
    if (auto colon = line.rfind(':'); colon != std::string::npos) {
        std::string_view after = trim(std::string_view(line).substr(colon + 1));
        if (const ProblemTypeInfo* info = find_problem_type(after)) {
            return info->type;
        }
    }
    if (const ProblemTypeInfo* info = find_problem_type(line)) {
        return info->type;
    }
    return std::nullopt;
}

ClassificationResult classify_problem(std::string_view problem_text,
                                      const std::array<ModelClient, 3>& voters,
                                      std::string_view template_text) {
    std::map<std::string, std::string> vars;
    vars["problem"] = std::string(problem_text);
    vars["types"] = types_listing();
    std::string prompt = render_template(template_text, vars);

    ClassificationResult result;
    for (size_t i = 0; i < voters.size(); ++i) {
        VoteEntry& entry = result.votes[i];
        entry.model = voters[i].model();
        try {
            entry.raw_reply = voters[i].complete(prompt);
            entry.vote = parse_vote_reply(entry.raw_reply);
            if (!entry.vote) {
                entry.error = "reply does not name a problem type";
            }
        } catch (const ClientError& e) {
            entry.error = e.what();
        }
    }

    // Count valid votes; order of clients never matters.
    std::map<ProblemType, int> counts;
    for (const auto& entry : result.votes) {
        if (entry.vote) counts[*entry.vote] += 1;
    }
    for (const auto& [type, count] : counts) {
        if (count >= 2) {
            result.label = type;
            return result;
        }
    }
    // Unanimity over a single valid vote cannot be claimed; 3 distinct valid
    // votes is the paper's manual-adjudication path.
    result.needs_adjudication = true;
    return result;
}

bool parse_judge_reply(std::string_view reply) {
    constexpr std::string_view marker = "###VERDICT";
    size_t pos = reply.rfind(marker);
    if (pos == std::string_view::npos) {
        throw UnparseableReplyError("judge reply missing ###VERDICT marker");
    }
    std::istringstream in{std::string(reply.substr(pos + marker.size()))};
    std::string line;
    while (std::getline(in, line)) {
        std::string token{trim(line)};
        if (token.empty()) continue;
        std::transform(token.begin(), token.end(), token.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        while (!token.empty() && (token.back() == '.' || token.back() == '!')) token.pop_back();
        if (token == "correct") return true;
        if (token == "incorrect") return false;
        throw UnparseableReplyError("verdict must be 'correct' or 'incorrect'; got '" + token +
                                    "'");
    }
    throw UnparseableReplyError("judge reply has no verdict after ###VERDICT");
}

JudgeResult judge_correctness(std::string_view problem, std::string_view response,
                              std::string_view reference, const ModelClient& judge,
                              std::string_view template_text) {
    std::map<std::string, std::string> vars;
    vars["problem"] = std::string(problem);
    vars["response"] = std::string(response);
    vars["reference"] = std::string(reference);
    std::string prompt = render_template(template_text, vars);
    JudgeResult result;
    result.raw_reply = judge.complete(prompt);
    result.correct = parse_judge_reply(result.raw_reply);
    return result;
}

}  // namespace cogtrace
