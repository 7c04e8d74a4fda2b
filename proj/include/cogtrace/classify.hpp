#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "cogtrace/model_client.hpp"
#include "cogtrace/taxonomy.hpp"

namespace cogtrace {

struct VoteEntry {
    std::string model;
    std::optional<ProblemType> vote;  // unset on client failure or unparseable reply
    std::string error;
    std::string raw_reply;
};

struct ClassificationResult {
    std::optional<ProblemType> label;   // unset when adjudication is needed
    bool needs_adjudication = false;
    std::array<VoteEntry, 3> votes;
};

// Parses one voter's reply: the last non-empty line must name a problem type
// (id or display name, case-insensitive).
std::optional<ProblemType> parse_vote_reply(std::string_view reply);

// Majority vote across three clients. Two agreeing valid votes decide the
// label; anything else (three-way disagreement, or too many failed votes)
// returns needs_adjudication with the full vote record. Client failures are
// captured per vote, never propagated.
ClassificationResult classify_problem(std::string_view problem_text,
                                      const std::array<ModelClient, 3>& voters,
                                      std::string_view template_text);

struct JudgeResult {
    bool correct = false;
    std::string raw_reply;  // stored for audit
};

// Renders the judge template ({{problem}}, {{response}}, {{reference}}),
// dispatches it, and parses the ###VERDICT marker followed by
// "correct"/"incorrect". Throws ClientError / UnparseableReplyError.
JudgeResult judge_correctness(std::string_view problem, std::string_view response,
                              std::string_view reference, const ModelClient& judge,
                              std::string_view template_text);

bool parse_judge_reply(std::string_view reply);

}  // namespace cogtrace
