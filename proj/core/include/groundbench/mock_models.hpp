#pragma once

// Deterministic text fragments used by the built-in mock endpoints
// (base_url "mock:<behavior>?<params>").  Tests that assert on mock-built
// benchmarks reconstruct the expected strings through these helpers instead
// of copying literals.

#include <string>

namespace groundbench::gateway {

// "<chunk_id>.t<k>" — the per-item stem both the generator and responder
// behaviors derive their text from.
std::string mock_stem(const std::string& chunk_id, int topic_ordinal);

std::string mock_topic_text(const std::string& chunk_id, int topic_ordinal);
std::string mock_question_text(const std::string& mode, const std::string& chunk_id,
                               int topic_ordinal);
// Carries the "[key]" marker that lets responder/grader behaviors identify
// the correct option without parsing prompt wording.
std::string mock_correct_option_text(const std::string& chunk_id, int topic_ordinal);
std::string mock_distractor_text(const std::string& chunk_id, int topic_ordinal,
                                 int distractor_index);
std::string mock_explanation_text(const std::string& chunk_id, int topic_ordinal);

}  // namespace groundbench::gateway
