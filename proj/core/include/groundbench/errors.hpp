#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace groundbench {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// --- corpus ---

class EmptyDocument : public Error {
public:
    EmptyDocument() : Error("document is blank after trimming") {}
};

class MalformedRecord : public Error {
public:
    MalformedRecord(std::size_t line_no, const std::string& key, const std::string& detail)
        : Error("line " + std::to_string(line_no) + ": key '" + key + "': " + detail),
          line_no(line_no), key(key) {}
    std::size_t line_no;
    std::string key;
};

class DuplicateItemId : public Error {
public:
    explicit DuplicateItemId(const std::string& id)
        : Error("duplicate item id '" + id + "'"), id(id) {}
    std::string id;
};

// --- gateway ---

/// Common payload for errors surfaced by the model gateway.
class TransportError : public Error {
public:
    TransportError(const std::string& what, std::string endpoint, std::string call_tag)
        : Error(what + " (endpoint=" + endpoint + ", call_tag=" + call_tag + ")"),
          endpoint(std::move(endpoint)), call_tag(std::move(call_tag)) {}
    std::string endpoint;
    std::string call_tag;
};

class RateLimited : public TransportError {
public:
    RateLimited(std::string endpoint, std::string call_tag)
        : TransportError("rate limited after exhausting backoff schedule",
                         std::move(endpoint), std::move(call_tag)) {}
};

class Timeout : public TransportError {
public:
    Timeout(std::string endpoint, std::string call_tag)
        : TransportError("request timed out", std::move(endpoint), std::move(call_tag)) {}
};

class MalformedUpstreamResponse : public TransportError {
public:
    MalformedUpstreamResponse(const std::string& detail, std::string endpoint, std::string call_tag)
        : TransportError("malformed upstream response: " + detail,
                         std::move(endpoint), std::move(call_tag)) {}
};

class AuthFailure : public TransportError {
public:
    AuthFailure(std::string endpoint, std::string call_tag)
        : TransportError("authentication failed", std::move(endpoint), std::move(call_tag)) {}
};

class DimensionMismatch : public Error {
public:
    explicit DimensionMismatch(const std::string& detail)
        : Error("embedding dimension mismatch: " + detail) {}
};

// --- genesis ---

class UnparseableTopicList : public Error {
public:
    explicit UnparseableTopicList(const std::string& detail)
        : Error("unparseable topic list: " + detail) {}
};

class EmptyTopicList : public Error {
public:
    EmptyTopicList() : Error("model returned no topics") {}
};

class SchemaViolation : public Error {
public:
    explicit SchemaViolation(const std::string& reason)
        : Error("schema violation: " + reason), reason(reason) {}
    std::string reason;
};

class CorrectAnswerLost : public Error {
public:
    explicit CorrectAnswerLost(const std::string& item_id)
        : Error("no option matches the original answer after normalization (item "
                + item_id + "), flagged for manual review"),
          item_id(item_id) {}
    std::string item_id;
};

// --- quality ---

class UnparseableScores : public Error {
public:
    explicit UnparseableScores(const std::string& detail)
        : Error("unparseable judge scores: " + detail) {}
};

class OutOfRangeScore : public Error {
public:
    OutOfRangeScore(const std::string& feature, double value)
        : Error("score '" + feature + "' = " + std::to_string(value) + " outside [1,10]"),
          feature(feature), value(value) {}
    std::string feature;
    double value;
};

class MissingRecord : public Error {
public:
    explicit MissingRecord(const std::string& item_id)
        : Error("no quality record for item '" + item_id + "'"), item_id(item_id) {}
    std::string item_id;
};

// --- harness ---

class UnparseableVerdict : public Error {
public:
    explicit UnparseableVerdict(const std::string& detail)
        : Error("unparseable judge verdict: " + detail) {}
};

// --- analysis ---

class DegenerateSeries : public Error {
public:
    explicit DegenerateSeries(const std::string& detail)
        : Error("degenerate series: " + detail) {}
};

class InsufficientOverlap : public Error {
public:
    explicit InsufficientOverlap(std::size_t n)
        : Error("matrices share only " + std::to_string(n)
                + " (model, dataset) cells; need at least 2") {}
};

// --- run / cli ---

class ConfigError : public Error {
public:
    using FieldError = std::pair<std::string, std::string>;  // (field, message)

    explicit ConfigError(std::vector<FieldError> errors)
        : Error(render(errors)), errors(std::move(errors)) {}
    ConfigError(const std::string& field, const std::string& message)
        : ConfigError(std::vector<FieldError>{{field, message}}) {}
    std::vector<FieldError> errors;

private:
    static std::string render(const std::vector<FieldError>& errs) {
        std::string out = "invalid config:";
        for (const auto& [field, msg] : errs) out += "\n  " + field + ": " + msg;
        return out;
    }
};

class MissingArtifact : public Error {
public:
    MissingArtifact(const std::string& stage, const std::string& path, const std::string& hint)
        : Error("missing artifact for stage '" + stage + "': " + path + " (" + hint + ")"),
          stage(stage) {}
    std::string stage;
};

}  // namespace groundbench
