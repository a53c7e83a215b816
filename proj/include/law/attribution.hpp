#pragma once

#include "law/corpus.hpp"
#include "law/drift.hpp"
#include "law/stylometry.hpp"

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

namespace law::attribution {

enum class ReferenceSource { web_api, fixture };

const char* to_string(ReferenceSource source);

/// Produces the reference manuscript for a document. complete() is keyed by
/// doc_id so fixture and cache lookups stay stable across runs; the prompt
/// drives live generation.
class LlmClient {
public:
    virtual ~LlmClient() = default;
    virtual std::string complete(const std::string& doc_id, const std::string& prompt) = 0;
    virtual ReferenceSource source() const = 0;
};

/// Deterministic backend: returns the bytes of <dir>/<doc_id>.txt.
class FixtureClient : public LlmClient {
public:
    explicit FixtureClient(std::filesystem::path dir) : dir_(std::move(dir)) {}

    std::string complete(const std::string& doc_id, const std::string& prompt) override;
    ReferenceSource source() const override { return ReferenceSource::fixture; }

private:
    std::filesystem::path dir_;
};

struct WebClientConfig {
    std::string endpoint; // chat-completion URL, e.g. from LAW_LLM_ENDPOINT
    std::string api_key;  // bearer token, e.g. from LAW_LLM_API_KEY
    std::string model;
    std::filesystem::path cache_dir; // completions cached as <doc_id>.txt; empty = no cache
    int max_retries = 3;
    double backoff_base_seconds = 1.0; // doubles per retry
    int max_in_flight = 4;
};

/// Chat-completion backend with retry/backoff on transient failures and an
/// in-flight request cap. Every completion is written to cache_dir so later
/// runs can use the fixture backend offline.
std::unique_ptr<LlmClient> make_web_client(WebClientConfig config);

struct AttributionParams {
    double theta = 0.0; // decision threshold on the delta-vs-reference cosine
    int k = 1;
    drift::ComparisonTarget comparison_target = drift::ComparisonTarget::last;

    void check() const;
};

struct Verdict {
    std::string doc_id;
    double anomaly_distance = 0.0;
    double anomaly_threshold = 0.0;
    bool anomalous = false;
    std::optional<double> similarity; // present only for anomalous documents
    double theta = 0.0;
    corpus::Label label = corpus::Label::human;
    ReferenceSource reference_source = ReferenceSource::fixture;
};

/// The fixed generation query with title and abstract substituted verbatim.
std::string build_prompt(std::string_view title, std::string_view abstract);

/// Obtains the reference manuscript for doc via the client. Non-empty text
/// or an error; never silently empty.
std::string fetch_reference(LlmClient& client, const corpus::Document& doc);

/// Cosine between the delta vector and the reference text's style vector
/// placed in the author's z-space.
double similarity(const drift::AuthorProfile& profile, const stylometry::StyleVector& delta_vec,
                  std::string_view llm_text);

/// Full inference pipeline for one document: anomaly score -> anomaly flag
/// -> (if anomalous) reference fetch -> similarity -> label. Non-anomalous
/// documents never touch the client and are labeled human; anomalous ones
/// are llm_assisted iff similarity > theta (strict).
Verdict classify(const drift::AuthorProfile& profile, const corpus::Document& doc,
                 LlmClient& client, const AttributionParams& params);

} // namespace law::attribution
