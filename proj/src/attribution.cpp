#include "law/attribution.hpp"

#include "law/error.hpp"

#ifdef LAW_HAVE_OPENSSL
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <mutex>
#include <semaphore>
#include <sstream>
#include <thread>

namespace law::attribution {

const char* to_string(ReferenceSource source) {
    return source == ReferenceSource::web_api ? "web_api" : "fixture";
}

void AttributionParams::check() const {
    if (theta < -1.0 || theta > 1.0)
        throw Error(ErrorCode::OutOfRange, "theta must be in [-1, 1], got " + std::to_string(theta));
    if (k < 1 || k > 3)
        throw Error(ErrorCode::InvalidArgument, "k must be in {1, 2, 3}, got " + std::to_string(k));
}

std::string FixtureClient::complete(const std::string& doc_id, const std::string&) {
    std::filesystem::path path = dir_ / (doc_id + ".txt");
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::FixtureMissing, doc_id + " (" + path.string() + ")");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad())
        throw Error(ErrorCode::IoError, "reading " + path.string());
    std::string text = std::move(buf).str();
    if (text.empty())
        throw Error(ErrorCode::EmptyCompletion, doc_id);
    return text;
}

namespace {

using nlohmann::json;

struct ParsedUrl {
    bool https = false;
    std::string host_port; // scheme://host[:port]
    std::string path;
};

ParsedUrl parse_endpoint(const std::string& url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
        throw Error(ErrorCode::InvalidArgument, "endpoint must be an http(s) URL: " + url);
    ParsedUrl parsed;
    std::string scheme = url.substr(0, scheme_end);
    if (scheme == "https")
        parsed.https = true;
    else if (scheme != "http")
        throw Error(ErrorCode::InvalidArgument, "unsupported scheme \"" + scheme + "\"");
    auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
        parsed.host_port = url;
        parsed.path = "/";
    } else {
        parsed.host_port = url.substr(0, path_start);
        parsed.path = url.substr(path_start);
    }
    return parsed;
}

class WebClient : public LlmClient {
public:
    explicit WebClient(WebClientConfig config)
        : config_(std::move(config)), url_(parse_endpoint(config_.endpoint)),
          in_flight_(config_.max_in_flight > 0 ? config_.max_in_flight : 1) {
#ifndef LAW_HAVE_OPENSSL
        if (url_.https)
            throw Error(ErrorCode::InvalidArgument,
                        "built without TLS support; use an http endpoint");
#endif
    }

    std::string complete(const std::string& doc_id, const std::string& prompt) override {
        json request = {
            {"model", config_.model},
            {"messages", json::array({json{{"role", "user"}, {"content", prompt}}})},
            {"temperature", 0},
        };
        const std::string body = request.dump();

        int last_status = 0;
        for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
            if (attempt > 0) {
                auto delay = std::chrono::duration<double>(config_.backoff_base_seconds *
                                                           std::pow(2.0, attempt - 1));
                std::this_thread::sleep_for(
                    std::chrono::duration_cast<std::chrono::milliseconds>(delay));
            }
            auto result = post(body);
            if (!result) {
                last_status = 0; // connection-level failure, retry
                continue;
            }
            last_status = result->status;
            if (result->status == 429 || result->status >= 500)
                continue; // transient
            if (result->status != 200)
                break;
            std::string text = parse_completion(result->body, doc_id);
            cache(doc_id, text);
            return text;
        }
        throw Error(ErrorCode::ApiError, "status " + std::to_string(last_status) + " after " +
                                             std::to_string(config_.max_retries + 1) +
                                             " attempts for " + doc_id);
    }

    ReferenceSource source() const override { return ReferenceSource::web_api; }

private:
    struct Response {
        int status;
        std::string body;
    };

    std::optional<Response> post(const std::string& body) {
        in_flight_.acquire();
        httplib::Client client(url_.host_port);
        client.set_connection_timeout(30);
        client.set_read_timeout(600);
        httplib::Headers headers;
        if (!config_.api_key.empty())
            headers.emplace("Authorization", "Bearer " + config_.api_key);
        auto result = client.Post(url_.path, headers, body, "application/json");
        in_flight_.release();
        if (!result)
            return std::nullopt;
        return Response{result->status, result->body};
    }

    std::string parse_completion(const std::string& body, const std::string& doc_id) {
        json response = json::parse(body, nullptr, false);
        if (response.is_discarded())
            throw Error(ErrorCode::ApiError, "unparseable response for " + doc_id);
        std::string text;
        try {
            text = response.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const json::exception&) {
            throw Error(ErrorCode::ApiError, "response lacks choices[0].message.content for " +
                                                 doc_id);
        }
        if (text.empty())
            throw Error(ErrorCode::EmptyCompletion, doc_id);
        return text;
    }

    void cache(const std::string& doc_id, const std::string& text) {
        if (config_.cache_dir.empty())
            return;
        std::lock_guard<std::mutex> lock(cache_mutex_);
        std::filesystem::create_directories(config_.cache_dir);
        std::filesystem::path path = config_.cache_dir / (doc_id + ".txt");
        std::filesystem::path tmp = path;
        tmp += ".tmp";
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
        out << text;
        out.close();
        std::filesystem::rename(tmp, path);
    }

    WebClientConfig config_;
    ParsedUrl url_;
    std::counting_semaphore<64> in_flight_;
    std::mutex cache_mutex_;
};

} // namespace

std::unique_ptr<LlmClient> make_web_client(WebClientConfig config) {
    return std::make_unique<WebClient>(std::move(config));
}

std::string build_prompt(std::string_view title, std::string_view abstract) {
    if (title.empty())
        throw Error(ErrorCode::MissingTitle, "prompt needs a title");
    if (abstract.empty())
        throw Error(ErrorCode::MissingAbstract, "prompt needs an abstract");
    std::string prompt;
    prompt.reserve(140 + title.size() + abstract.size());
    prompt += "You are a scholar working on a new academic manuscript. "
              "The title of the manuscript is: ";
    prompt += title;
    prompt += ". The abstract of the manuscript is: ";
    prompt += abstract;
    prompt += ". Please write the entire manuscript.";
    return prompt;
}

std::string fetch_reference(LlmClient& client, const corpus::Document& doc) {
    std::string text = client.complete(doc.doc_id, build_prompt(doc.title, doc.abstract));
    if (text.empty())
        throw Error(ErrorCode::EmptyCompletion, doc.doc_id);
    return text;
}

double similarity(const drift::AuthorProfile& profile, const stylometry::StyleVector& delta_vec,
                  std::string_view llm_text) {
    stylometry::StyleVector llm_z =
        stylometry::standardize(profile.standardizer, stylometry::extract(llm_text));
    return stylometry::cosine(delta_vec.values, llm_z.values);
}

Verdict classify(const drift::AuthorProfile& profile, const corpus::Document& doc,
                 LlmClient& client, const AttributionParams& params) {
    params.check();
    Verdict verdict;
    verdict.doc_id = doc.doc_id;
    verdict.theta = params.theta;
    verdict.reference_source = client.source();
    verdict.anomaly_threshold = drift::anomaly_threshold(profile, params.k);

    stylometry::StyleVector raw = stylometry::extract(doc.body);
    verdict.anomaly_distance = drift::anomaly_score(profile, raw, params.comparison_target);
    verdict.anomalous = drift::is_anomalous(profile, verdict.anomaly_distance, params.k);
    if (!verdict.anomalous) {
        verdict.label = corpus::Label::human;
        return verdict;
    }

    std::string reference = fetch_reference(client, doc);
    verdict.similarity = similarity(profile, drift::delta(profile, raw), reference);
    verdict.label = *verdict.similarity > params.theta ? corpus::Label::llm_assisted
                                                       : corpus::Label::human;
    return verdict;
}

} // namespace law::attribution
