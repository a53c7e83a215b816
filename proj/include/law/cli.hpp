#pragma once

#include "law/attribution.hpp"
#include "law/corpus.hpp"
#include "law/metrics.hpp"

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace law::cli {

struct RunConfig {
    std::filesystem::path manifest;
    int cutoff_year = 2022;
    int window = 6;
    int k = 1;
    double theta = 0.0;
    metrics::Grid grid;
    metrics::Objective objective = metrics::Objective::f1;
    std::string backend = "fixture"; // "web" | "fixture"
    std::filesystem::path fixture_dir;
    std::string model;
    std::filesystem::path profiles_dir;
    std::filesystem::path labels_path;
    std::vector<std::filesystem::path> predictions;
    std::filesystem::path report_path;
    int parallel = 1;
};

/// Builds the LLM client for a command. Injectable so tests can substitute
/// stub backends and assert that fixture runs never construct network
/// resources.
struct ClientFactory {
    std::function<std::unique_ptr<attribution::LlmClient>(const RunConfig&)> web;
    std::function<std::unique_ptr<attribution::LlmClient>(const RunConfig&)> fixture;
};

/// web: chat-completion client from LAW_LLM_ENDPOINT / LAW_LLM_API_KEY and
/// --model, caching completions into --fixture-dir when set. fixture: reads
/// --fixture-dir/<doc_id>.txt.
ClientFactory default_client_factory();

/// Exit codes: 0 success, 1 flag or input validation failure, 2 runtime
/// failure (missing fixtures, API exhaustion, unwritable outputs).
int run(int argc, const char* const* argv);
int run(int argc, const char* const* argv, const ClientFactory& factory, std::ostream& out,
        std::ostream& err);

} // namespace law::cli
