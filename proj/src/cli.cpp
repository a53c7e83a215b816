#include "law/cli.hpp"

#include "law/drift.hpp"
#include "law/error.hpp"
#include "law/profile_store.hpp"
#include "law/stylometry.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <thread>

namespace law::cli {
namespace {

using nlohmann::json;

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kRuntime = 2;

std::string env_or_empty(const char* name) {
    const char* value = std::getenv(name);
    return value ? std::string(value) : std::string();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error(ErrorCode::IoError, "cannot write " + path.string());
    out << text;
    if (!out)
        throw Error(ErrorCode::IoError, "short write to " + path.string());
}

void write_atomic(const std::filesystem::path& path, const std::string& text) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    write_text_file(tmp, text);
    std::filesystem::rename(tmp, path);
}

json opt_num(const std::optional<double>& value) { return value ? json(*value) : json(); }

/// Contiguous bool storage usable as std::span<const bool>; std::vector<bool>
/// is bit-packed and cannot be.
struct FlagArray {
    std::unique_ptr<bool[]> data;
    std::size_t count = 0;

    explicit FlagArray(const std::vector<int>& bits)
        : data(std::make_unique<bool[]>(bits.size())), count(bits.size()) {
        for (std::size_t i = 0; i < count; ++i)
            data[i] = bits[i] != 0;
    }

    operator std::span<const bool>() const { return {data.get(), count}; }
};

// --- input files ------------------------------------------------------

std::vector<std::pair<std::size_t, json>> read_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::IoError, "cannot read " + path.string());
    std::vector<std::pair<std::size_t, json>> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos)
            continue;
        json record = json::parse(line, nullptr, false);
        if (record.is_discarded() || !record.is_object())
            throw Error(ErrorCode::MalformedRecord, path.string() + " line " +
                                                        std::to_string(line_no) +
                                                        ": not a JSON object");
        records.emplace_back(line_no, std::move(record));
    }
    return records;
}

struct PredRecord {
    std::string doc_id;
    std::optional<double> score;
    std::optional<corpus::Label> label;
};

std::vector<PredRecord> read_predictions(const std::filesystem::path& path) {
    std::vector<PredRecord> out;
    std::set<std::string> seen;
    for (auto& [line_no, record] : read_jsonl(path)) {
        const std::string where = path.string() + " line " + std::to_string(line_no);
        PredRecord pr;
        if (!record.contains("doc_id") || !record["doc_id"].is_string())
            throw Error(ErrorCode::MalformedRecord, where + ": doc_id must be a string");
        pr.doc_id = record["doc_id"].get<std::string>();
        if (!seen.insert(pr.doc_id).second)
            throw Error(ErrorCode::DuplicateDocId, where + ": " + pr.doc_id);
        if (record.contains("score")) {
            if (!record["score"].is_number())
                throw Error(ErrorCode::MalformedRecord, where + ": score must be a number");
            pr.score = record["score"].get<double>();
        }
        if (record.contains("label")) {
            if (!record["label"].is_string())
                throw Error(ErrorCode::MalformedRecord, where + ": label must be a string");
            pr.label = corpus::label_from_string(record["label"].get<std::string>());
            if (!pr.label)
                throw Error(ErrorCode::MalformedRecord,
                            where + ": label must be \"llm_assisted\" or \"human\"");
        }
        if (!pr.score && !pr.label)
            throw Error(ErrorCode::MalformedRecord, where + ": record needs a score or a label");
        out.push_back(std::move(pr));
    }
    if (out.empty())
        throw Error(ErrorCode::MalformedRecord, path.string() + ": no records");
    return out;
}

std::map<std::string, corpus::Label> read_labels(const std::filesystem::path& path) {
    std::map<std::string, corpus::Label> out;
    for (const auto& pr : read_predictions(path)) {
        if (!pr.label)
            throw Error(ErrorCode::MalformedRecord,
                        path.string() + ": " + pr.doc_id + " has no label");
        out.emplace(pr.doc_id, *pr.label);
    }
    return out;
}

// --- shared pipeline --------------------------------------------------

void print_issues(const corpus::ValidationReport& report, std::ostream& stream) {
    for (const auto& issue : report.errors)
        stream << "error " << issue.where << " [" << issue.code << "]: " << issue.message << '\n';
    for (const auto& issue : report.warnings)
        stream << "warning " << issue.where << " [" << issue.code << "]: " << issue.message
               << '\n';
}

bool load_corpus_checked(const RunConfig& cfg, std::ostream& err, corpus::Corpus& out) {
    try {
        out = corpus::load_manifest(cfg.manifest);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return false;
    }
    auto report = corpus::validate(out, cfg.cutoff_year, cfg.window);
    print_issues(report, err);
    return report.ok();
}

std::vector<const corpus::Document*> post_cutoff_docs(const corpus::Corpus& corpus, int cutoff) {
    std::vector<const corpus::Document*> docs;
    for (const auto& doc : corpus.documents())
        if (doc.year > cutoff)
            docs.push_back(&doc);
    return docs;
}

void for_each_index(std::size_t count, int workers,
                    const std::function<void(std::size_t)>& body) {
    std::size_t cap = std::min<std::size_t>(count, workers < 1 ? 1 : workers);
    if (cap < 2) {
        for (std::size_t i = 0; i < count; ++i)
            body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(cap);
    for (std::size_t w = 0; w < cap; ++w)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < count;)
                body(i);
        });
    for (auto& t : pool)
        t.join();
}

struct DocOutcome {
    const corpus::Document* doc = nullptr;
    std::optional<attribution::Verdict> verdict;
    std::string error;
};

void load_profiles(const std::vector<const corpus::Document*>& docs,
                   const std::filesystem::path& dir,
                   std::map<std::string, drift::AuthorProfile>& profiles,
                   std::map<std::string, std::string>& errors) {
    for (const auto* doc : docs) {
        if (profiles.count(doc->author_id) != 0 || errors.count(doc->author_id) != 0)
            continue;
        try {
            profiles.emplace(doc->author_id,
                             corpus::load_profile(dir / corpus::profile_file_name(doc->author_id)));
        } catch (const std::exception& e) {
            errors.emplace(doc->author_id, e.what());
        }
    }
}

std::vector<DocOutcome> run_pipeline(const std::vector<const corpus::Document*>& docs,
                                     const std::map<std::string, drift::AuthorProfile>& profiles,
                                     const std::map<std::string, std::string>& profile_errors,
                                     attribution::LlmClient& client,
                                     const attribution::AttributionParams& params, int parallel) {
    std::vector<DocOutcome> rows(docs.size());
    for_each_index(docs.size(), parallel, [&](std::size_t i) {
        DocOutcome& row = rows[i];
        row.doc = docs[i];
        auto profile = profiles.find(docs[i]->author_id);
        if (profile == profiles.end()) {
            auto why = profile_errors.find(docs[i]->author_id);
            row.error = why != profile_errors.end()
                            ? why->second
                            : "no profile for author " + docs[i]->author_id;
            return;
        }
        try {
            row.verdict = attribution::classify(profile->second, *docs[i], client, params);
        } catch (const std::exception& e) {
            row.error = e.what();
        }
    });
    return rows;
}

std::string render_verdict_report(const std::vector<DocOutcome>& rows) {
    std::ostringstream body;
    for (const auto& row : rows) {
        json record;
        if (!row.error.empty()) {
            record = {{"doc_id", row.doc->doc_id},
                      {"author_id", row.doc->author_id},
                      {"error", row.error}};
        } else {
            const auto& v = *row.verdict;
            record = {{"doc_id", v.doc_id},
                      {"author_id", row.doc->author_id},
                      {"anomaly_distance", v.anomaly_distance},
                      {"anomaly_threshold", v.anomaly_threshold},
                      {"anomalous", v.anomalous},
                      {"similarity", opt_num(v.similarity)},
                      {"theta", v.theta},
                      {"label", corpus::to_string(v.label)}};
        }
        body << record.dump() << '\n';
    }
    return std::move(body).str();
}

// --- commands ---------------------------------------------------------

int cmd_validate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    corpus::Corpus corpus;
    try {
        corpus = corpus::load_manifest(cfg.manifest);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }
    auto report = corpus::validate(corpus, cfg.cutoff_year, cfg.window);
    print_issues(report, out);
    out << corpus.documents().size() << " documents, " << report.errors.size() << " errors, "
        << report.warnings.size() << " warnings\n";
    return report.ok() ? kOk : kUsage;
}

int cmd_profile(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    corpus::Corpus corpus;
    if (!load_corpus_checked(cfg, err, corpus))
        return kUsage;
    drift::DriftConfig dcfg;
    dcfg.window = cfg.window;
    dcfg.k = cfg.k;
    try {
        dcfg.check();
        std::filesystem::create_directories(cfg.profiles_dir);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }

    std::size_t written = 0;
    std::size_t skipped = 0;
    std::size_t failed = 0;
    for (const auto& author : corpus.author_ids()) {
        std::vector<const corpus::Document*> window;
        try {
            window = corpus::training_window(corpus, author, cfg.cutoff_year, cfg.window);
        } catch (const std::exception& e) {
            err << "warning: skipping " << author << ": " << e.what() << '\n';
            ++skipped;
            continue;
        }
        try {
            auto fit = drift::fit_profile(window, dcfg);
            for (const auto& warning : fit.warnings)
                err << "warning: " << author << ": " << warning << '\n';
            out << "wrote " << corpus::store_profile(fit.profile, cfg.profiles_dir).string()
                << '\n';
            ++written;
        } catch (const std::exception& e) {
            err << "error: " << author << ": " << e.what() << '\n';
            ++failed;
        }
    }
    out << written << " profiles written, " << skipped << " authors skipped\n";
    return failed == 0 ? kOk : kRuntime;
}

int cmd_genref(const RunConfig& cfg, const ClientFactory& factory, std::ostream& out,
               std::ostream& err) {
    corpus::Corpus corpus;
    if (!load_corpus_checked(cfg, err, corpus))
        return kUsage;
    std::unique_ptr<attribution::LlmClient> client;
    try {
        client = factory.web(cfg);
        std::filesystem::create_directories(cfg.fixture_dir);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }

    auto docs = post_cutoff_docs(corpus, cfg.cutoff_year);
    std::vector<std::string> failures(docs.size());
    std::vector<int> generated(docs.size(), 0);
    for_each_index(docs.size(), cfg.parallel, [&](std::size_t i) {
        const auto* doc = docs[i];
        auto path = cfg.fixture_dir / (doc->doc_id + ".txt");
        if (std::filesystem::exists(path))
            return;
        try {
            write_atomic(path, attribution::fetch_reference(*client, *doc));
            generated[i] = 1;
        } catch (const std::exception& e) {
            failures[i] = e.what();
        }
    });

    std::size_t failed = 0;
    std::size_t fresh = 0;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        if (!failures[i].empty()) {
            err << json{{"doc_id", docs[i]->doc_id}, {"error", failures[i]}}.dump() << '\n';
            ++failed;
        } else if (generated[i] != 0) {
            out << "generated " << docs[i]->doc_id << '\n';
            ++fresh;
        } else {
            out << "cached " << docs[i]->doc_id << '\n';
        }
    }
    out << docs.size() << " documents, " << fresh << " generated, " << failed << " failed\n";
    return failed == 0 ? kOk : kRuntime;
}

int cmd_detect(const RunConfig& cfg, const ClientFactory& factory, std::ostream& out,
               std::ostream& err) {
    corpus::Corpus corpus;
    if (!load_corpus_checked(cfg, err, corpus))
        return kUsage;
    attribution::AttributionParams params;
    params.theta = cfg.theta;
    params.k = cfg.k;
    std::unique_ptr<attribution::LlmClient> client;
    try {
        params.check();
        client = cfg.backend == "fixture" ? factory.fixture(cfg) : factory.web(cfg);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }

    auto docs = post_cutoff_docs(corpus, cfg.cutoff_year);
    std::map<std::string, drift::AuthorProfile> profiles;
    std::map<std::string, std::string> profile_errors;
    load_profiles(docs, cfg.profiles_dir, profiles, profile_errors);

    auto rows = run_pipeline(docs, profiles, profile_errors, *client, params, cfg.parallel);
    std::string report = render_verdict_report(rows);

    std::size_t failed = 0;
    std::size_t positive = 0;
    for (const auto& row : rows) {
        if (!row.error.empty())
            ++failed;
        else if (row.verdict->label == corpus::Label::llm_assisted)
            ++positive;
    }

    std::ostream* summary = &out;
    if (cfg.report_path.empty()) {
        out << report;
        summary = &err;
    } else {
        try {
            write_text_file(cfg.report_path, report);
        } catch (const std::exception& e) {
            err << "error: " << e.what() << '\n';
            return kRuntime;
        }
    }
    *summary << docs.size() << " documents, " << positive << " llm_assisted, " << failed
             << " failures\n";
    return failed == 0 ? kOk : kRuntime;
}

int cmd_tune(const RunConfig& cfg, const ClientFactory& factory, std::ostream& out,
             std::ostream& err) {
    std::vector<double> scores;
    std::vector<int> truth;

    if (!cfg.predictions.empty()) {
        if (cfg.predictions.size() > 1) {
            err << "error: tune takes a single --predictions file\n";
            return kUsage;
        }
        std::vector<PredRecord> records;
        std::map<std::string, corpus::Label> labels;
        bool labels_from_file = !cfg.labels_path.empty();
        try {
            records = read_predictions(cfg.predictions[0]);
            if (labels_from_file)
                labels = read_labels(cfg.labels_path);
        } catch (const std::exception& e) {
            err << "error: " << e.what() << '\n';
            return kUsage;
        }
        for (const auto& record : records) {
            if (!record.score) {
                err << "error: " << record.doc_id << " has no score\n";
                return kUsage;
            }
            std::optional<corpus::Label> label = record.label;
            if (labels_from_file) {
                auto found = labels.find(record.doc_id);
                label = found == labels.end() ? std::nullopt
                                              : std::optional<corpus::Label>(found->second);
            }
            if (!label) {
                err << "error: no label for " << record.doc_id << '\n';
                return kUsage;
            }
            scores.push_back(*record.score);
            truth.push_back(*label == corpus::Label::llm_assisted ? 1 : 0);
        }
    } else if (!cfg.manifest.empty()) {
        corpus::Corpus corpus;
        if (!load_corpus_checked(cfg, err, corpus))
            return kUsage;
        std::map<std::string, corpus::Label> labels;
        if (!cfg.labels_path.empty()) {
            try {
                labels = read_labels(cfg.labels_path);
            } catch (const std::exception& e) {
                err << "error: " << e.what() << '\n';
                return kUsage;
            }
        }
        auto docs = post_cutoff_docs(corpus, cfg.cutoff_year);
        std::vector<int> doc_truth;
        for (const auto* doc : docs) {
            std::optional<corpus::Label> label = doc->ground_truth_label;
            if (!cfg.labels_path.empty()) {
                auto found = labels.find(doc->doc_id);
                label = found == labels.end() ? std::nullopt
                                              : std::optional<corpus::Label>(found->second);
            }
            if (!label) {
                err << "error: no label for " << doc->doc_id << '\n';
                return kUsage;
            }
            doc_truth.push_back(*label == corpus::Label::llm_assisted ? 1 : 0);
        }

        attribution::AttributionParams params;
        params.k = cfg.k;
        std::unique_ptr<attribution::LlmClient> client;
        try {
            params.check();
            client = cfg.backend == "fixture" ? factory.fixture(cfg) : factory.web(cfg);
        } catch (const std::exception& e) {
            err << "error: " << e.what() << '\n';
            return kUsage;
        }
        std::map<std::string, drift::AuthorProfile> profiles;
        std::map<std::string, std::string> profile_errors;
        load_profiles(docs, cfg.profiles_dir, profiles, profile_errors);
        auto rows = run_pipeline(docs, profiles, profile_errors, *client, params, cfg.parallel);
        std::size_t failed = 0;
        for (const auto& row : rows) {
            if (!row.error.empty()) {
                err << json{{"doc_id", row.doc->doc_id}, {"error", row.error}}.dump() << '\n';
                ++failed;
            }
        }
        if (failed != 0)
            return kRuntime;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            // Non-anomalous documents carry no similarity; the cosine floor
            // keeps them below every threshold on the default grid.
            scores.push_back(rows[i].verdict->similarity.value_or(-1.0));
            truth.push_back(doc_truth[i]);
        }
    } else {
        err << "error: tune needs --predictions or --manifest\n";
        return kUsage;
    }

    metrics::TuneResult result;
    try {
        result = metrics::tune_threshold(scores, FlagArray(truth), cfg.grid, cfg.objective);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }
    out << json{{"theta_star", result.theta},
                {"objective", cfg.objective == metrics::Objective::f1 ? "f1" : "accuracy"},
                {"objective_value", opt_num(result.objective_value)},
                {"count", scores.size()}}
               .dump()
        << '\n';
    return kOk;
}

int cmd_evaluate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    std::map<std::string, corpus::Label> label_map;
    try {
        label_map = read_labels(cfg.labels_path);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }

    std::vector<std::string> ids;
    std::vector<int> truth_bits;
    for (const auto& [doc_id, label] : label_map) {
        ids.push_back(doc_id);
        truth_bits.push_back(label == corpus::Label::llm_assisted ? 1 : 0);
    }

    struct Detector {
        std::string name;
        std::vector<int> preds; // aligned with ids
    };
    std::vector<Detector> detectors;
    std::set<std::string> names;
    for (const auto& path : cfg.predictions) {
        Detector detector;
        detector.name = path.stem().string();
        if (!names.insert(detector.name).second) {
            err << "error: duplicate detector name " << detector.name << '\n';
            return kUsage;
        }
        std::map<std::string, PredRecord> by_id;
        try {
            for (auto& record : read_predictions(path))
                by_id.emplace(record.doc_id, std::move(record));
        } catch (const std::exception& e) {
            err << "error: " << e.what() << '\n';
            return kUsage;
        }
        for (const auto& [doc_id, record] : by_id) {
            if (label_map.find(doc_id) == label_map.end()) {
                err << "error: " << detector.name << " predicts unlabeled document " << doc_id
                    << '\n';
                return kUsage;
            }
        }
        for (const auto& doc_id : ids) {
            auto found = by_id.find(doc_id);
            if (found == by_id.end()) {
                err << "error: " << detector.name << " has no prediction for " << doc_id << '\n';
                return kUsage;
            }
            const PredRecord& record = found->second;
            bool positive = record.label ? *record.label == corpus::Label::llm_assisted
                                         : *record.score > cfg.theta;
            detector.preds.push_back(positive ? 1 : 0);
        }
        detectors.push_back(std::move(detector));
    }

    FlagArray truth(truth_bits);
    json detectors_json = json::object();
    std::vector<metrics::ConfusionMatrix> matrices;
    for (const auto& detector : detectors) {
        auto cm = metrics::confusion(truth, FlagArray(detector.preds));
        auto ms = metrics::metric_set(cm);
        matrices.push_back(cm);
        detectors_json[detector.name] = {
            {"confusion", {{"tp", cm.tp}, {"fp", cm.fp}, {"tn", cm.tn}, {"fn", cm.fn}}},
            {"accuracy", opt_num(ms.accuracy)},
            {"precision", opt_num(ms.precision)},
            {"recall", opt_num(ms.recall)},
            {"f1", opt_num(ms.f1)},
            {"fpr", opt_num(ms.fpr)},
        };
    }

    json omnibus;
    if (detectors.size() < 2) {
        omnibus = {{"skipped", "needs at least two detectors"}};
    } else {
        std::vector<long> flagged;
        std::vector<long> passed;
        for (const auto& cm : matrices) {
            flagged.push_back(cm.fp);
            passed.push_back(cm.tn);
        }
        try {
            auto result = metrics::chi2_homogeneity(flagged, passed);
            omnibus = {{"stat", result.stat}, {"df", result.df}, {"p", result.p}};
        } catch (const std::exception& e) {
            omnibus = {{"skipped", e.what()}};
        }
    }

    json pairwise = json::array();
    json cohen = json::array();
    {
        struct Pair {
            std::size_t a, b;
            metrics::McNemarResult mcnemar;
        };
        std::vector<Pair> pairs;
        std::vector<double> raw_p;
        for (std::size_t a = 0; a < detectors.size(); ++a) {
            for (std::size_t b = a + 1; b < detectors.size(); ++b) {
                long only_a = 0;
                long only_b = 0;
                for (std::size_t i = 0; i < ids.size(); ++i) {
                    bool a_right = detectors[a].preds[i] == truth_bits[i];
                    bool b_right = detectors[b].preds[i] == truth_bits[i];
                    if (a_right && !b_right)
                        ++only_a;
                    else if (!a_right && b_right)
                        ++only_b;
                }
                pairs.push_back({a, b, metrics::mcnemar(only_a, only_b)});
                raw_p.push_back(pairs.back().mcnemar.p);

                std::vector<int> col_a = detectors[a].preds;
                std::vector<int> col_b = detectors[b].preds;
                cohen.push_back({{"a", detectors[a].name},
                                 {"b", detectors[b].name},
                                 {"kappa", metrics::cohens_kappa(col_a, col_b)}});
            }
        }
        auto adjusted = metrics::bonferroni(raw_p);
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            pairwise.push_back({{"a", detectors[pairs[i].a].name},
                                {"b", detectors[pairs[i].b].name},
                                {"stat", pairs[i].mcnemar.stat},
                                {"p", pairs[i].mcnemar.p},
                                {"p_bonferroni", adjusted[i]}});
        }
    }

    json fleiss;
    if (detectors.size() < 2) {
        fleiss = {{"skipped", "needs at least two detectors"}};
    } else {
        metrics::RatingTable table;
        table.labels.resize(ids.size());
        for (std::size_t i = 0; i < ids.size(); ++i)
            for (const auto& detector : detectors)
                table.labels[i].push_back(detector.preds[i]);
        try {
            fleiss = metrics::fleiss_kappa(table.to_category_counts());
        } catch (const std::exception& e) {
            fleiss = {{"skipped", e.what()}};
        }
    }

    json report = {{"documents", ids.size()},
                   {"detectors", detectors_json},
                   {"omnibus", omnibus},
                   {"pairwise_mcnemar", pairwise},
                   {"fleiss_kappa", fleiss},
                   {"cohens_kappa", cohen}};
    std::string text = report.dump(2) + "\n";
    if (cfg.report_path.empty()) {
        out << text;
    } else {
        try {
            write_text_file(cfg.report_path, text);
        } catch (const std::exception& e) {
            err << "error: " << e.what() << '\n';
            return kRuntime;
        }
        out << "wrote " << cfg.report_path.string() << '\n';
    }
    return kOk;
}

} // namespace

ClientFactory default_client_factory() {
    ClientFactory factory;
    factory.web = [](const RunConfig& cfg) -> std::unique_ptr<attribution::LlmClient> {
        attribution::WebClientConfig wc;
        wc.endpoint = env_or_empty("LAW_LLM_ENDPOINT");
        wc.api_key = env_or_empty("LAW_LLM_API_KEY");
        wc.model = cfg.model;
        wc.cache_dir = cfg.fixture_dir;
        wc.max_in_flight = cfg.parallel < 1 ? 1 : cfg.parallel;
        if (wc.endpoint.empty())
            throw Error(ErrorCode::InvalidArgument,
                        "LAW_LLM_ENDPOINT is not set; the web backend needs a chat-completion "
                        "URL");
        if (wc.model.empty())
            throw Error(ErrorCode::InvalidArgument, "--model is required with the web backend");
        return attribution::make_web_client(std::move(wc));
    };
    factory.fixture = [](const RunConfig& cfg) -> std::unique_ptr<attribution::LlmClient> {
        if (cfg.fixture_dir.empty())
            throw Error(ErrorCode::InvalidArgument,
                        "--fixture-dir is required with the fixture backend");
        return std::make_unique<attribution::FixtureClient>(cfg.fixture_dir);
    };
    return factory;
}

int run(int argc, const char* const* argv, const ClientFactory& factory, std::ostream& out,
        std::ostream& err) {
    RunConfig cfg;
    std::string objective = "f1";

    CLI::App app{"Writing-style drift detection and evaluation harness"};
    app.name("law");
    app.require_subcommand(1);

    const auto add_manifest = [&](CLI::App* cmd) {
        cmd->add_option("--manifest", cfg.manifest, "JSON Lines corpus manifest")->required();
    };
    const auto add_windowing = [&](CLI::App* cmd) {
        cmd->add_option("--cutoff-year", cfg.cutoff_year,
                        "last year considered training history");
        cmd->add_option("--window", cfg.window, "training documents per author")
            ->check(CLI::Range(2, 10));
    };
    const auto add_k = [&](CLI::App* cmd) {
        cmd->add_option("--k", cfg.k, "anomaly threshold multiplier")->check(CLI::Range(1, 3));
    };
    const auto add_backend = [&](CLI::App* cmd) {
        cmd->add_option("--llm-backend", cfg.backend, "reference text source")
            ->check(CLI::IsMember({"web", "fixture"}));
        cmd->add_option("--fixture-dir", cfg.fixture_dir,
                        "directory of <doc_id>.txt reference texts");
        cmd->add_option("--model", cfg.model, "model name for the web backend");
    };
    const auto add_grid = [&](CLI::App* cmd) {
        cmd->add_option("--grid-min", cfg.grid.min, "smallest candidate threshold");
        cmd->add_option("--grid-max", cfg.grid.max, "largest candidate threshold");
        cmd->add_option("--grid-step", cfg.grid.step, "grid spacing");
        cmd->add_option("--objective", objective, "tuning objective")
            ->check(CLI::IsMember({"f1", "accuracy"}));
    };
    const auto add_parallel = [&](CLI::App* cmd) {
        cmd->add_option("--parallel", cfg.parallel, "worker cap for per-document work")
            ->check(CLI::Range(1, 256));
    };

    auto* validate = app.add_subcommand("validate", "Check a manifest for schema and content "
                                                    "problems");
    add_manifest(validate);
    add_windowing(validate);

    auto* profile = app.add_subcommand("profile", "Fit and store per-author style profiles");
    add_manifest(profile);
    add_windowing(profile);
    add_k(profile);
    profile->add_option("--profiles-dir", cfg.profiles_dir, "output directory")->required();

    auto* genref = app.add_subcommand("genref", "Generate reference texts for post-cutoff "
                                                "documents into the fixture cache");
    add_manifest(genref);
    add_windowing(genref);
    genref->add_option("--fixture-dir", cfg.fixture_dir, "fixture cache directory")->required();
    genref->add_option("--model", cfg.model, "model name for the web backend");
    add_parallel(genref);

    auto* detect = app.add_subcommand("detect", "Classify post-cutoff documents");
    add_manifest(detect);
    add_windowing(detect);
    add_k(detect);
    add_backend(detect);
    detect->add_option("--theta", cfg.theta, "similarity decision threshold");
    detect->add_option("--profiles-dir", cfg.profiles_dir, "directory of stored profiles")
        ->required();
    detect->add_option("--report", cfg.report_path, "verdict report path (stdout when omitted)");
    add_parallel(detect);

    auto* tune = app.add_subcommand("tune", "Grid-search the similarity threshold");
    tune->add_option("--manifest", cfg.manifest,
                     "corpus manifest (pipeline mode; uses embedded labels)");
    add_windowing(tune);
    add_k(tune);
    add_backend(tune);
    tune->add_option("--profiles-dir", cfg.profiles_dir, "directory of stored profiles");
    tune->add_option("--predictions", cfg.predictions,
                     "JSON Lines of {doc_id, score[, label]} (file mode)");
    tune->add_option("--labels", cfg.labels_path, "JSON Lines of {doc_id, label}");
    add_grid(tune);
    add_parallel(tune);

    auto* evaluate = app.add_subcommand("evaluate", "Score detector predictions against ground "
                                                    "truth");
    evaluate->add_option("--labels", cfg.labels_path, "JSON Lines of {doc_id, label}")
        ->required();
    evaluate
        ->add_option("--predictions", cfg.predictions,
                     "one JSON Lines prediction file per detector")
        ->required();
    evaluate->add_option("--theta", cfg.theta, "threshold applied to score-only predictions");
    evaluate->add_option("--report", cfg.report_path, "report path (stdout when omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }
    cfg.objective = objective == "accuracy" ? metrics::Objective::accuracy
                                            : metrics::Objective::f1;

    try {
        if (validate->parsed())
            return cmd_validate(cfg, out, err);
        if (profile->parsed())
            return cmd_profile(cfg, out, err);
        if (genref->parsed())
            return cmd_genref(cfg, factory, out, err);
        if (detect->parsed())
            return cmd_detect(cfg, factory, out, err);
        if (tune->parsed())
            return cmd_tune(cfg, factory, out, err);
        if (evaluate->parsed())
            return cmd_evaluate(cfg, out, err);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kRuntime;
    }
    err << "error: no command selected\n";
    return kUsage;
}

int run(int argc, const char* const* argv) {
    return run(argc, argv, default_client_factory(), std::cout, std::cerr);
}

} // namespace law::cli
