#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace law::corpus {

enum class Label { llm_assisted, human };

const char* to_string(Label label);
std::optional<Label> label_from_string(std::string_view s);

struct Document {
    std::string doc_id;
    std::string author_id;
    int year = 0;
    std::string title;
    std::string abstract;
    std::string body;
    std::optional<Label> ground_truth_label;
};

/// Immutable document collection. Iteration order is ascending doc_id.
class Corpus {
public:
    Corpus() = default;
    explicit Corpus(std::vector<Document> documents);

    const std::vector<Document>& documents() const { return docs_; }
    const Document* find(std::string_view doc_id) const;
    /// Documents of one author, ascending doc_id; empty for unknown authors.
    std::vector<const Document*> by_author(std::string_view author_id) const;
    /// Sorted unique author ids.
    std::vector<std::string> author_ids() const;

private:
    std::vector<Document> docs_; // sorted by doc_id
    std::unordered_map<std::string_view, std::size_t> by_id_;
    std::map<std::string, std::vector<std::size_t>, std::less<>> by_author_;
};

/// Reads a JSON Lines manifest. Each record needs doc_id, author_id, year,
/// title, abstract, and exactly one of body | body_path (relative to the
/// manifest); optional label in {"llm_assisted","human"}.
Corpus load_manifest(const std::filesystem::path& path);

struct Issue {
    std::string where; // doc_id or "line N"
    std::string code;
    std::string message;
};

struct ValidationReport {
    std::vector<Issue> errors;
    std::vector<Issue> warnings;

    bool ok() const { return errors.empty(); }
    std::map<std::string, std::size_t> counts_by_code() const;
};

/// Content checks that never throw: per-author history depth against the
/// window, empty bodies, and missing title/abstract on post-cutoff documents.
ValidationReport validate(const Corpus& corpus, int cutoff_year, int window);

/// The n most recent documents of an author with year <= cutoff_year, sorted
/// ascending by (year, doc_id). Throws InsufficientHistory when fewer exist.
std::vector<const Document*> training_window(const Corpus& corpus, std::string_view author_id,
                                             int cutoff_year, int n);

bool is_valid_utf8(std::string_view bytes);

} // namespace law::corpus
