#include "law/corpus.hpp"

#include "law/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace law::corpus {

namespace {

using nlohmann::json;

std::string read_file(const std::filesystem::path& path, ErrorCode missing_code) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(missing_code, path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad())
        throw Error(ErrorCode::IoError, "reading " + path.string());
    return std::move(buf).str();
}

std::string require_string(const json& record, const char* key, std::size_t line) {
    auto it = record.find(key);
    if (it == record.end() || !it->is_string())
        throw Error(ErrorCode::MalformedRecord,
                    "line " + std::to_string(line) + ": missing or non-string \"" + key + "\"");
    return it->get<std::string>();
}

} // namespace

const char* to_string(Label label) {
    return label == Label::llm_assisted ? "llm_assisted" : "human";
}

std::optional<Label> label_from_string(std::string_view s) {
    if (s == "llm_assisted")
        return Label::llm_assisted;
    if (s == "human")
        return Label::human;
    return std::nullopt;
}

Corpus::Corpus(std::vector<Document> documents) : docs_(std::move(documents)) {
    std::sort(docs_.begin(), docs_.end(),
              [](const Document& a, const Document& b) { return a.doc_id < b.doc_id; });
    for (std::size_t i = 0; i < docs_.size(); ++i) {
        auto [_, inserted] = by_id_.emplace(docs_[i].doc_id, i);
        if (!inserted)
            throw Error(ErrorCode::DuplicateDocId, docs_[i].doc_id);
        by_author_[docs_[i].author_id].push_back(i);
    }
}

const Document* Corpus::find(std::string_view doc_id) const {
    auto it = by_id_.find(doc_id);
    return it == by_id_.end() ? nullptr : &docs_[it->second];
}

std::vector<const Document*> Corpus::by_author(std::string_view author_id) const {
    std::vector<const Document*> out;
    auto it = by_author_.find(author_id);
    if (it != by_author_.end())
        for (std::size_t i : it->second)
            out.push_back(&docs_[i]);
    return out;
}

std::vector<std::string> Corpus::author_ids() const {
    std::vector<std::string> out;
    out.reserve(by_author_.size());
    for (const auto& [author, _] : by_author_)
        out.push_back(author);
    return out;
}

bool is_valid_utf8(std::string_view bytes) {
    std::size_t i = 0;
    const auto cont = [&](std::size_t k) {
        return k < bytes.size() && (static_cast<unsigned char>(bytes[k]) & 0xC0) == 0x80;
    };
    while (i < bytes.size()) {
        unsigned char b = static_cast<unsigned char>(bytes[i]);
        if (b < 0x80) {
            i += 1;
        } else if ((b & 0xE0) == 0xC0) {
            if (b < 0xC2 || !cont(i + 1)) // C0/C1 are overlong
                return false;
            i += 2;
        } else if ((b & 0xF0) == 0xE0) {
            if (!cont(i + 1) || !cont(i + 2))
                return false;
            unsigned char b1 = static_cast<unsigned char>(bytes[i + 1]);
            if (b == 0xE0 && b1 < 0xA0) // overlong
                return false;
            if (b == 0xED && b1 >= 0xA0) // surrogate range
                return false;
            i += 3;
        } else if ((b & 0xF8) == 0xF0) {
            if (b > 0xF4 || !cont(i + 1) || !cont(i + 2) || !cont(i + 3))
                return false;
            unsigned char b1 = static_cast<unsigned char>(bytes[i + 1]);
            if (b == 0xF0 && b1 < 0x90) // overlong
                return false;
            if (b == 0xF4 && b1 >= 0x90) // beyond U+10FFFF
                return false;
            i += 4;
        } else {
            return false;
        }
    }
    return true;
}

Corpus load_manifest(const std::filesystem::path& path) {
    std::string content = read_file(path, ErrorCode::IoError);
    if (!is_valid_utf8(content))
        throw Error(ErrorCode::InvalidUtf8, path.string());

    std::vector<Document> docs;
    std::istringstream lines(content);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(lines, line)) {
        ++line_no;
        if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        json record = json::parse(line, nullptr, false);
        if (record.is_discarded() || !record.is_object())
            throw Error(ErrorCode::MalformedRecord,
                        "line " + std::to_string(line_no) + ": not a JSON object");

        Document doc;
        doc.doc_id = require_string(record, "doc_id", line_no);
        doc.author_id = require_string(record, "author_id", line_no);
        auto year_it = record.find("year");
        if (year_it == record.end() || !year_it->is_number_integer())
            throw Error(ErrorCode::MalformedRecord,
                        "line " + std::to_string(line_no) + ": missing or non-integer \"year\"");
        doc.year = year_it->get<int>();
        if (doc.year < 1900 || doc.year > 2100)
            throw Error(ErrorCode::MalformedRecord,
                        "line " + std::to_string(line_no) + ": year " + std::to_string(doc.year) +
                            " outside [1900, 2100]");
        doc.title = require_string(record, "title", line_no);
        doc.abstract = require_string(record, "abstract", line_no);

        const bool has_body = record.contains("body");
        const bool has_body_path = record.contains("body_path");
        if (has_body == has_body_path)
            throw Error(ErrorCode::MalformedRecord,
                        "line " + std::to_string(line_no) +
                            ": exactly one of \"body\" | \"body_path\" required");
        if (has_body) {
            doc.body = require_string(record, "body", line_no);
        } else {
            std::filesystem::path body_path =
                path.parent_path() / require_string(record, "body_path", line_no);
            doc.body = read_file(body_path, ErrorCode::MissingBodyFile);
            if (!is_valid_utf8(doc.body))
                throw Error(ErrorCode::InvalidUtf8, body_path.string());
        }

        if (auto it = record.find("label"); it != record.end()) {
            if (!it->is_string())
                throw Error(ErrorCode::MalformedRecord,
                            "line " + std::to_string(line_no) + ": non-string \"label\"");
            auto label = label_from_string(it->get<std::string>());
            if (!label)
                throw Error(ErrorCode::MalformedRecord,
                            "line " + std::to_string(line_no) + ": unknown label \"" +
                                it->get<std::string>() + "\"");
            doc.ground_truth_label = label;
        }
        docs.push_back(std::move(doc));
    }
    return Corpus(std::move(docs));
}

std::map<std::string, std::size_t> ValidationReport::counts_by_code() const {
    std::map<std::string, std::size_t> counts;
    for (const auto& e : errors)
        ++counts[e.code];
    for (const auto& w : warnings)
        ++counts[w.code];
    return counts;
}

ValidationReport validate(const Corpus& corpus, int cutoff_year, int window) {
    if (window < 2)
        throw Error(ErrorCode::InvalidArgument, "window must be >= 2");
    ValidationReport report;
    for (const auto& author : corpus.author_ids()) {
        std::size_t history = 0;
        for (const Document* doc : corpus.by_author(author))
            if (doc->year <= cutoff_year)
                ++history;
        if (history < static_cast<std::size_t>(window))
            report.warnings.push_back(
                {author, "InsufficientHistory",
                 "author has " + std::to_string(history) + " documents at or before " +
                     std::to_string(cutoff_year) + ", window needs " + std::to_string(window)});
    }
    for (const Document& doc : corpus.documents()) {
        if (doc.body.empty())
            report.errors.push_back({doc.doc_id, "EmptyBody", "document body is empty"});
        if (doc.year > cutoff_year) {
            if (doc.title.empty())
                report.errors.push_back(
                    {doc.doc_id, "MissingTitle", "post-cutoff document lacks a title"});
            if (doc.abstract.empty())
                report.errors.push_back(
                    {doc.doc_id, "MissingAbstract", "post-cutoff document lacks an abstract"});
        }
    }
    return report;
}

std::vector<const Document*> training_window(const Corpus& corpus, std::string_view author_id,
                                             int cutoff_year, int n) {
    std::vector<const Document*> eligible;
    for (const Document* doc : corpus.by_author(author_id))
        if (doc->year <= cutoff_year)
            eligible.push_back(doc);
    std::sort(eligible.begin(), eligible.end(), [](const Document* a, const Document* b) {
        return std::tie(a->year, a->doc_id) < std::tie(b->year, b->doc_id);
    });
    if (eligible.size() < static_cast<std::size_t>(n))
        throw Error(ErrorCode::InsufficientHistory,
                    "author " + std::string(author_id) + " needs " + std::to_string(n) +
                        " documents at or before " + std::to_string(cutoff_year) + ", found " +
                        std::to_string(eligible.size()));
    return {eligible.end() - n, eligible.end()};
}

} // namespace law::corpus
