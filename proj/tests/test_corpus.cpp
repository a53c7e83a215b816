#include "law/corpus.hpp"

#include "law/drift.hpp"
#include "law/error.hpp"
#include "law/profile_store.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cstring>
#include <sstream>
#include <string>
#include <vector>

using namespace law;
using corpus::Document;
using testutil::catch_law_error;
using testutil::contains;
using testutil::TempDir;
using testutil::write_file;

namespace {

std::string record(const std::string& doc_id, const std::string& author, int year,
                   const std::string& body_or_path, bool use_path = false,
                   const std::string& label = "") {
    std::ostringstream line;
    line << "{\"doc_id\":\"" << doc_id << "\",\"author_id\":\"" << author
         << "\",\"year\":" << year << ",\"title\":\"Title of " << doc_id
         << "\",\"abstract\":\"Abstract of " << doc_id << "\",\""
         << (use_path ? "body_path" : "body") << "\":\"" << body_or_path << "\"";
    if (!label.empty())
        line << ",\"label\":\"" << label << "\"";
    line << "}";
    return line.str();
}

Document make_doc(const std::string& doc_id, const std::string& author, int year) {
    Document doc;
    doc.doc_id = doc_id;
    doc.author_id = author;
    doc.year = year;
    doc.title = "T";
    doc.abstract = "A";
    doc.body = "Body text for " + doc_id + ". It has two sentences.";
    return doc;
}

} // namespace

TEST_CASE("load_manifest reads inline bodies, body files, and labels") {
    TempDir tmp;
    write_file(tmp / "bodies/p2.txt", "Body from a file. With two sentences.");
    std::ostringstream manifest;
    manifest << record("p3", "bob", 2023, "Inline body three.", false, "llm_assisted") << "\n";
    manifest << "\n"; // blank lines are tolerated
    manifest << record("p1", "alice", 2020, "Inline body one.") << "\n";
    manifest << record("p2", "alice", 2021, "bodies/p2.txt", true, "human") << "\n";
    write_file(tmp / "manifest.jsonl", manifest.str());

    auto corpus = corpus::load_manifest(tmp / "manifest.jsonl");
    REQUIRE(corpus.documents().size() == 3);

    // Iteration order is ascending doc_id regardless of file order.
    CHECK(corpus.documents()[0].doc_id == "p1");
    CHECK(corpus.documents()[1].doc_id == "p2");
    CHECK(corpus.documents()[2].doc_id == "p3");

    const Document* p2 = corpus.find("p2");
    REQUIRE(p2 != nullptr);
    CHECK(p2->author_id == "alice");
    CHECK(p2->year == 2021);
    CHECK(p2->title == "Title of p2");
    CHECK(p2->abstract == "Abstract of p2");
    CHECK(p2->body == "Body from a file. With two sentences.");
    REQUIRE(p2->ground_truth_label.has_value());
    CHECK(*p2->ground_truth_label == corpus::Label::human);

    CHECK(corpus.find("p1")->ground_truth_label == std::nullopt);
    CHECK(*corpus.find("p3")->ground_truth_label == corpus::Label::llm_assisted);
    CHECK(corpus.find("nope") == nullptr);

    auto alices = corpus.by_author("alice");
    REQUIRE(alices.size() == 2);
    CHECK(alices[0]->doc_id == "p1");
    CHECK(alices[1]->doc_id == "p2");
    CHECK(corpus.by_author("ghost").empty());
    CHECK(corpus.author_ids() == std::vector<std::string>{"alice", "bob"});
}

TEST_CASE("load_manifest is deterministic") {
    TempDir tmp;
    std::ostringstream manifest;
    manifest << record("a1", "alice", 2019, "One sentence here.") << "\n";
    manifest << record("a2", "alice", 2020, "Another sentence here.") << "\n";
    write_file(tmp / "m.jsonl", manifest.str());
    auto c1 = corpus::load_manifest(tmp / "m.jsonl");
    auto c2 = corpus::load_manifest(tmp / "m.jsonl");
    REQUIRE(c1.documents().size() == c2.documents().size());
    for (std::size_t i = 0; i < c1.documents().size(); ++i) {
        CHECK(c1.documents()[i].doc_id == c2.documents()[i].doc_id);
        CHECK(c1.documents()[i].body == c2.documents()[i].body);
    }
}

TEST_CASE("load_manifest reports malformed records with their line number") {
    TempDir tmp;

    SUBCASE("missing year") {
        write_file(tmp / "m.jsonl",
                   record("p1", "a", 2020, "Good body.") + "\n" +
                       "{\"doc_id\":\"p2\",\"author_id\":\"a\",\"title\":\"T\","
                       "\"abstract\":\"A\",\"body\":\"B.\"}\n");
        auto err = catch_law_error([&] { corpus::load_manifest(tmp / "m.jsonl"); });
        REQUIRE(err.has_value());
        CHECK(err->code() == ErrorCode::MalformedRecord);
        CHECK(contains(err->what(), "line 2"));
        CHECK(contains(err->what(), "year"));
    }

    SUBCASE("non-integer year") {
        write_file(tmp / "m.jsonl",
                   "{\"doc_id\":\"p1\",\"author_id\":\"a\",\"year\":\"2020\","
                   "\"title\":\"T\",\"abstract\":\"A\",\"body\":\"B.\"}\n");
        auto err = catch_law_error([&] { corpus::load_manifest(tmp / "m.jsonl"); });
        REQUIRE(err.has_value());
        CHECK(err->code() == ErrorCode::MalformedRecord);
        CHECK(contains(err->what(), "line 1"));
    }

    SUBCASE("year outside the plausible range") {
        write_file(tmp / "m.jsonl", record("p1", "a", 1750, "Old body."));
        auto err = catch_law_error([&] { corpus::load_manifest(tmp / "m.jsonl"); });
        REQUIRE(err.has_value());
        CHECK(err->code() == ErrorCode::MalformedRecord);
        CHECK(contains(err->what(), "1750"));
    }

    SUBCASE("not a JSON object") {
        write_file(tmp / "m.jsonl", "[1, 2, 3]\n");
        auto err = catch_law_error([&] { corpus::load_manifest(tmp / "m.jsonl"); });
        REQUIRE(err.has_value());
        CHECK(err->code() == ErrorCode::MalformedRecord);
        CHECK(contains(err->what(), "line 1"));
    }

    SUBCASE("body and body_path are mutually exclusive") {
        write_file(tmp / "m.jsonl",
                   "{\"doc_id\":\"p1\",\"author_id\":\"a\",\"year\":2020,\"title\":\"T\","
                   "\"abstract\":\"A\",\"body\":\"B.\",\"body_path\":\"x.txt\"}\n");
        auto err = catch_law_error([&] { corpus::load_manifest(tmp / "m.jsonl"); });
        REQUIRE(err.has_value());
        CHECK(err->code() == ErrorCode::MalformedRecord);
        CHECK(contains(err->what(), "exactly one"));
    }

    SUBCASE("neither body nor body_path") {
        write_file(tmp / "m.jsonl",
                   "{\"doc_id\":\"p1\",\"author_id\":\"a\",\"year\":2020,\"title\":\"T\","
                   "\"abstract\":\"A\"}\n");
        auto err = catch_law_error([&] { corpus::load_manifest(tmp / "m.jsonl"); });
        REQUIRE(err.has_value());
        CHECK(err->code() == ErrorCode::MalformedRecord);
    }

    SUBCASE("unknown label value") {
        write_file(tmp / "m.jsonl", record("p1", "a", 2020, "B.", false, "alien"));
        auto err = catch_law_error([&] { corpus::load_manifest(tmp / "m.jsonl"); });
        REQUIRE(err.has_value());
        CHECK(err->code() == ErrorCode::MalformedRecord);
        CHECK(contains(err->what(), "alien"));
    }
}

TEST_CASE("load_manifest rejects duplicate doc_ids") {
    TempDir tmp;
    write_file(tmp / "m.jsonl",
               record("p1", "a", 2020, "One.") + "\n" + record("p1", "b", 2021, "Two.") + "\n");
    auto err = catch_law_error([&] { corpus::load_manifest(tmp / "m.jsonl"); });
    REQUIRE(err.has_value());
    CHECK(err->code() == ErrorCode::DuplicateDocId);
    CHECK(contains(err->what(), "p1"));
}

TEST_CASE("load_manifest surfaces file problems") {
    TempDir tmp;

    SUBCASE("missing manifest") {
        CHECK_LAW_ERROR(corpus::load_manifest(tmp / "absent.jsonl"), ErrorCode::IoError);
    }

    SUBCASE("missing body file") {
        write_file(tmp / "m.jsonl", record("p1", "a", 2020, "gone.txt", true));
        auto err = catch_law_error([&] { corpus::load_manifest(tmp / "m.jsonl"); });
        REQUIRE(err.has_value());
        CHECK(err->code() == ErrorCode::MissingBodyFile);
        CHECK(contains(err->what(), "gone.txt"));
    }

    SUBCASE("body file with invalid UTF-8") {
        write_file(tmp / "bad.txt", "ok so far \xFF\xFE not utf8");
        write_file(tmp / "m.jsonl", record("p1", "a", 2020, "bad.txt", true));
        CHECK_LAW_ERROR(corpus::load_manifest(tmp / "m.jsonl"), ErrorCode::InvalidUtf8);
    }

    SUBCASE("manifest with invalid UTF-8") {
        write_file(tmp / "m.jsonl", std::string("{\"doc_id\":\"\xC0\xAF\"}"));
        CHECK_LAW_ERROR(corpus::load_manifest(tmp / "m.jsonl"), ErrorCode::InvalidUtf8);
    }
}

TEST_CASE("is_valid_utf8 accepts well-formed and rejects malformed sequences") {
    CHECK(corpus::is_valid_utf8("plain ascii"));
    CHECK(corpus::is_valid_utf8("caf\xC3\xA9"));              // two-byte
    CHECK(corpus::is_valid_utf8("\xE2\x80\x94"));             // em dash
    CHECK(corpus::is_valid_utf8("\xF0\x9F\x8E\x89"));         // four-byte
    CHECK(corpus::is_valid_utf8(""));
    CHECK_FALSE(corpus::is_valid_utf8("\x80"));               // bare continuation
    CHECK_FALSE(corpus::is_valid_utf8("\xC3"));               // truncated
    CHECK_FALSE(corpus::is_valid_utf8("\xC0\xAF"));           // overlong two-byte
    CHECK_FALSE(corpus::is_valid_utf8("\xE0\x80\x80"));       // overlong three-byte
    CHECK_FALSE(corpus::is_valid_utf8("\xED\xA0\x80"));       // surrogate
    CHECK_FALSE(corpus::is_valid_utf8("\xF4\x90\x80\x80"));   // beyond U+10FFFF
    CHECK_FALSE(corpus::is_valid_utf8("\xFF"));
}

TEST_CASE("label round-trip") {
    CHECK(corpus::label_from_string("llm_assisted") == corpus::Label::llm_assisted);
    CHECK(corpus::label_from_string("human") == corpus::Label::human);
    CHECK(corpus::label_from_string("Human") == std::nullopt);
    CHECK(corpus::label_from_string("") == std::nullopt);
    CHECK(std::string(corpus::to_string(corpus::Label::llm_assisted)) == "llm_assisted");
    CHECK(std::string(corpus::to_string(corpus::Label::human)) == "human");
}

TEST_CASE("training_window selects the most recent pre-cutoff documents") {
    std::vector<Document> docs;
    for (int year = 2015; year <= 2022; ++year)
        docs.push_back(make_doc("d" + std::to_string(year), "alice", year));
    corpus::Corpus corpus(std::move(docs));

    auto window = corpus::training_window(corpus, "alice", 2022, 6);
    REQUIRE(window.size() == 6);
    for (int i = 0; i < 6; ++i)
        CHECK(window[static_cast<std::size_t>(i)]->year == 2017 + i);
}

TEST_CASE("training_window breaks year ties by doc_id and ignores post-cutoff documents") {
    std::vector<Document> docs;
    docs.push_back(make_doc("b-late", "alice", 2021));
    docs.push_back(make_doc("a-late", "alice", 2021));
    docs.push_back(make_doc("early", "alice", 2019));
    docs.push_back(make_doc("post", "alice", 2023)); // never eligible
    corpus::Corpus corpus(std::move(docs));

    auto window = corpus::training_window(corpus, "alice", 2022, 3);
    REQUIRE(window.size() == 3);
    CHECK(window[0]->doc_id == "early");
    CHECK(window[1]->doc_id == "a-late");
    CHECK(window[2]->doc_id == "b-late");
}

TEST_CASE("training_window throws InsufficientHistory with the needed and found counts") {
    std::vector<Document> docs;
    for (int year = 2018; year <= 2022; ++year)
        docs.push_back(make_doc("d" + std::to_string(year), "alice", year));
    corpus::Corpus corpus(std::move(docs));

    auto err = catch_law_error([&] { corpus::training_window(corpus, "alice", 2022, 6); });
    REQUIRE(err.has_value());
    CHECK(err->code() == ErrorCode::InsufficientHistory);
    CHECK(contains(err->what(), "6"));
    CHECK(contains(err->what(), "5"));

    CHECK_LAW_ERROR(corpus::training_window(corpus, "nobody", 2022, 2),
                    ErrorCode::InsufficientHistory);
}

TEST_CASE("validate reports content issues without throwing") {
    std::vector<Document> docs;
    for (int year = 2017; year <= 2022; ++year)
        docs.push_back(make_doc("a" + std::to_string(year), "alice", year));
    docs.push_back(make_doc("thin1", "bob", 2021));
    auto empty_body = make_doc("empty1", "carol", 2020);
    empty_body.body = "";
    docs.push_back(empty_body);
    auto bare = make_doc("bare1", "alice", 2023);
    bare.title = "";
    bare.abstract = "";
    docs.push_back(bare);
    corpus::Corpus corpus(std::move(docs));

    auto report = corpus::validate(corpus, 2022, 6);
    CHECK_FALSE(report.ok());

    auto counts = report.counts_by_code();
    CHECK(counts["InsufficientHistory"] == 2); // bob and carol lack history
    CHECK(counts["EmptyBody"] == 1);
    CHECK(counts["MissingTitle"] == 1);
    CHECK(counts["MissingAbstract"] == 1);

    bool thin_bob = false;
    for (const auto& w : report.warnings)
        thin_bob = thin_bob || (w.where == "bob" && w.code == "InsufficientHistory");
    CHECK(thin_bob);

    // A clean corpus passes.
    std::vector<Document> clean;
    for (int year = 2017; year <= 2022; ++year)
        clean.push_back(make_doc("c" + std::to_string(year), "alice", year));
    auto clean_report = corpus::validate(corpus::Corpus(std::move(clean)), 2022, 6);
    CHECK(clean_report.ok());
    CHECK(clean_report.warnings.empty());

    CHECK_LAW_ERROR(corpus::validate(corpus::Corpus(), 2022, 1), ErrorCode::InvalidArgument);
}

TEST_CASE("profile files round-trip exactly") {
    std::vector<Document> docs;
    const char* bodies[3] = {
        "The first body talks about rivers. It has a second sentence, and a third one too.",
        "The second body is different; it leans on semicolons. Short close.",
        "A third body asks questions? It also exclaims! Then it settles down calmly.",
    };
    for (int i = 0; i < 3; ++i) {
        auto doc = make_doc("p" + std::to_string(i + 1), "ann/ie:x", 2019 + i);
        doc.body = bodies[i];
        docs.push_back(doc);
    }
    drift::DriftConfig cfg;
    cfg.window = 3;
    auto fit = drift::fit_profile(std::span<const Document>(docs), cfg);

    TempDir tmp;
    auto path = corpus::store_profile(fit.profile, tmp.path());
    CHECK(path.filename().string() == "ann_ie_x.json"); // sanitized author id
    auto loaded = corpus::load_profile(path);

    CHECK(loaded.author_id == fit.profile.author_id);
    CHECK(loaded.schema_id() == fit.profile.schema_id());
    CHECK(loaded.window_doc_ids == fit.profile.window_doc_ids);
    CHECK(loaded.standardizer.kept_mask == fit.profile.standardizer.kept_mask);

    // Numeric fields are bit-identical after the round-trip.
    REQUIRE(loaded.standardizer.means.size() == fit.profile.standardizer.means.size());
    CHECK(std::memcmp(loaded.standardizer.means.data(), fit.profile.standardizer.means.data(),
                      loaded.standardizer.means.size() * sizeof(double)) == 0);
    CHECK(std::memcmp(loaded.standardizer.stds.data(), fit.profile.standardizer.stds.data(),
                      loaded.standardizer.stds.size() * sizeof(double)) == 0);
    CHECK(std::memcmp(loaded.last_training_vector.values.data(),
                      fit.profile.last_training_vector.values.data(),
                      loaded.last_training_vector.values.size() * sizeof(double)) == 0);
    CHECK(loaded.avg_change == fit.profile.avg_change);
    CHECK(loaded.std_change == fit.profile.std_change);

    // Storing again overwrites atomically and reproduces the same bytes.
    auto before = testutil::read_file(path);
    corpus::store_profile(fit.profile, tmp.path());
    CHECK(testutil::read_file(path) == before);
}

TEST_CASE("load_profile rejects unknown schema versions and corrupt files") {
    TempDir tmp;
    write_file(tmp / "odd.json", "{\"schema_version\":\"v999\",\"author_id\":\"x\"}");
    auto err = catch_law_error([&] { corpus::load_profile(tmp / "odd.json"); });
    REQUIRE(err.has_value());
    CHECK(err->code() == ErrorCode::SchemaVersionMismatch);
    CHECK(contains(err->what(), "v999"));

    write_file(tmp / "corrupt.json", "not json at all");
    CHECK_LAW_ERROR(corpus::load_profile(tmp / "corrupt.json"), ErrorCode::MalformedRecord);

    write_file(tmp / "partial.json",
               "{\"schema_version\":\"law-profile-v1\",\"author_id\":\"x\"}");
    CHECK_LAW_ERROR(corpus::load_profile(tmp / "partial.json"), ErrorCode::MalformedRecord);

    CHECK_LAW_ERROR(corpus::load_profile(tmp / "absent.json"), ErrorCode::IoError);
}

TEST_CASE("store_profile surfaces unusable destinations") {
    drift::AuthorProfile profile;
    profile.author_id = "x";
    profile.standardizer.schema_id = "law-style-v1";

    TempDir tmp;
    write_file(tmp / "blocker", "a file, not a directory");
    auto err = catch_law_error([&] { corpus::store_profile(profile, tmp / "blocker"); });
    REQUIRE(err.has_value());
    CHECK(err->code() == ErrorCode::IoError);
    CHECK(contains(err->what(), "blocker"));
}

TEST_CASE("profile_file_name sanitizes author ids") {
    CHECK(corpus::profile_file_name("plain-Name_0.9") == "plain-Name_0.9.json");
    CHECK(corpus::profile_file_name("a b/c") == "a_b_c.json");
    CHECK(corpus::profile_file_name("") == ".json");
}
