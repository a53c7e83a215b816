#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace law::stylometry {

/// Identifier of the frozen 65-feature schema implemented by extract().
inline constexpr const char* kSchemaId = "law-style-v1";
inline constexpr std::size_t kFeatureCount = 65;

/// The eight tracked punctuation classes, in schema order (indices 7..14
/// of the style vector).
enum PunctClass : std::size_t {
    kComma = 0,
    kSemicolon,
    kColon,
    kQuestion,
    kExclamation,
    kParenthesis,
    kDoubleQuote,
    kDash,
    kPunctClassCount,
};

/// The 50 frozen function words (style vector indices 15..64, in order).
std::span<const std::string_view> function_words();

/// Human-readable names for all 65 features, in schema order.
std::span<const std::string_view> feature_names();

struct TokenizedText {
    std::vector<std::vector<std::string>> sentences; // tokens per sentence
    std::vector<std::string> tokens;                 // flattened, lowercased
    std::array<std::size_t, kPunctClassCount> punctuation_counts{};
    std::size_t char_count_of_tokens = 0; // letters only, apostrophes excluded
};

struct StyleVector {
    std::vector<double> values;
    std::string schema_id;
};

/// Per-feature standardization fitted on an author's training vectors.
/// Features whose training std falls below 1e-12 are dropped (kept_mask
/// false) and map to exactly 0 in z-space.
struct Standardizer {
    std::vector<double> means;
    std::vector<double> stds;
    std::vector<bool> kept_mask;
    std::string schema_id;
};

/// Splits text into sentences and lowercased word tokens and tallies the
/// tracked punctuation classes.
///
/// Sentence boundaries are maximal runs of [.?!] followed by whitespace or
/// end-of-text; abbreviations ("Dr.") are deliberately not special-cased.
/// Tokens are maximal runs of letters with internal apostrophes. Non-ASCII
/// code points are treated as letters except for a small set of typographic
/// punctuation (curly quotes, en/em dash, ellipsis).
TokenizedText segment(std::string_view text);

/// Heuristic syllable count: maximal vowel groups (aeiouy), minus one for a
/// trailing silent "e" (unless the word ends in consonant+"le"), minimum 1.
int syllable_count(std::string_view word);

/// Computes the raw 65-dimensional law-style-v1 vector for a document body.
/// Throws EmptyDocument when segmentation yields no sentence or no token.
StyleVector extract(std::string_view doc_body);

/// Fits per-feature mean and sample (m-1) standard deviation over >= 2 raw
/// vectors sharing one schema.
Standardizer fit_standardizer(const std::vector<StyleVector>& vectors);

/// Maps a raw vector into z-space: (x - mean)/std on kept features, 0 on
/// dropped ones.
StyleVector standardize(const Standardizer& s, const StyleVector& raw);

/// Cosine similarity in [-1, 1]; returns 0 when either norm is 0.
double cosine(std::span<const double> u, std::span<const double> v);

/// Euclidean (l2) distance.
double euclidean(std::span<const double> u, std::span<const double> v);

} // namespace law::stylometry
