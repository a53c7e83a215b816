#include "law/stylometry.hpp"

#include "law/error.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace law::stylometry {

namespace {

constexpr std::array<std::string_view, 50> kFunctionWords = {
    "the",   "of",    "and",  "to",    "in",   "a",     "is",    "that",  "for",  "it",
    "as",    "with",  "was",  "be",    "by",   "on",    "not",   "this",  "but",  "from",
    "or",    "have",  "an",   "they",  "which", "one",  "you",   "were",  "her",  "all",
    "she",   "there", "would", "their", "we",  "him",   "been",  "has",   "when", "who",
    "will",  "more",  "no",   "if",    "out",  "so",    "said",  "what",  "its",  "about",
};

std::array<std::string_view, kFeatureCount> make_feature_names() {
    std::array<std::string_view, kFeatureCount> names{};
    names[0] = "mean_sentence_length";
    names[1] = "sentence_length_std";
    names[2] = "mean_word_length";
    names[3] = "mattr_500";
    names[4] = "hapax_rate";
    names[5] = "mean_syllables_per_word";
    names[6] = "flesch_reading_ease";
    static const std::array<std::string_view, kPunctClassCount> punct = {
        "comma_rate",       "semicolon_rate", "colon_rate",        "question_rate",
        "exclamation_rate", "paren_rate",     "double_quote_rate", "dash_rate",
    };
    for (std::size_t i = 0; i < kPunctClassCount; ++i)
        names[7 + i] = punct[i];
    static std::array<std::string, 50> fw_names; // backing storage, built once
    for (std::size_t i = 0; i < kFunctionWords.size(); ++i) {
        fw_names[i] = "fw_" + std::string(kFunctionWords[i]);
        names[15 + i] = fw_names[i];
    }
    return names;
}

// -- UTF-8 scanning ----------------------------------------------------------

struct CodePoint {
    char32_t value;
    std::size_t length; // bytes consumed
};

// Decodes one code point; malformed sequences yield U+FFFD over one byte so
// scanning always advances.
CodePoint decode_utf8(std::string_view s, std::size_t i) {
    const auto byte = [&](std::size_t k) { return static_cast<unsigned char>(s[k]); };
    unsigned char b0 = byte(i);
    if (b0 < 0x80)
        return {b0, 1};
    auto cont = [&](std::size_t k) {
        return k < s.size() && (byte(k) & 0xC0) == 0x80;
    };
    if ((b0 & 0xE0) == 0xC0 && cont(i + 1)) {
        char32_t cp = ((b0 & 0x1Fu) << 6) | (byte(i + 1) & 0x3Fu);
        return CodePoint{cp, 2};
    }
    if ((b0 & 0xF0) == 0xE0 && cont(i + 1) && cont(i + 2)) {
        char32_t cp = ((b0 & 0x0Fu) << 12) | ((byte(i + 1) & 0x3Fu) << 6) | (byte(i + 2) & 0x3Fu);
        return CodePoint{cp, 3};
    }
    if ((b0 & 0xF8) == 0xF0 && cont(i + 1) && cont(i + 2) && cont(i + 3)) {
        char32_t cp = ((b0 & 0x07u) << 18) | ((byte(i + 1) & 0x3Fu) << 12) |
                      ((byte(i + 2) & 0x3Fu) << 6) | (byte(i + 3) & 0x3Fu);
        return CodePoint{cp, 4};
    }
    return {0xFFFD, 1};
}

// Typographic punctuation that must not be glued into tokens even though it
// is non-ASCII.
bool is_typographic_punct(char32_t cp) {
    switch (cp) {
    case 0x2018: // left single quote
    case 0x2019: // right single quote / apostrophe
    case 0x201C: // left double quote
    case 0x201D: // right double quote
    case 0x201E: // double low-9 quote
    case 0x2013: // en dash
    case 0x2014: // em dash
    case 0x2026: // ellipsis
        return true;
    default:
        return false;
    }
}

bool is_letter(char32_t cp) {
    if (cp < 0x80)
        return (cp >= 'A' && cp <= 'Z') || (cp >= 'a' && cp <= 'z');
    return cp != 0xFFFD && !is_typographic_punct(cp);
}

bool is_apostrophe(char32_t cp) { return cp == '\'' || cp == 0x2019; }

bool is_space(char32_t cp) {
    return cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == '\v' || cp == '\f';
}

bool is_terminal(char32_t cp) { return cp == '.' || cp == '?' || cp == '!'; }

int punct_class(char32_t cp) {
    switch (cp) {
    case ',': return kComma;
    case ';': return kSemicolon;
    case ':': return kColon;
    case '?': return kQuestion;
    case '!': return kExclamation;
    case '(':
    case ')': return kParenthesis;
    case '"':
    case 0x201C:
    case 0x201D:
    case 0x201E: return kDoubleQuote;
    case '-':
    case 0x2013:
    case 0x2014: return kDash;
    default: return -1;
    }
}

void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

// Moving-average type-token ratio over 500-token windows; plain type-token
// ratio for documents shorter than the window.
double mattr(const std::vector<std::string>& tokens, std::size_t window = 500) {
    std::unordered_map<std::string_view, std::size_t> counts;
    if (tokens.size() <= window) {
        for (const auto& t : tokens)
            ++counts[t];
        return static_cast<double>(counts.size()) / static_cast<double>(tokens.size());
    }
    double ttr_sum = 0.0;
    for (std::size_t i = 0; i < window; ++i)
        ++counts[tokens[i]];
    ttr_sum += static_cast<double>(counts.size()) / static_cast<double>(window);
    for (std::size_t i = window; i < tokens.size(); ++i) {
        auto out_it = counts.find(tokens[i - window]);
        if (--out_it->second == 0)
            counts.erase(out_it);
        ++counts[tokens[i]];
        ttr_sum += static_cast<double>(counts.size()) / static_cast<double>(window);
    }
    return ttr_sum / static_cast<double>(tokens.size() - window + 1);
}

} // namespace

std::span<const std::string_view> function_words() { return kFunctionWords; }

std::span<const std::string_view> feature_names() {
    static const std::array<std::string_view, kFeatureCount> names = make_feature_names();
    return names;
}

TokenizedText segment(std::string_view text) {
    TokenizedText out;
    std::vector<std::string> sentence;
    std::string token;
    std::size_t token_letters = 0;

    const auto flush_token = [&] {
        if (!token.empty()) {
            sentence.push_back(std::move(token));
            token.clear();
            out.char_count_of_tokens += token_letters;
            token_letters = 0;
        }
    };
    const auto close_sentence = [&] {
        flush_token();
        if (!sentence.empty())
            out.sentences.push_back(std::move(sentence));
        sentence.clear();
    };

    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        CodePoint cp = decode_utf8(text, i);
        if (is_terminal(cp.value)) {
            // Consume the whole [.?!] run, then decide whether it terminates
            // a sentence.
            std::size_t j = i;
            while (j < n) {
                CodePoint run_cp = decode_utf8(text, j);
                if (!is_terminal(run_cp.value))
                    break;
                if (int cls = punct_class(run_cp.value); cls >= 0)
                    ++out.punctuation_counts[static_cast<std::size_t>(cls)];
                j += run_cp.length;
            }
            flush_token();
            if (j >= n || is_space(decode_utf8(text, j).value))
                close_sentence();
            i = j;
            continue;
        }
        if (int cls = punct_class(cp.value); cls >= 0)
            ++out.punctuation_counts[static_cast<std::size_t>(cls)];
        if (is_letter(cp.value)) {
            char32_t lowered = (cp.value >= 'A' && cp.value <= 'Z') ? cp.value + 32 : cp.value;
            append_utf8(token, lowered);
            ++token_letters;
        } else if (is_apostrophe(cp.value) && !token.empty() && i + cp.length < n &&
                   is_letter(decode_utf8(text, i + cp.length).value)) {
            token.push_back('\''); // internal apostrophe, normalized to ASCII
        } else {
            flush_token();
        }
        i += cp.length;
    }
    close_sentence();

    for (const auto& s : out.sentences)
        out.tokens.insert(out.tokens.end(), s.begin(), s.end());
    return out;
}

int syllable_count(std::string_view word) {
    const auto is_vowel = [](char c) {
        return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u' || c == 'y';
    };
    int groups = 0;
    bool in_group = false;
    for (char c : word) {
        if (is_vowel(c)) {
            if (!in_group)
                ++groups;
            in_group = true;
        } else {
            in_group = false;
        }
    }
    const std::size_t len = word.size();
    if (len >= 1 && word[len - 1] == 'e') {
        bool le_after_consonant =
            len >= 3 && word[len - 2] == 'l' && !is_vowel(word[len - 3]);
        if (!le_after_consonant)
            --groups;
    }
    return std::max(groups, 1);
}

StyleVector extract(std::string_view doc_body) {
    TokenizedText t = segment(doc_body);
    if (t.tokens.empty() || t.sentences.empty())
        throw Error(ErrorCode::EmptyDocument, "no sentence or token found in document body");

    const double n_tokens = static_cast<double>(t.tokens.size());
    const double n_sentences = static_cast<double>(t.sentences.size());

    StyleVector v;
    v.schema_id = kSchemaId;
    v.values.assign(kFeatureCount, 0.0);

    v.values[0] = n_tokens / n_sentences;
    double ss = 0.0;
    for (const auto& s : t.sentences) {
        double d = static_cast<double>(s.size()) - v.values[0];
        ss += d * d;
    }
    v.values[1] = std::sqrt(ss / n_sentences); // population std within the document

    v.values[2] = static_cast<double>(t.char_count_of_tokens) / n_tokens;
    v.values[3] = mattr(t.tokens);

    std::unordered_map<std::string_view, std::size_t> counts;
    for (const auto& tok : t.tokens)
        ++counts[tok];
    std::size_t hapaxes = 0;
    for (const auto& [_, c] : counts)
        if (c == 1)
            ++hapaxes;
    v.values[4] = static_cast<double>(hapaxes) / n_tokens;

    double syllables = 0.0;
    for (const auto& tok : t.tokens)
        syllables += syllable_count(tok);
    v.values[5] = syllables / n_tokens;
    v.values[6] = 206.835 - 1.015 * (n_tokens / n_sentences) - 84.6 * (syllables / n_tokens);

    for (std::size_t i = 0; i < kPunctClassCount; ++i)
        v.values[7 + i] = static_cast<double>(t.punctuation_counts[i]) * 1000.0 / n_tokens;

    for (std::size_t i = 0; i < kFunctionWords.size(); ++i) {
        auto it = counts.find(kFunctionWords[i]);
        std::size_t c = it == counts.end() ? 0 : it->second;
        v.values[15 + i] = static_cast<double>(c) * 1000.0 / n_tokens;
    }
    return v;
}

Standardizer fit_standardizer(const std::vector<StyleVector>& vectors) {
    if (vectors.size() < 2)
        throw Error(ErrorCode::TooFewVectors,
                    "standardizer needs at least 2 vectors, got " + std::to_string(vectors.size()));
    const std::string& schema = vectors.front().schema_id;
    const std::size_t dim = vectors.front().values.size();
    for (const auto& v : vectors) {
        if (v.schema_id != schema)
            throw Error(ErrorCode::SchemaMismatch, v.schema_id + " vs " + schema);
        if (v.values.size() != dim)
            throw Error(ErrorCode::DimensionMismatch,
                        std::to_string(v.values.size()) + " vs " + std::to_string(dim));
    }

    const double m = static_cast<double>(vectors.size());
    Standardizer s;
    s.schema_id = schema;
    s.means.assign(dim, 0.0);
    s.stds.assign(dim, 0.0);
    s.kept_mask.assign(dim, false);
    for (const auto& v : vectors)
        for (std::size_t i = 0; i < dim; ++i)
            s.means[i] += v.values[i];
    for (double& mu : s.means)
        mu /= m;
    for (const auto& v : vectors)
        for (std::size_t i = 0; i < dim; ++i) {
            double d = v.values[i] - s.means[i];
            s.stds[i] += d * d;
        }
    for (std::size_t i = 0; i < dim; ++i) {
        s.stds[i] = std::sqrt(s.stds[i] / (m - 1.0));
        s.kept_mask[i] = s.stds[i] >= 1e-12;
    }
    return s;
}

StyleVector standardize(const Standardizer& s, const StyleVector& raw) {
    if (raw.schema_id != s.schema_id)
        throw Error(ErrorCode::SchemaMismatch, raw.schema_id + " vs " + s.schema_id);
    if (raw.values.size() != s.means.size())
        throw Error(ErrorCode::DimensionMismatch,
                    std::to_string(raw.values.size()) + " vs " + std::to_string(s.means.size()));
    StyleVector z;
    z.schema_id = s.schema_id;
    z.values.assign(raw.values.size(), 0.0);
    for (std::size_t i = 0; i < raw.values.size(); ++i)
        if (s.kept_mask[i])
            z.values[i] = (raw.values[i] - s.means[i]) / s.stds[i];
    return z;
}

double cosine(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size())
        throw Error(ErrorCode::DimensionMismatch,
                    std::to_string(u.size()) + " vs " + std::to_string(v.size()));
    double dot = 0.0, nu = 0.0, nv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        dot += u[i] * v[i];
        nu += u[i] * u[i];
        nv += v[i] * v[i];
    }
    if (nu == 0.0 || nv == 0.0)
        return 0.0; // no directional evidence
    return dot / (std::sqrt(nu) * std::sqrt(nv));
}

double euclidean(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size())
        throw Error(ErrorCode::DimensionMismatch,
                    std::to_string(u.size()) + " vs " + std::to_string(v.size()));
    double ss = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        double d = u[i] - v[i];
        ss += d * d;
    }
    return std::sqrt(ss);
}

} // namespace law::stylometry
