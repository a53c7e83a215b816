#include "law/synth.hpp"

#include "law/error.hpp"
#include "law/stylometry.hpp"

#include <json.hpp>

#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

namespace law::synth {

namespace {

// splitmix64: tiny and identical on every platform, unlike std distributions.
struct Rng {
    std::uint64_t state;

    explicit Rng(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        state += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    std::size_t below(std::size_t n) { return static_cast<std::size_t>(next() % n); }
    bool chance(double p) { return uniform() < p; }
};

constexpr std::size_t kFw = 50;

struct Knobs {
    double sentence_len = 14.0;
    double sentence_spread = 3.0;
    double commas_per_sentence = 1.0;
    double semicolon_share = 0.1;
    double colon_share = 0.05;
    double question_share = 0.05;
    double exclaim_share = 0.02;
    double paren_share = 0.08;
    double quote_share = 0.06;
    double hyphen_share = 0.08;
    double function_share = 0.45;
    double front_bias = 0.3; // how often content picks stay in the pool's front half
    std::array<double, kFw> fw_weights{};
};

Knobs lerp(const Knobs& a, const Knobs& b, double t) {
    const auto mix = [t](double x, double y) { return x + (y - x) * t; };
    Knobs out;
    out.sentence_len = mix(a.sentence_len, b.sentence_len);
    out.sentence_spread = mix(a.sentence_spread, b.sentence_spread);
    out.commas_per_sentence = mix(a.commas_per_sentence, b.commas_per_sentence);
    out.semicolon_share = mix(a.semicolon_share, b.semicolon_share);
    out.colon_share = mix(a.colon_share, b.colon_share);
    out.question_share = mix(a.question_share, b.question_share);
    out.exclaim_share = mix(a.exclaim_share, b.exclaim_share);
    out.paren_share = mix(a.paren_share, b.paren_share);
    out.quote_share = mix(a.quote_share, b.quote_share);
    out.hyphen_share = mix(a.hyphen_share, b.hyphen_share);
    out.function_share = mix(a.function_share, b.function_share);
    out.front_bias = mix(a.front_bias, b.front_bias);
    for (std::size_t i = 0; i < kFw; ++i)
        out.fw_weights[i] = mix(a.fw_weights[i], b.fw_weights[i]);
    return out;
}

using Pool = std::vector<std::string_view>;

const Pool& field_pool() {
    static const Pool pool = {
        "creek", "ridge",  "stone",  "moss",   "trail",  "birch",  "fog",    "lake",
        "marsh", "cliff",  "dune",   "reed",   "owl",    "fern",   "bark",   "root",
        "silt",  "peat",   "gorge",  "knoll",  "brook",  "heath",  "larch",  "loam",
        "mire",  "pond",   "crag",   "shale",  "sedge",  "tarn",   "vale",   "wren",
        "ash",   "elm",    "spruce", "kestrel", "plover", "quartz", "basalt", "lichen",
        "banks", "willow", "otter",  "heron",
    };
    return pool;
}

const Pool& bench_pool() {
    static const Pool pool = {
        "sample",     "reagent",    "titration",  "beaker",     "pipette",   "culture",
        "assay",      "buffer",     "enzyme",     "substrate",  "dilution",  "solvent",
        "crystal",    "residue",    "filtrate",   "membrane",   "gradient",  "isotope",
        "spectrum",   "cathode",    "anode",      "polymer",    "monomer",   "catalyst",
        "reactor",    "viscosity",  "density",    "aliquot",    "centrifuge", "microscope",
        "slide",      "stain",      "colony",     "plate",      "broth",     "agar",
        "vial",       "flask",      "burette",    "thermometer", "tracer",   "baseline",
        "replicate",  "control",
    };
    return pool;
}

const Pool& archive_pool() {
    static const Pool pool = {
        "archive",   "ledger",    "charter",    "treaty",    "parish",     "census",
        "deed",      "folio",     "scribe",     "seal",      "edict",      "chronicle",
        "annal",     "registry",  "decree",     "guild",     "manor",      "tithe",
        "vassal",    "burgher",   "codex",      "vellum",    "quill",      "index",
        "colophon",  "binder",    "docket",     "minute",    "petition",   "statute",
        "ordinance", "proviso",   "appendix",   "gazette",   "bulletin",   "almanac",
        "compendium", "abstracts", "papers",    "letters",   "records",    "accounts",
        "deposits",  "seals",
    };
    return pool;
}

const Pool& reference_pool() {
    static const Pool pool = {
        "methodology",      "comprehensive",    "framework",        "implementation",
        "significant",      "optimization",     "infrastructure",   "characterization",
        "representation",   "configuration",    "systematically",   "contemporary",
        "multidisciplinary", "heterogeneous",   "quantitative",     "qualitative",
        "interpretation",   "generalization",   "architecture",     "functionality",
        "scalability",      "reproducibility",  "demonstration",    "investigation",
        "consideration",    "approximation",    "transformation",   "classification",
        "regularization",   "parameterization", "initialization",   "normalization",
        "evaluation",       "integration",      "correlation",      "distribution",
        "observation",      "contribution",     "limitation",       "perspective",
        "trajectory",       "phenomenon",       "paradigm",         "formulation",
    };
    return pool;
}

std::array<double, kFw> fw_profile(std::initializer_list<std::size_t> boosted) {
    std::array<double, kFw> weights{};
    weights.fill(0.25);
    for (std::size_t i : boosted)
        weights[i] = 3.0;
    return weights;
}

// Indexes into stylometry::function_words():
//   0 the, 1 of, 2 and, 3 to, 4 in, 5 a, 6 is, 7 that, 8 for, 9 it, 10 as,
//   11 with, 12 was, 13 be, 14 by, 15 on, 16 not, 17 this, 18 but, 19 from,
//   20 or, 21 have, 22 an, 23 they, 24 which, 25 one, 26 you, 27 were,
//   28 her, 29 all, 30 she, 31 there, 32 would, 33 their, 34 we, 35 him,
//   36 been, 37 has, 38 when, 39 who, 40 will, 41 more, 42 no, 43 if,
//   44 out, 45 so, 46 said, 47 what, 48 its, 49 about
struct AuthorTemplate {
    std::string_view id;
    const Pool* pool;
    Knobs start;
    Knobs end;
};

Knobs make_knobs(double len, double spread, double commas, double semi, double colon, double q,
                 double excl, double paren, double quote, double hyphen, double fw_share,
                 double front, std::array<double, kFw> weights) {
    Knobs k;
    k.sentence_len = len;
    k.sentence_spread = spread;
    k.commas_per_sentence = commas;
    k.semicolon_share = semi;
    k.colon_share = colon;
    k.question_share = q;
    k.exclaim_share = excl;
    k.paren_share = paren;
    k.quote_share = quote;
    k.hyphen_share = hyphen;
    k.function_share = fw_share;
    k.front_bias = front;
    k.fw_weights = weights;
    return k;
}

// Every function-word weight drifts between the endpoints so no rate feature
// sits still across the training window.
std::array<double, kFw> drifted(const std::array<double, kFw>& start, std::size_t author) {
    std::array<double, kFw> out = start;
    for (std::size_t i = 0; i < kFw; ++i) {
        double mult = 0.45 + 0.13 * static_cast<double>((i * 13 + author * 5) % 11);
        out[i] = start[i] * mult;
    }
    return out;
}

std::vector<AuthorTemplate> author_templates() {
    std::vector<AuthorTemplate> out;
    {
        auto fw = fw_profile({0, 2, 3, 5, 9, 12, 15, 18, 34, 44});
        out.push_back({"ayers-field", &field_pool(),
                       make_knobs(11, 2.5, 0.7, 0.05, 0.04, 0.10, 0.06, 0.05, 0.06, 0.05, 0.40,
                                  0.15, fw),
                       make_knobs(17, 3.5, 1.6, 0.22, 0.12, 0.02, 0.01, 0.14, 0.18, 0.16, 0.50,
                                  0.55, drifted(fw, 0))});
    }
    {
        auto fw = fw_profile({0, 1, 4, 6, 7, 8, 11, 14, 22, 27});
        out.push_back({"brook-bench", &bench_pool(),
                       make_knobs(14, 3.0, 1.2, 0.10, 0.10, 0.05, 0.02, 0.10, 0.04, 0.10, 0.46,
                                  0.30, fw),
                       make_knobs(20, 4.0, 2.2, 0.30, 0.20, 0.01, 0.00, 0.20, 0.10, 0.22, 0.54,
                                  0.60, drifted(fw, 1))});
    }
    {
        auto fw = fw_profile({0, 3, 7, 10, 19, 20, 21, 38, 39, 43});
        out.push_back({"castell-archive", &archive_pool(),
                       make_knobs(16, 3.0, 1.5, 0.18, 0.06, 0.08, 0.03, 0.06, 0.12, 0.08, 0.44,
                                  0.20, fw),
                       make_knobs(12, 2.0, 0.9, 0.06, 0.14, 0.14, 0.08, 0.12, 0.05, 0.04, 0.52,
                                  0.50, drifted(fw, 2))});
    }
    return out;
}

Knobs reference_knobs() {
    return make_knobs(27, 4.0, 2.8, 0.45, 0.25, 0.0, 0.0, 0.25, 0.02, 0.12, 0.56, 0.25,
                      fw_profile({1, 13, 17, 19, 24, 32, 33, 36, 37, 41}));
}

std::string_view pick_function_word(Rng& rng, const std::array<double, kFw>& weights) {
    double total = 0.0;
    for (double w : weights)
        total += w;
    double roll = rng.uniform() * total;
    auto words = stylometry::function_words();
    for (std::size_t i = 0; i < kFw; ++i) {
        roll -= weights[i];
        if (roll <= 0.0)
            return words[i];
    }
    return words[kFw - 1];
}

std::string_view pick_content_word(Rng& rng, const Pool& own, const Pool* blended,
                                   double blend_weight, double front_bias) {
    const Pool& pool = (blended != nullptr && rng.chance(blend_weight)) ? *blended : own;
    std::size_t limit = rng.chance(front_bias) ? pool.size() / 2 : pool.size();
    return pool[rng.below(limit)];
}

std::string make_sentence(Rng& rng, const Knobs& k, const Pool& own, const Pool* blended,
                          double blend_weight, int* tokens_out) {
    int len = static_cast<int>(std::lround(k.sentence_len +
                                           (rng.uniform() * 2.0 - 1.0) * k.sentence_spread));
    if (len < 4)
        len = 4;

    std::vector<std::string> words;
    words.reserve(static_cast<std::size_t>(len));
    int content_slots = 0;
    for (int i = 0; i < len; ++i) {
        if (rng.chance(k.function_share)) {
            words.emplace_back(pick_function_word(rng, k.fw_weights));
        } else {
            words.emplace_back(pick_content_word(rng, own, blended, blend_weight, k.front_bias));
            ++content_slots;
        }
    }

    const auto middle_slot = [&] { return 1 + static_cast<int>(rng.below(words.size() - 2)); };

    if (len >= 6 && rng.chance(k.paren_share)) {
        int slot = middle_slot();
        words[slot] = "(" + words[slot] + ")";
    }
    if (len >= 6 && rng.chance(k.quote_share)) {
        int slot = middle_slot();
        words[slot] = "\"" + words[slot] + "\"";
    }
    if (len >= 6 && content_slots >= 2 && rng.chance(k.hyphen_share)) {
        int slot = middle_slot();
        words[slot] += "-" + std::string(pick_content_word(rng, own, blended, blend_weight,
                                                           k.front_bias));
        ++len; // the joined pair still reads as two tokens
    }

    int commas = static_cast<int>(k.commas_per_sentence);
    if (rng.chance(k.commas_per_sentence - commas))
        ++commas;
    for (int c = 0; c < commas && len >= 6; ++c) {
        int slot = middle_slot();
        if (words[slot].back() != ',' && words[slot].back() != ';' && words[slot].back() != ':')
            words[slot] += ",";
    }
    if (len >= 8 && rng.chance(k.semicolon_share)) {
        int slot = middle_slot();
        if (words[slot].back() != ',' && words[slot].back() != ';')
            words[slot] += ";";
    }
    if (len >= 8 && rng.chance(k.colon_share)) {
        int slot = middle_slot();
        if (words[slot].back() != ',' && words[slot].back() != ';' && words[slot].back() != ':')
            words[slot] += ":";
    }

    if (!words[0].empty() && words[0][0] >= 'a' && words[0][0] <= 'z')
        words[0][0] = static_cast<char>(words[0][0] - 32);

    std::string sentence;
    for (std::size_t i = 0; i < words.size(); ++i) {
        if (i > 0)
            sentence += ' ';
        sentence += words[i];
    }
    double roll = rng.uniform();
    if (roll < k.question_share)
        sentence += '?';
    else if (roll < k.question_share + k.exclaim_share)
        sentence += '!';
    else
        sentence += '.';
    *tokens_out = len;
    return sentence;
}

std::vector<std::string> make_sentences(Rng& rng, const Knobs& k, const Pool& own,
                                        const Pool* blended, double blend_weight,
                                        int target_tokens) {
    std::vector<std::string> sentences;
    int tokens = 0;
    while (tokens < target_tokens) {
        int sentence_tokens = 0;
        sentences.push_back(make_sentence(rng, k, own, blended, blend_weight, &sentence_tokens));
        tokens += sentence_tokens;
    }
    return sentences;
}

std::string join_sentences(const std::vector<std::string>& sentences) {
    std::string body;
    int in_paragraph = 0;
    for (const auto& sentence : sentences) {
        if (!body.empty()) {
            body += in_paragraph >= 5 ? "\n\n" : " ";
            if (in_paragraph >= 5)
                in_paragraph = 0;
        }
        body += sentence;
        ++in_paragraph;
    }
    body += '\n';
    return body;
}

std::string make_body(Rng& rng, const Knobs& k, const Pool& own, const Pool* blended,
                      double blend_weight, int target_tokens) {
    return join_sentences(make_sentences(rng, k, own, blended, blend_weight, target_tokens));
}

// A consistent author's next document: mostly recombinations of the previous
// document's sentence patterns plus a fresh minority drawn a small way down
// the author's drift line. Keeps the style change well inside the training
// spread no matter how noisy the rate features are.
std::string make_in_style_followup(Rng& rng, const std::vector<std::string>& previous,
                                   const Knobs& advanced, const Pool& own) {
    std::vector<std::string> sentences = previous;
    std::size_t replace = sentences.size() * 3 / 10;
    for (std::size_t r = 0; r < replace; ++r) {
        int fresh_tokens = 0;
        sentences[rng.below(sentences.size())] =
            make_sentence(rng, advanced, own, nullptr, 0.0, &fresh_tokens);
    }
    for (std::size_t i = sentences.size(); i > 1; --i)
        std::swap(sentences[i - 1], sentences[rng.below(i)]);
    return join_sentences(sentences);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    Rng rng(seed ^ (salt * 0x9e3779b97f4a7c15ULL));
    return rng.next();
}

std::string two_digits(int n) {
    std::string s = std::to_string(n);
    return s.size() < 2 ? "0" + s : s;
}

// In-style post-cutoff documents sit this far past the last training step,
// well inside the author's established per-step change.
constexpr double kInStyleAdvance = 0.35;

} // namespace

void GeneratorConfig::check() const {
    if (authors < 1 || authors > 3)
        throw Error(ErrorCode::InvalidArgument,
                    "authors must be in [1, 3], got " + std::to_string(authors));
    if (docs_per_author < 3)
        throw Error(ErrorCode::InvalidArgument, "docs_per_author must be at least 3, got " +
                                                    std::to_string(docs_per_author));
    if (blended_author < 0 || blended_author >= authors)
        throw Error(ErrorCode::InvalidArgument, "blended_author out of range");
    if (blend_weight <= 0.0 || blend_weight >= 1.0)
        throw Error(ErrorCode::InvalidArgument, "blend_weight must be in (0, 1)");
    if (target_tokens < 200)
        throw Error(ErrorCode::InvalidArgument, "target_tokens must be at least 200");
    if (first_year + docs_per_author - 2 > cutoff_year)
        throw Error(ErrorCode::InvalidArgument,
                    "training years would cross the cutoff; lower first_year");
}

SyntheticCorpus generate(const GeneratorConfig& config) {
    config.check();
    const auto templates = author_templates();
    const Knobs ref_knobs = reference_knobs();
    const Pool& ref_pool = reference_pool();

    SyntheticCorpus corpus;
    corpus.cutoff_year = config.cutoff_year;
    const int training_docs = config.docs_per_author - 1;
    const double last_t = static_cast<double>(training_docs - 1);

    for (int a = 0; a < config.authors; ++a) {
        const AuthorTemplate& tpl = templates[static_cast<std::size_t>(a)];
        const bool is_blended_author = a == config.blended_author;
        for (int d = 0; d < config.docs_per_author; ++d) {
            const bool post_cutoff = d == config.docs_per_author - 1;
            corpus::Document doc;
            doc.doc_id = std::string(tpl.id) + "-" + two_digits(d + 1);
            doc.author_id = std::string(tpl.id);
            doc.year = post_cutoff ? config.cutoff_year + 1 : config.first_year + d;
            doc.title = "Season " + std::to_string(d + 1) + " notes on " +
                        std::string((*tpl.pool)[static_cast<std::size_t>(d) % tpl.pool->size()]) +
                        " and " +
                        std::string((*tpl.pool)[static_cast<std::size_t>(d + 3) %
                                                tpl.pool->size()]);
            doc.abstract = "A yearly account of observations around " + std::string(tpl.id) +
                           ", continuing the series through season " + std::to_string(d + 1) +
                           ".";

            Rng rng(mix_seed(config.seed, static_cast<std::uint64_t>(a) * 1000 +
                                              static_cast<std::uint64_t>(d)));
            if (!post_cutoff) {
                Knobs k = lerp(tpl.start, tpl.end, static_cast<double>(d) / last_t);
                doc.body = make_body(rng, k, *tpl.pool, nullptr, 0.0, config.target_tokens);
            } else if (is_blended_author) {
                Knobs own = lerp(tpl.start, tpl.end, (last_t + kInStyleAdvance) / last_t);
                Knobs k = lerp(own, ref_knobs, config.blend_weight);
                doc.body = make_body(rng, k, *tpl.pool, &ref_pool, config.blend_weight,
                                     config.target_tokens);
                doc.ground_truth_label = corpus::Label::llm_assisted;
                corpus.blended_doc_id = doc.doc_id;
            } else {
                Rng prev_rng(mix_seed(config.seed, static_cast<std::uint64_t>(a) * 1000 +
                                                       static_cast<std::uint64_t>(d - 1)));
                auto previous = make_sentences(prev_rng, tpl.end, *tpl.pool, nullptr, 0.0,
                                               config.target_tokens);
                Knobs advanced = lerp(tpl.start, tpl.end, (last_t + kInStyleAdvance) / last_t);
                doc.body = make_in_style_followup(rng, previous, advanced, *tpl.pool);
                doc.ground_truth_label = corpus::Label::human;
            }

            if (post_cutoff) {
                Rng ref_rng(mix_seed(config.seed, 77000 + static_cast<std::uint64_t>(a)));
                corpus.fixtures[doc.doc_id] =
                    make_body(ref_rng, ref_knobs, ref_pool, nullptr, 0.0, config.target_tokens);
            }
            corpus.documents.push_back(std::move(doc));
        }
    }
    return corpus;
}

std::filesystem::path write_corpus(const SyntheticCorpus& corpus,
                                   const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir / "bodies");
    fs::create_directories(dir / "fixtures");

    const auto write_file = [](const fs::path& path, const std::string& text) {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out)
            throw Error(ErrorCode::IoError, "cannot write " + path.string());
        out << text;
        if (!out)
            throw Error(ErrorCode::IoError, "short write to " + path.string());
    };

    std::ostringstream manifest;
    std::ostringstream labels;
    for (const auto& doc : corpus.documents) {
        write_file(dir / "bodies" / (doc.doc_id + ".txt"), doc.body);
        nlohmann::json record = {
            {"doc_id", doc.doc_id},
            {"author_id", doc.author_id},
            {"year", doc.year},
            {"title", doc.title},
            {"abstract", doc.abstract},
            {"body_path", "bodies/" + doc.doc_id + ".txt"},
        };
        if (doc.ground_truth_label) {
            record["label"] = corpus::to_string(*doc.ground_truth_label);
            labels << nlohmann::json{{"doc_id", doc.doc_id},
                                     {"label", corpus::to_string(*doc.ground_truth_label)}}
                          .dump()
                   << '\n';
        }
        manifest << record.dump() << '\n';
    }
    for (const auto& [doc_id, text] : corpus.fixtures)
        write_file(dir / "fixtures" / (doc_id + ".txt"), text);

    write_file(dir / "labels.jsonl", labels.str());
    const fs::path manifest_path = dir / "manifest.jsonl";
    write_file(manifest_path, manifest.str());
    return manifest_path;
}

} // namespace law::synth
