#pragma once

#include "law/corpus.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace law::synth {

/// Controls the bundled demo corpus: a handful of authors with smoothly
/// drifting parametric styles, one of whom turns in a final document blended
/// toward a separate reference template.
struct GeneratorConfig {
    std::uint64_t seed = 2024;
    int authors = 3;          // in [1, 3]
    int docs_per_author = 7;  // training docs + 1 post-cutoff doc
    int blended_author = 0;   // whose last doc leans toward the reference template
    double blend_weight = 0.65;
    int target_tokens = 3200; // approximate body length
    int first_year = 2016;
    int cutoff_year = 2022;

    void check() const;
};

struct SyntheticCorpus {
    std::vector<corpus::Document> documents; // author-major, ascending doc order
    /// Reference text per post-cutoff document; the blended document's entry
    /// is pure reference-template text, so similarity against it is high.
    std::map<std::string, std::string> fixtures;
    std::string blended_doc_id;
    int cutoff_year = 2022;
};

SyntheticCorpus generate(const GeneratorConfig& config);

/// Lays the corpus out on disk: manifest.jsonl (body_path records with
/// labels on post-cutoff documents), bodies/, fixtures/, labels.jsonl.
/// Returns the manifest path.
std::filesystem::path write_corpus(const SyntheticCorpus& corpus,
                                   const std::filesystem::path& dir);

} // namespace law::synth
