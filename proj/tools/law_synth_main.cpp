#include "law/synth.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Generate the bundled synthetic demonstration corpus"};
    law::synth::GeneratorConfig config;
    std::filesystem::path out_dir = "synth-corpus";
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--seed", config.seed, "generator seed");
    app.add_option("--authors", config.authors, "number of authors")->check(CLI::Range(1, 3));
    app.add_option("--docs-per-author", config.docs_per_author, "documents per author");
    app.add_option("--target-tokens", config.target_tokens, "approximate body length");
    app.add_option("--blend-weight", config.blend_weight,
                   "reference-template share in the blended document");
    CLI11_PARSE(app, argc, argv);

    try {
        auto corpus = law::synth::generate(config);
        auto manifest = law::synth::write_corpus(corpus, out_dir);
        std::cout << "manifest: " << manifest.string() << '\n'
                  << "blended document: " << corpus.blended_doc_id << '\n';
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
