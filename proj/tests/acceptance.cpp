// Acceptance harness: seven end-to-end checks, one PASS/FAIL line each.
// Exit status is the number of failed criteria.

#include "law/attribution.hpp"
#include "law/cli.hpp"
#include "law/corpus.hpp"
#include "law/drift.hpp"
#include "law/error.hpp"
#include "law/metrics.hpp"
#include "law/stylometry.hpp"
#include "law/synth.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using namespace law;

// --- small self-contained helpers --------------------------------------

struct TempDir {
    fs::path dir;

    TempDir() {
        std::mt19937_64 rng(std::random_device{}());
        for (int attempt = 0; attempt < 32; ++attempt) {
            std::ostringstream name;
            name << "law-acceptance-" << std::hex << rng();
            fs::path candidate = fs::temp_directory_path() / name.str();
            std::error_code ec;
            if (fs::create_directory(candidate, ec) && !ec) {
                dir = candidate;
                return;
            }
        }
        throw std::runtime_error("cannot create a temporary directory");
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(dir, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
};

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return std::move(buf).str();
}

/// Contiguous bools; std::vector<bool> cannot back std::span<const bool>.
struct BoolBuf {
    std::unique_ptr<bool[]> data;
    std::size_t count = 0;

    explicit BoolBuf(const std::vector<int>& bits)
        : data(std::make_unique<bool[]>(bits.size())), count(bits.size()) {
        for (std::size_t i = 0; i < count; ++i)
            data[i] = bits[i] != 0;
    }
    operator std::span<const bool>() const { return {data.get(), count}; }
};

class MapClient : public attribution::LlmClient {
public:
    explicit MapClient(std::map<std::string, std::string> texts) : texts_(std::move(texts)) {}

    std::string complete(const std::string& doc_id, const std::string&) override {
        auto it = texts_.find(doc_id);
        if (it == texts_.end())
            throw Error(ErrorCode::FixtureMissing, doc_id);
        return it->second;
    }
    attribution::ReferenceSource source() const override {
        return attribution::ReferenceSource::fixture;
    }

private:
    std::map<std::string, std::string> texts_;
};

struct CliResult {
    int code = -1;
    std::string out;
    std::string err;
};

CliResult run_cli(const std::vector<std::string>& args) {
    std::vector<std::string> storage;
    storage.push_back("law");
    storage.insert(storage.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& arg : storage)
        argv.push_back(arg.c_str());
    std::ostringstream out, err;
    CliResult result;
    result.code = cli::run(static_cast<int>(argv.size()), argv.data(),
                           cli::default_client_factory(), out, err);
    result.out = out.str();
    result.err = err.str();
    return result;
}

/// First failed condition wins; later checks are skipped once broken.
struct Check {
    bool ok = true;
    std::string why;

    void require(bool condition, const std::string& message) {
        if (ok && !condition) {
            ok = false;
            why = message;
        }
    }
};

bool run_criterion(int number, const std::string& description, long limit_ms,
                   const std::function<void(Check&)>& body) {
    Check check;
    const auto start = std::chrono::steady_clock::now();
    try {
        body(check);
    } catch (const std::exception& e) {
        check.require(false, std::string("unexpected exception: ") + e.what());
    }
    const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - start)
                             .count();
    if (check.ok && elapsed >= limit_ms)
        check.require(false, "exceeded the " + std::to_string(limit_ms) + " ms budget");

    std::cout << (check.ok ? "PASS" : "FAIL") << " criterion " << number << ": " << description
              << " (" << elapsed << " ms)";
    if (!check.ok)
        std::cout << " [" << check.why << "]";
    std::cout << '\n';
    return check.ok;
}

// --- independent oracles ------------------------------------------------

double brute_force_fleiss(const std::vector<std::vector<long>>& counts) {
    const double items = static_cast<double>(counts.size());
    const std::size_t cats = counts.front().size();
    double n = 0.0;
    for (long c : counts.front())
        n += static_cast<double>(c);

    double p_bar = 0.0;
    for (const auto& row : counts) {
        double s = 0.0;
        for (long c : row)
            s += static_cast<double>(c) * static_cast<double>(c);
        p_bar += (s - n) / (n * (n - 1.0));
    }
    p_bar /= items;

    double p_e = 0.0;
    for (std::size_t j = 0; j < cats; ++j) {
        double col = 0.0;
        for (const auto& row : counts)
            col += static_cast<double>(row[j]);
        const double p_j = col / (items * n);
        p_e += p_j * p_j;
    }
    if (1.0 - p_e <= 0.0)
        return 1.0;
    return (p_bar - p_e) / (1.0 - p_e);
}

double brute_force_cohen(const std::vector<int>& a, const std::vector<int>& b) {
    int max_cat = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        max_cat = std::max({max_cat, a[i], b[i]});
    const double n = static_cast<double>(a.size());
    std::vector<double> pa(static_cast<std::size_t>(max_cat) + 1, 0.0);
    std::vector<double> pb(static_cast<std::size_t>(max_cat) + 1, 0.0);
    double p_o = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        pa[static_cast<std::size_t>(a[i])] += 1.0;
        pb[static_cast<std::size_t>(b[i])] += 1.0;
        if (a[i] == b[i])
            p_o += 1.0;
    }
    p_o /= n;
    double p_e = 0.0;
    for (std::size_t c = 0; c < pa.size(); ++c)
        p_e += (pa[c] / n) * (pb[c] / n);
    if (1.0 - p_e <= 0.0)
        return 1.0;
    return (p_o - p_e) / (1.0 - p_e);
}

std::optional<double> objective_at(const std::vector<double>& scores,
                                   const std::vector<int>& labels, double theta,
                                   metrics::Objective objective) {
    long tp = 0, fp = 0, tn = 0, fn = 0;
    for (std::size_t j = 0; j < scores.size(); ++j) {
        const bool pred = scores[j] > theta;
        if (labels[j] != 0)
            pred ? ++tp : ++fn;
        else
            pred ? ++fp : ++tn;
    }
    if (objective == metrics::Objective::accuracy) {
        const long total = tp + fp + tn + fn;
        if (total == 0)
            return std::nullopt;
        return static_cast<double>(tp + tn) / static_cast<double>(total);
    }
    if (tp + fp == 0 || tp + fn == 0)
        return std::nullopt;
    const double p = static_cast<double>(tp) / static_cast<double>(tp + fp);
    const double r = static_cast<double>(tp) / static_cast<double>(tp + fn);
    if (p + r <= 0.0)
        return std::nullopt;
    return 2.0 * p * r / (p + r);
}

// --- criteria -----------------------------------------------------------

bool criterion_f1_columns() {
    return run_criterion(
        1, "tabulated F1 agrees with each precision/recall pair within 5e-4", 1000,
        [](Check& check) {
            struct Column {
                metrics::ConfusionMatrix cm;
                double precision, recall, f1;
            };
            // Integer matrices whose ratios land exactly on each pair.
            const Column columns[] = {
                {{167, 501, 0, 333}, 0.250, 0.334, 0.286},
                {{112407, 154593, 0, 98093}, 0.421, 0.534, 0.471},
                {{14421, 10659, 0, 8579}, 0.575, 0.627, 0.600},
                {{14421, 10659, 0, 8579}, 0.575, 0.627, 0.600},
                {{7, 3, 0, 3}, 0.700, 0.700, 0.700},
            };
            for (const auto& column : columns) {
                auto m = metrics::metric_set(column.cm);
                check.require(m.precision && m.recall && m.f1, "ratios must be defined");
                if (!check.ok)
                    return;
                check.require(std::fabs(*m.precision - column.precision) < 1e-12 &&
                                  std::fabs(*m.recall - column.recall) < 1e-12,
                              "confusion matrix does not hit the published column");
                check.require(std::fabs(*m.f1 - column.f1) < 0.0005,
                              "F1 deviates from the tabulated value by 0.0005 or more");
            }
        });
}

bool criterion_chi2() {
    return run_criterion(
        2, "chi-squared tail: headline significance and df=2 closed form", 1000,
        [](Check& check) {
            const double headline = metrics::chi2_sf(133.0, 4);
            check.require(headline > 0.0 && headline < 0.001,
                          "survival at (133, df=4) must be positive and below 1e-3");
            for (double x = 0.0; x <= 50.0; x += 0.1) {
                const double got = metrics::chi2_sf(x, 2);
                const double want = std::exp(-x / 2.0);
                if (std::fabs(got - want) > 1e-10 * want) {
                    check.require(false, "df=2 closed form diverges at x=" + std::to_string(x));
                    return;
                }
            }
        });
}

bool criterion_end_to_end() {
    return run_criterion(
        3, "synthetic pipeline flags exactly the blended document, byte for byte", 10000,
        [](Check& check) {
            TempDir dir;
            auto corpus = synth::generate(synth::GeneratorConfig{});
            auto manifest = synth::write_corpus(corpus, dir.dir);
            const std::string fixtures = (dir.dir / "fixtures").string();

            TempDir profiles;
            auto profiled = run_cli({"profile", "--manifest", manifest.string(),
                                     "--profiles-dir", profiles.dir.string()});
            check.require(profiled.code == 0, "profile failed: " + profiled.err);
            if (!check.ok)
                return;

            auto tuned = run_cli({"tune", "--manifest", manifest.string(), "--profiles-dir",
                                  profiles.dir.string(), "--llm-backend", "fixture",
                                  "--fixture-dir", fixtures});
            check.require(tuned.code == 0, "tune failed: " + tuned.err);
            if (!check.ok)
                return;
            auto tune_report = json::parse(tuned.out);
            check.require(tune_report.at("objective_value").is_number() &&
                              tune_report.at("objective_value").get<double>() == 1.0,
                          "labels are not separable on the tuning grid");
            std::ostringstream theta;
            theta << std::setprecision(17) << tune_report.at("theta_star").get<double>();

            const auto detect_args = [&](const std::string& report,
                                         bool parallel) -> std::vector<std::string> {
                std::vector<std::string> args = {
                    "detect",        "--manifest",     manifest.string(),
                    "--profiles-dir", profiles.dir.string(),
                    "--llm-backend", "fixture",
                    "--fixture-dir", fixtures,
                    "--theta",       theta.str(),
                    "--report",      report};
                if (parallel)
                    args.insert(args.end(), {"--parallel", "4"});
                return args;
            };
            const fs::path r1 = dir.dir / "verdicts-1.jsonl";
            const fs::path r2 = dir.dir / "verdicts-2.jsonl";
            const fs::path r3 = dir.dir / "verdicts-3.jsonl";
            for (const auto& [path, parallel] :
                 {std::pair{r1, false}, std::pair{r2, false}, std::pair{r3, true}}) {
                auto detected = run_cli(detect_args(path.string(), parallel));
                check.require(detected.code == 0, "detect failed: " + detected.err);
                if (!check.ok)
                    return;
            }
            const std::string bytes = read_file(r1);
            check.require(bytes == read_file(r2), "repeat run changed the report bytes");
            check.require(bytes == read_file(r3), "parallel run changed the report bytes");

            std::istringstream rows(bytes);
            std::string line;
            std::size_t row_count = 0;
            while (std::getline(rows, line)) {
                if (line.empty())
                    continue;
                ++row_count;
                auto row = json::parse(line);
                check.require(!row.contains("error"),
                              "pipeline error for " + row.at("doc_id").get<std::string>());
                if (!check.ok)
                    return;
                const bool is_blended =
                    row.at("doc_id").get<std::string>() == corpus.blended_doc_id;
                const std::string expected = is_blended ? "llm_assisted" : "human";
                check.require(row.at("label").get<std::string>() == expected,
                              row.at("doc_id").get<std::string>() + " labeled " +
                                  row.at("label").get<std::string>() + ", expected " + expected);
            }
            check.require(row_count == 3, "expected one verdict per post-cutoff document");
        });
}

bool criterion_agreement_oracles() {
    return run_criterion(
        4, "agreement statistics match brute-force recomputation on 1000 random tables", 5000,
        [](Check& check) {
            std::mt19937 rng(8101);
            std::uniform_int_distribution<int> items_dist(1, 10);
            std::uniform_int_distribution<int> cats_dist(2, 4);
            std::uniform_int_distribution<int> raters_dist(2, 5);
            std::uniform_int_distribution<long> discordant(0, 50);
            for (int trial = 0; trial < 1000 && check.ok; ++trial) {
                const int items = items_dist(rng);
                const int cats = cats_dist(rng);
                const int raters = raters_dist(rng);
                std::uniform_int_distribution<int> cat(0, cats - 1);

                std::vector<std::vector<long>> counts(
                    static_cast<std::size_t>(items),
                    std::vector<long>(static_cast<std::size_t>(cats), 0));
                for (auto& row : counts)
                    for (int r = 0; r < raters; ++r)
                        ++row[static_cast<std::size_t>(cat(rng))];
                check.require(std::fabs(metrics::fleiss_kappa(counts) -
                                        brute_force_fleiss(counts)) <= 1e-12,
                              "fleiss_kappa deviates from its defining formula");

                std::vector<int> a, b;
                for (int i = 0; i < items; ++i) {
                    a.push_back(cat(rng));
                    b.push_back(cat(rng));
                }
                check.require(std::fabs(metrics::cohens_kappa(a, b) -
                                        brute_force_cohen(a, b)) <= 1e-12,
                              "cohens_kappa deviates from its defining formula");

                const long only_a = discordant(rng);
                const long only_b = discordant(rng);
                auto mc = metrics::mcnemar(only_a, only_b);
                if (only_a + only_b == 0) {
                    check.require(mc.stat == 0.0 && mc.p == 1.0,
                                  "mcnemar must degrade gracefully with no discordant pairs");
                } else {
                    const double diff = static_cast<double>(only_a - only_b);
                    check.require(mc.stat ==
                                      diff * diff / static_cast<double>(only_a + only_b),
                                  "mcnemar statistic is not (b-c)^2/(b+c)");
                }
            }
        });
}

bool criterion_tuner_oracle() {
    return run_criterion(
        5, "threshold tuner equals exhaustive grid enumeration on 200 random sets", 5000,
        [](Check& check) {
            std::mt19937 rng(8205);
            std::uniform_int_distribution<int> size_dist(1, 20);
            std::uniform_real_distribution<double> score_dist(-1.0, 1.0);
            std::uniform_int_distribution<int> label_dist(0, 1);
            const metrics::Grid grid;
            const auto points =
                static_cast<std::size_t>((grid.max - grid.min) / grid.step + 1e-9) + 1;

            for (int trial = 0; trial < 200 && check.ok; ++trial) {
                const int n = size_dist(rng);
                std::vector<double> scores;
                std::vector<int> labels;
                for (int i = 0; i < n; ++i) {
                    scores.push_back(score_dist(rng));
                    labels.push_back(label_dist(rng));
                }
                const auto objective = trial % 2 == 0 ? metrics::Objective::f1
                                                      : metrics::Objective::accuracy;
                auto got = metrics::tune_threshold(scores, BoolBuf(labels), grid, objective);
                auto got_value = got.objective_value;

                // Exhaustive maximum.
                std::optional<double> best;
                for (std::size_t i = 0; i < points; ++i) {
                    const double theta = grid.min + static_cast<double>(i) * grid.step;
                    auto value = objective_at(scores, labels, theta, objective);
                    if (value && (!best || *value > *best))
                        best = value;
                }
                check.require(got_value.has_value() == best.has_value(),
                              "tuner disagrees with enumeration about definedness");
                if (got_value && best)
                    check.require(*got_value == *best,
                                  "tuner objective is below the enumerated maximum");

                // Tie-break: every larger grid threshold must be strictly worse.
                auto at_star = objective_at(scores, labels, got.theta, objective);
                check.require(at_star.has_value() == got_value.has_value() &&
                                  (!got_value || *at_star == *got_value),
                              "reported theta does not reproduce the reported value");
                for (std::size_t i = 0; i < points && check.ok; ++i) {
                    const double theta = grid.min + static_cast<double>(i) * grid.step;
                    if (theta <= got.theta)
                        continue;
                    auto value = objective_at(scores, labels, theta, objective);
                    if (!got_value)
                        check.require(false, "an undefined optimum must sit at the grid top");
                    else if (value)
                        check.require(*value < *got_value,
                                      "a larger theta ties or beats the reported optimum");
                }
            }
        });
}

bool criterion_stylometry() {
    return run_criterion(
        6, "style extraction: determinism, z-space invariants, toy-text values", 1000,
        [](Check& check) {
            const std::string bodies[6] = {
                "The river ran north past the old mill. We walked the bank for an hour and the "
                "light failed slowly. Nobody spoke of winter; it was enough to watch the water.",
                "Measurement error dominates the first experiment. We repeated the assay three "
                "times, and the variance did not shrink. The instrument drifts with heat.",
                "Why do archives hold so many unsigned letters? Caution is one answer, but not "
                "the only one. Clerks copied what they were told to copy, and kept quiet!",
                "Consider a lattice of coupled oscillators. Each node follows its neighbours "
                "with a small delay, and the delays accumulate into waves on the graph.",
                "The committee met on Tuesday. It adjourned without a vote. Minutes were kept, "
                "then lost, then found again in a drawer nobody remembered labelling.",
                "Sand moves in saltation, hopping downwind in shallow arcs. A million grains "
                "make a dune that creeps a few metres a year, swallowing fences.",
            };

            // Determinism: repeated extraction is bitwise identical.
            std::vector<stylometry::StyleVector> raw;
            for (const auto& body : bodies) {
                auto once = stylometry::extract(body);
                auto twice = stylometry::extract(body);
                check.require(once.values == twice.values, "extraction is not deterministic");
                raw.push_back(std::move(once));
            }

            // Fitting-set invariants: kept dimensions have z-mean 0, sample
            // z-std 1; dropped dimensions standardize to exactly 0.
            auto standardizer = stylometry::fit_standardizer(raw);
            std::vector<stylometry::StyleVector> z;
            for (const auto& v : raw)
                z.push_back(stylometry::standardize(standardizer, v));
            const double m = static_cast<double>(z.size());
            for (std::size_t dim = 0; dim < stylometry::kFeatureCount; ++dim) {
                double mean = 0.0;
                for (const auto& v : z)
                    mean += v.values[dim];
                mean /= m;
                if (!standardizer.kept_mask[dim]) {
                    for (const auto& v : z)
                        check.require(v.values[dim] == 0.0,
                                      "dropped dimension leaks through standardization");
                    continue;
                }
                double ss = 0.0;
                for (const auto& v : z)
                    ss += (v.values[dim] - mean) * (v.values[dim] - mean);
                const double std_dev = std::sqrt(ss / (m - 1.0));
                check.require(std::fabs(mean) < 1e-9, "z-space mean is off zero");
                check.require(std::fabs(std_dev - 1.0) < 1e-9, "z-space std is off one");
            }

            // Cosine: scale invariance and the zero-norm convention.
            std::mt19937 rng(8306);
            std::uniform_real_distribution<double> coord(-2.0, 2.0);
            for (int trial = 0; trial < 50; ++trial) {
                std::vector<double> u(17), v(17);
                for (std::size_t i = 0; i < u.size(); ++i) {
                    u[i] = coord(rng);
                    v[i] = coord(rng);
                }
                std::vector<double> u_scaled(u), v_scaled(v);
                for (auto& x : u_scaled)
                    x *= 2.5;
                for (auto& x : v_scaled)
                    x *= 0.3;
                check.require(std::fabs(stylometry::cosine(u, v) -
                                        stylometry::cosine(u_scaled, v_scaled)) <= 1e-12,
                              "cosine is not scale invariant");
            }
            const std::vector<double> zeros(17, 0.0);
            std::vector<double> ones(17, 1.0);
            check.require(stylometry::cosine(zeros, ones) == 0.0,
                          "zero-norm cosine must be 0");

            // Toy text, every dimension hand-counted.
            auto toy = stylometry::extract("The cat sat. The cat ran.");
            check.require(toy.values.size() == stylometry::kFeatureCount, "wrong arity");
            std::vector<double> expected(stylometry::kFeatureCount, 0.0);
            expected[0] = 6.0 / 2.0;                                    // tokens per sentence
            expected[1] = 0.0;                                          // equal-length sentences
            expected[2] = 18.0 / 6.0;                                   // letters per token
            expected[3] = 4.0 / 6.0;                                    // type-token ratio
            expected[4] = 2.0 / 6.0;                                    // hapax rate
            expected[5] = 1.0;                                          // syllables per word
            expected[6] = 206.835 - 1.015 * (6.0 / 2.0) - 84.6 * (6.0 / 6.0);
            expected[15] = 2.0 * 1000.0 / 6.0;                          // "the" per 1000 tokens
            for (std::size_t dim = 0; dim < stylometry::kFeatureCount && check.ok; ++dim)
                check.require(toy.values[dim] == expected[dim],
                              "toy-text feature " + std::to_string(dim) + " is off");
        });
}

bool criterion_monotonicity() {
    return run_criterion(
        7, "positive and anomaly counts are monotone in theta and k", 5000, [](Check& check) {
            auto corpus = synth::generate(synth::GeneratorConfig{});
            MapClient client(corpus.fixtures);

            std::map<std::string, std::vector<const corpus::Document*>> by_author;
            std::vector<const corpus::Document*> post_cutoff;
            for (const auto& doc : corpus.documents) {
                if (doc.year > corpus.cutoff_year)
                    post_cutoff.push_back(&doc);
                else
                    by_author[doc.author_id].push_back(&doc);
            }

            drift::DriftConfig dcfg;
            std::map<std::string, drift::AuthorProfile> profiles;
            for (const auto& [author, docs] : by_author) {
                check.require(docs.size() == 6, "unexpected training window for " + author);
                if (!check.ok)
                    return;
                profiles.emplace(author, drift::fit_profile(docs, dcfg).profile);
            }

            const auto positives = [&](double theta, int k, std::size_t* anomalies) {
                std::size_t count = 0;
                if (anomalies)
                    *anomalies = 0;
                for (const auto* doc : post_cutoff) {
                    attribution::AttributionParams params;
                    params.theta = theta;
                    params.k = k;
                    auto verdict =
                        attribution::classify(profiles.at(doc->author_id), *doc, client, params);
                    if (verdict.label == corpus::Label::llm_assisted)
                        ++count;
                    if (anomalies && verdict.anomalous)
                        ++*anomalies;
                }
                return count;
            };

            std::size_t previous = post_cutoff.size() + 1;
            bool ever_positive = false;
            for (double theta = -1.0; theta <= 1.0 + 1e-9; theta += 0.1) {
                const double clamped = std::min(theta, 1.0);
                const std::size_t count = positives(clamped, 1, nullptr);
                check.require(count <= previous || previous > post_cutoff.size(),
                              "raising theta increased the positive count");
                if (!check.ok)
                    return;
                ever_positive = ever_positive || count > 0;
                previous = count;
            }
            check.require(ever_positive, "no theta produces a positive at k=1");

            std::size_t prev_anomalies = post_cutoff.size() + 1;
            for (int k : {1, 2, 3}) {
                std::size_t anomalies = 0;
                (void)positives(0.0, k, &anomalies);
                check.require(anomalies <= prev_anomalies ||
                                  prev_anomalies > post_cutoff.size(),
                              "raising k increased the anomaly count");
                prev_anomalies = anomalies;
            }
        });
}

} // namespace

int main() {
    int failures = 0;
    failures += criterion_f1_columns() ? 0 : 1;
    failures += criterion_chi2() ? 0 : 1;
    failures += criterion_end_to_end() ? 0 : 1;
    failures += criterion_agreement_oracles() ? 0 : 1;
    failures += criterion_tuner_oracle() ? 0 : 1;
    failures += criterion_stylometry() ? 0 : 1;
    failures += criterion_monotonicity() ? 0 : 1;
    return failures;
}
