#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace law::metrics {

struct ConfusionMatrix {
    long tp = 0;
    long fp = 0;
    long tn = 0;
    long fn = 0;

    long total() const { return tp + fp + tn + fn; }
};

/// Derived classification metrics. A 0/0 ratio is reported as nullopt
/// (undefined), never as 0.
struct MetricSet {
    std::optional<double> accuracy;
    std::optional<double> precision;
    std::optional<double> recall;
    std::optional<double> f1;
    std::optional<double> fpr;
};

/// Counts tp/fp/tn/fn; true means the positive (llm_assisted) class.
ConfusionMatrix confusion(std::span<const bool> labels, std::span<const bool> preds);

MetricSet metric_set(const ConfusionMatrix& cm);

enum class Objective { f1, accuracy };

struct Grid {
    double min = -1.0;
    double max = 1.0;
    double step = 0.01;
};

struct TuneResult {
    double theta = 0.0;
    std::optional<double> objective_value;
};

/// Grid search for the decision threshold of predict(score > theta).
/// Maximizes the objective over all grid points; among maximizers returns
/// the largest theta (fewest positives, lowest false-positive rate). An
/// undefined objective ranks below every defined value.
TuneResult tune_threshold(std::span<const double> scores, std::span<const bool> labels,
                          const Grid& grid, Objective objective = Objective::f1);

/// Upper-tail probability of the chi-squared distribution with df degrees of
/// freedom, via the regularized upper incomplete gamma function Q(df/2, x/2).
/// Relative error <= 1e-10.
double chi2_sf(double x, int df);

struct Chi2Result {
    double stat = 0.0;
    int df = 0;
    double p = 1.0;
};

/// Pearson chi-squared test of homogeneity on a 2 x D count table given as
/// its two rows. Throws DegenerateTable on a zero row or column sum.
Chi2Result chi2_homogeneity(std::span<const long> row0, std::span<const long> row1);

struct McNemarResult {
    double stat = 0.0;
    double p = 1.0;
};

/// McNemar test on discordant counts, without continuity correction:
/// stat = (b-c)^2/(b+c), df 1. b + c = 0 yields stat 0, p 1.
McNemarResult mcnemar(long b, long c);

/// Bonferroni correction: p -> min(1, m*p) with m the list length.
std::vector<double> bonferroni(std::span<const double> pvals);

/// Cohen's kappa between two raters' categorical labels. Both raters
/// constant on the same category yields 1.
double cohens_kappa(std::span<const int> rater_a, std::span<const int> rater_b);

/// Fleiss' kappa from an items x categories count table with the same number
/// of ratings n >= 2 on every item. Chance agreement 1 yields 1.
double fleiss_kappa(const std::vector<std::vector<long>>& category_counts);

/// items x raters categorical labels, as produced by stacking detector
/// predictions over a shared document set.
struct RatingTable {
    std::vector<std::vector<int>> labels; // labels[item][rater]

    std::size_t items() const { return labels.size(); }
    std::size_t raters() const { return labels.empty() ? 0 : labels.front().size(); }
    std::vector<int> rater_column(std::size_t rater) const;
    /// items x categories counts for fleiss_kappa; categories indexed 0..max.
    std::vector<std::vector<long>> to_category_counts() const;
};

} // namespace law::metrics
