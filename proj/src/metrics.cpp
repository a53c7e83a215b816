#include "law/metrics.hpp"

#include "law/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace law::metrics {

ConfusionMatrix confusion(std::span<const bool> labels, std::span<const bool> preds) {
    if (labels.size() != preds.size())
        throw Error(ErrorCode::LengthMismatch, std::to_string(labels.size()) + " labels vs " +
                                                   std::to_string(preds.size()) + " predictions");
    if (labels.empty())
        throw Error(ErrorCode::LengthMismatch, "empty label list");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i])
            (preds[i] ? cm.tp : cm.fn)++;
        else
            (preds[i] ? cm.fp : cm.tn)++;
    }
    return cm;
}

MetricSet metric_set(const ConfusionMatrix& cm) {
    const auto ratio = [](long num, long den) -> std::optional<double> {
        if (den == 0)
            return std::nullopt;
        return static_cast<double>(num) / static_cast<double>(den);
    };
    MetricSet m;
    m.accuracy = ratio(cm.tp + cm.tn, cm.total());
    m.precision = ratio(cm.tp, cm.tp + cm.fp);
    m.recall = ratio(cm.tp, cm.tp + cm.fn);
    m.fpr = ratio(cm.fp, cm.fp + cm.tn);
    if (m.precision && m.recall && *m.precision + *m.recall > 0.0)
        m.f1 = 2.0 * *m.precision * *m.recall / (*m.precision + *m.recall);
    return m;
}

namespace {

std::optional<double> objective_at(std::span<const double> scores, std::span<const bool> labels,
                                   double theta, Objective objective) {
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        bool pred = scores[i] > theta;
        if (labels[i])
            (pred ? cm.tp : cm.fn)++;
        else
            (pred ? cm.fp : cm.tn)++;
    }
    MetricSet m = metric_set(cm);
    return objective == Objective::f1 ? m.f1 : m.accuracy;
}

} // namespace

TuneResult tune_threshold(std::span<const double> scores, std::span<const bool> labels,
                          const Grid& grid, Objective objective) {
    if (scores.size() != labels.size())
        throw Error(ErrorCode::LengthMismatch, std::to_string(scores.size()) + " scores vs " +
                                                   std::to_string(labels.size()) + " labels");
    if (scores.empty())
        throw Error(ErrorCode::LengthMismatch, "empty score list");
    if (grid.step <= 0.0)
        throw Error(ErrorCode::EmptyGrid, "grid step must be > 0");
    if (grid.max < grid.min)
        throw Error(ErrorCode::EmptyGrid, "grid max below min");

    // Integer stepping keeps the grid points stable; the slack absorbs
    // representation error in (max - min) / step.
    const auto points = static_cast<std::size_t>((grid.max - grid.min) / grid.step + 1e-9) + 1;

    TuneResult best;
    bool have_best = false;
    for (std::size_t i = 0; i < points; ++i) {
        double theta = grid.min + static_cast<double>(i) * grid.step;
        std::optional<double> value = objective_at(scores, labels, theta, objective);
        // Strictly better, or equal value at a larger theta; undefined ranks
        // below any defined value.
        bool better;
        if (!have_best)
            better = true;
        else if (value.has_value() != best.objective_value.has_value())
            better = value.has_value();
        else if (value && *value != *best.objective_value)
            better = *value > *best.objective_value;
        else
            better = true; // same value, larger theta wins
        if (better) {
            best.theta = theta;
            best.objective_value = value;
            have_best = true;
        }
    }
    return best;
}

namespace {

// Regularized incomplete gamma: series for P(a,x) when x < a+1, Lentz
// continued fraction for Q(a,x) otherwise.
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double term = sum;
    for (int n = 0; n < 500; ++n) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * 1e-16)
            break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_contfrac(double a, double x) {
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int n = 1; n < 500; ++n) {
        double an = -static_cast<double>(n) * (static_cast<double>(n) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny)
            d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny)
            c = tiny;
        d = 1.0 / d;
        double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-16)
            break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

} // namespace

double chi2_sf(double x, int df) {
    if (x < 0.0)
        throw Error(ErrorCode::OutOfRange, "chi-squared statistic must be >= 0");
    if (df < 1)
        throw Error(ErrorCode::OutOfRange, "degrees of freedom must be >= 1");
    if (x == 0.0)
        return 1.0;
    const double a = static_cast<double>(df) / 2.0;
    const double y = x / 2.0;
    if (y < a + 1.0)
        return 1.0 - gamma_p_series(a, y);
    return gamma_q_contfrac(a, y);
}

Chi2Result chi2_homogeneity(std::span<const long> row0, std::span<const long> row1) {
    if (row0.size() != row1.size())
        throw Error(ErrorCode::LengthMismatch, std::to_string(row0.size()) + " vs " +
                                                   std::to_string(row1.size()) + " columns");
    if (row0.size() < 2)
        throw Error(ErrorCode::DegenerateTable, "need at least 2 columns");

    double total = 0.0;
    double row_sum[2] = {0.0, 0.0};
    for (std::size_t j = 0; j < row0.size(); ++j) {
        if (row0[j] < 0 || row1[j] < 0)
            throw Error(ErrorCode::OutOfRange, "negative count");
        if (row0[j] + row1[j] == 0)
            throw Error(ErrorCode::DegenerateTable, "column " + std::to_string(j) + " sums to 0");
        row_sum[0] += static_cast<double>(row0[j]);
        row_sum[1] += static_cast<double>(row1[j]);
    }
    if (row_sum[0] == 0.0 || row_sum[1] == 0.0)
        throw Error(ErrorCode::DegenerateTable, "a row sums to 0");
    total = row_sum[0] + row_sum[1];

    Chi2Result result;
    result.df = static_cast<int>(row0.size()) - 1;
    for (std::size_t j = 0; j < row0.size(); ++j) {
        double col = static_cast<double>(row0[j] + row1[j]);
        for (int r = 0; r < 2; ++r) {
            double observed = static_cast<double>(r == 0 ? row0[j] : row1[j]);
            double expected = row_sum[r] * col / total;
            double d = observed - expected;
            result.stat += d * d / expected;
        }
    }
    result.p = chi2_sf(result.stat, result.df);
    return result;
}

McNemarResult mcnemar(long b, long c) {
    if (b < 0 || c < 0)
        throw Error(ErrorCode::OutOfRange, "discordant counts must be >= 0");
    McNemarResult result;
    if (b + c == 0)
        return result; // stat 0, p 1 by convention
    double diff = static_cast<double>(b - c);
    result.stat = diff * diff / static_cast<double>(b + c);
    result.p = chi2_sf(result.stat, 1);
    return result;
}

std::vector<double> bonferroni(std::span<const double> pvals) {
    const double m = static_cast<double>(pvals.size());
    std::vector<double> adjusted;
    adjusted.reserve(pvals.size());
    for (double p : pvals) {
        if (p < 0.0 || p > 1.0)
            throw Error(ErrorCode::OutOfRange, "p-value " + std::to_string(p) + " outside [0, 1]");
        adjusted.push_back(std::min(1.0, m * p));
    }
    return adjusted;
}

double cohens_kappa(std::span<const int> rater_a, std::span<const int> rater_b) {
    if (rater_a.size() != rater_b.size())
        throw Error(ErrorCode::LengthMismatch, std::to_string(rater_a.size()) + " vs " +
                                                   std::to_string(rater_b.size()) + " ratings");
    if (rater_a.empty())
        throw Error(ErrorCode::LengthMismatch, "empty rating list");

    int max_cat = 0;
    for (std::size_t i = 0; i < rater_a.size(); ++i)
        max_cat = std::max({max_cat, rater_a[i], rater_b[i]});
    const std::size_t categories = static_cast<std::size_t>(max_cat) + 1;
    const double n = static_cast<double>(rater_a.size());

    std::vector<long> count_a(categories, 0), count_b(categories, 0);
    long agreements = 0;
    for (std::size_t i = 0; i < rater_a.size(); ++i) {
        ++count_a[static_cast<std::size_t>(rater_a[i])];
        ++count_b[static_cast<std::size_t>(rater_b[i])];
        if (rater_a[i] == rater_b[i])
            ++agreements;
    }
    // Both raters constant on the same category: chance agreement is 1 and
    // so is observed agreement.
    for (std::size_t c = 0; c < categories; ++c)
        if (count_a[c] == static_cast<long>(rater_a.size()) &&
            count_b[c] == static_cast<long>(rater_b.size()))
            return 1.0;

    double p_o = static_cast<double>(agreements) / n;
    double p_e = 0.0;
    for (std::size_t c = 0; c < categories; ++c)
        p_e += (static_cast<double>(count_a[c]) / n) * (static_cast<double>(count_b[c]) / n);
    return (p_o - p_e) / (1.0 - p_e);
}

double fleiss_kappa(const std::vector<std::vector<long>>& category_counts) {
    if (category_counts.empty())
        throw Error(ErrorCode::RaggedTable, "no items");
    const std::size_t categories = category_counts.front().size();
    long n = 0;
    for (long c : category_counts.front())
        n += c;
    if (n < 2)
        throw Error(ErrorCode::RaggedTable, "need >= 2 ratings per item");
    for (const auto& row : category_counts) {
        if (row.size() != categories)
            throw Error(ErrorCode::RaggedTable, "rows differ in category count");
        long row_n = 0;
        for (long c : row) {
            if (c < 0)
                throw Error(ErrorCode::OutOfRange, "negative count");
            row_n += c;
        }
        if (row_n != n)
            throw Error(ErrorCode::RaggedTable, "items differ in rating count");
    }

    const double items = static_cast<double>(category_counts.size());
    const double dn = static_cast<double>(n);
    double p_bar = 0.0;
    std::vector<double> p_j(categories, 0.0);
    for (const auto& row : category_counts) {
        double agree = 0.0;
        for (std::size_t j = 0; j < categories; ++j) {
            agree += static_cast<double>(row[j]) * static_cast<double>(row[j]);
            p_j[j] += static_cast<double>(row[j]);
        }
        p_bar += (agree - dn) / (dn * (dn - 1.0));
    }
    p_bar /= items;
    double p_e = 0.0;
    for (double& pj : p_j) {
        pj /= items * dn;
        p_e += pj * pj;
    }
    if (1.0 - p_e <= 0.0)
        return 1.0; // all ratings in one category
    return (p_bar - p_e) / (1.0 - p_e);
}

std::vector<int> RatingTable::rater_column(std::size_t rater) const {
    std::vector<int> column;
    column.reserve(labels.size());
    for (const auto& row : labels)
        column.push_back(row.at(rater));
    return column;
}

std::vector<std::vector<long>> RatingTable::to_category_counts() const {
    int max_cat = 0;
    for (const auto& row : labels)
        for (int label : row)
            max_cat = std::max(max_cat, label);
    std::vector<std::vector<long>> counts;
    counts.reserve(labels.size());
    for (const auto& row : labels) {
        std::vector<long> item(static_cast<std::size_t>(max_cat) + 1, 0);
        for (int label : row)
            ++item[static_cast<std::size_t>(label)];
        counts.push_back(std::move(item));
    }
    return counts;
}

} // namespace law::metrics
