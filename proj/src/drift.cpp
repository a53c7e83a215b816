#include "law/drift.hpp"

#include "law/error.hpp"

#include <cmath>

namespace law::drift {

void DriftConfig::check() const {
    if (window < 2 || window > 10)
        throw Error(ErrorCode::InvalidArgument,
                    "window must be in [2, 10], got " + std::to_string(window));
    if (k < 1 || k > 3)
        throw Error(ErrorCode::InvalidArgument, "k must be in {1, 2, 3}, got " + std::to_string(k));
}

std::vector<double> consecutive_changes(const std::vector<stylometry::StyleVector>& zvecs) {
    if (zvecs.size() < 2)
        throw Error(ErrorCode::TooFewVectors,
                    "need at least 2 vectors, got " + std::to_string(zvecs.size()));
    std::vector<double> changes;
    changes.reserve(zvecs.size() - 1);
    for (std::size_t i = 1; i < zvecs.size(); ++i)
        changes.push_back(stylometry::euclidean(zvecs[i - 1].values, zvecs[i].values));
    return changes;
}

namespace {

ProfileFit fit_from_vectors(std::vector<stylometry::StyleVector> raws,
                            std::vector<std::string> doc_ids, std::string author_id) {
    ProfileFit fit;
    fit.profile.author_id = std::move(author_id);
    fit.profile.standardizer = stylometry::fit_standardizer(raws);

    std::vector<stylometry::StyleVector> zvecs;
    zvecs.reserve(raws.size());
    for (const auto& raw : raws)
        zvecs.push_back(stylometry::standardize(fit.profile.standardizer, raw));

    std::vector<double> changes = consecutive_changes(zvecs);
    double sum = 0.0;
    for (double c : changes)
        sum += c;
    fit.profile.avg_change = sum / static_cast<double>(changes.size());
    if (changes.size() < 2) {
        fit.profile.std_change = 0.0;
    } else {
        double ss = 0.0;
        for (double c : changes) {
            double d = c - fit.profile.avg_change;
            ss += d * d;
        }
        fit.profile.std_change = std::sqrt(ss / static_cast<double>(changes.size() - 1));
    }
    if (changes.size() < 2 || fit.profile.std_change == 0.0)
        fit.warnings.push_back("DegenerateSpread: style-change spread is zero; the anomaly "
                               "threshold reduces to avg_change");

    fit.profile.window_doc_ids = std::move(doc_ids);
    fit.profile.last_training_vector = std::move(zvecs.back());
    return fit;
}

} // namespace

ProfileFit fit_profile(std::span<const corpus::Document* const> docs, const DriftConfig& cfg) {
    cfg.check();
    if (docs.size() != static_cast<std::size_t>(cfg.window))
        throw Error(ErrorCode::InvalidArgument,
                    "expected exactly " + std::to_string(cfg.window) + " training documents, got " +
                        std::to_string(docs.size()));
    std::vector<stylometry::StyleVector> raws;
    std::vector<std::string> ids;
    raws.reserve(docs.size());
    for (const corpus::Document* doc : docs) {
        raws.push_back(stylometry::extract(doc->body));
        ids.push_back(doc->doc_id);
    }
    return fit_from_vectors(std::move(raws), std::move(ids), docs.front()->author_id);
}

ProfileFit fit_profile(std::span<const corpus::Document> docs, const DriftConfig& cfg) {
    std::vector<const corpus::Document*> ptrs;
    ptrs.reserve(docs.size());
    for (const auto& doc : docs)
        ptrs.push_back(&doc);
    return fit_profile(std::span<const corpus::Document* const>(ptrs), cfg);
}

double anomaly_threshold(const AuthorProfile& profile, int k) {
    return profile.avg_change + static_cast<double>(k) * profile.std_change;
}

double anomaly_score(const AuthorProfile& profile, const stylometry::StyleVector& new_doc_raw,
                     ComparisonTarget target) {
    stylometry::StyleVector z = stylometry::standardize(profile.standardizer, new_doc_raw);
    if (target == ComparisonTarget::centroid) {
        // Training centroid is the origin in z-space.
        std::vector<double> zero(z.values.size(), 0.0);
        return stylometry::euclidean(z.values, zero);
    }
    return stylometry::euclidean(z.values, profile.last_training_vector.values);
}

bool is_anomalous(const AuthorProfile& profile, double d_star, int k) {
    return d_star > 0.0 && d_star >= anomaly_threshold(profile, k);
}

stylometry::StyleVector delta(const AuthorProfile& profile,
                              const stylometry::StyleVector& new_doc_raw) {
    return stylometry::standardize(profile.standardizer, new_doc_raw);
}

} // namespace law::drift
