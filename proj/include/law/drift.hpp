#pragma once

#include "law/corpus.hpp"
#include "law/stylometry.hpp"

#include <span>
#include <string>
#include <vector>

namespace law::drift {

/// What a new document's writing style is measured against when computing
/// the anomaly distance: the most recent training document (the same
/// quantity the training changes are built from) or the training centroid.
enum class ComparisonTarget { last, centroid };

struct DriftConfig {
    int window = 6; // n: training documents per author
    int k = 1;      // anomaly threshold multiplier

    /// Enforces n in [2, 10] and k in {1, 2, 3}.
    void check() const;
};

/// Frozen per-author style-dynamics model: standardizer fitted on the
/// training window, mean and sample std of the consecutive style changes,
/// and the newest training document's z-space vector.
struct AuthorProfile {
    std::string author_id;
    stylometry::Standardizer standardizer;
    double avg_change = 0.0;
    double std_change = 0.0;
    std::vector<std::string> window_doc_ids; // ascending time
    stylometry::StyleVector last_training_vector;

    int window_size() const { return static_cast<int>(window_doc_ids.size()); }
    const std::string& schema_id() const { return standardizer.schema_id; }
};

/// Euclidean distances between successive z-space vectors, in order.
std::vector<double> consecutive_changes(const std::vector<stylometry::StyleVector>& zvecs);

struct ProfileFit {
    AuthorProfile profile;
    std::vector<std::string> warnings; // e.g. DegenerateSpread
};

/// Builds an author profile from exactly cfg.window training documents in
/// ascending time order: extract raw vectors, fit the standardizer, measure
/// the consecutive changes, and freeze their mean/std.
ProfileFit fit_profile(std::span<const corpus::Document* const> docs, const DriftConfig& cfg);
ProfileFit fit_profile(std::span<const corpus::Document> docs, const DriftConfig& cfg);

double anomaly_threshold(const AuthorProfile& profile, int k);

/// Distance of a new document (raw vector) from the profile's comparison
/// target, measured in the author's z-space.
double anomaly_score(const AuthorProfile& profile, const stylometry::StyleVector& new_doc_raw,
                     ComparisonTarget target = ComparisonTarget::last);

/// d* >= avg_change + k*std_change, with a d* > 0 guard so a history of
/// identical documents never flags its own clones.
bool is_anomalous(const AuthorProfile& profile, double d_star, int k);

/// Difference between the new document's z-vector and the training centroid.
/// The centroid is zero by construction, so this equals the standardized
/// new vector.
stylometry::StyleVector delta(const AuthorProfile& profile,
                              const stylometry::StyleVector& new_doc_raw);

} // namespace law::drift
