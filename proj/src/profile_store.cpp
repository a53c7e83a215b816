#include "law/profile_store.hpp"

#include "law/error.hpp"

#include <json.hpp>

#include <fstream>

namespace law::corpus {

namespace {

using nlohmann::json;

constexpr const char* kProfileSchemaVersion = "law-profile-v1";

} // namespace

std::string profile_file_name(std::string_view author_id) {
    std::string name;
    name.reserve(author_id.size() + 5);
    for (char c : author_id) {
        bool safe = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') ||
                    c == '.' || c == '_' || c == '-';
        name.push_back(safe ? c : '_');
    }
    return name + ".json";
}

std::filesystem::path store_profile(const drift::AuthorProfile& profile,
                                    const std::filesystem::path& dir) {
    json obj;
    obj["schema_version"] = kProfileSchemaVersion;
    obj["author_id"] = profile.author_id;
    obj["feature_schema"] = profile.schema_id();
    obj["means"] = profile.standardizer.means;
    obj["stds"] = profile.standardizer.stds;
    obj["kept_mask"] = profile.standardizer.kept_mask;
    obj["avg_change"] = profile.avg_change;
    obj["std_change"] = profile.std_change;
    obj["window_doc_ids"] = profile.window_doc_ids;
    obj["last_training_vector"] = profile.last_training_vector.values;

    std::filesystem::path path = dir / profile_file_name(profile.author_id);
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
        out << obj.dump(2) << '\n';
        out.flush();
        if (!out)
            throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec)
        throw Error(ErrorCode::IoError, "cannot rename " + tmp.string() + " to " + path.string() +
                                            ": " + ec.message());
    return path;
}

drift::AuthorProfile load_profile(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::IoError, "cannot read " + path.string());
    json obj = json::parse(in, nullptr, false);
    if (obj.is_discarded() || !obj.is_object())
        throw Error(ErrorCode::MalformedRecord, path.string() + ": not a JSON object");

    const std::string version = obj.value("schema_version", "");
    if (version != kProfileSchemaVersion)
        throw Error(ErrorCode::SchemaVersionMismatch,
                    path.string() + ": \"" + version + "\" (expected " + kProfileSchemaVersion + ")");

    try {
        drift::AuthorProfile profile;
        profile.author_id = obj.at("author_id").get<std::string>();
        profile.standardizer.schema_id = obj.at("feature_schema").get<std::string>();
        profile.standardizer.means = obj.at("means").get<std::vector<double>>();
        profile.standardizer.stds = obj.at("stds").get<std::vector<double>>();
        profile.standardizer.kept_mask = obj.at("kept_mask").get<std::vector<bool>>();
        profile.avg_change = obj.at("avg_change").get<double>();
        profile.std_change = obj.at("std_change").get<double>();
        profile.window_doc_ids = obj.at("window_doc_ids").get<std::vector<std::string>>();
        profile.last_training_vector.schema_id = profile.standardizer.schema_id;
        profile.last_training_vector.values =
            obj.at("last_training_vector").get<std::vector<double>>();
        return profile;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::MalformedRecord, path.string() + ": " + e.what());
    }
}

} // namespace law::corpus
