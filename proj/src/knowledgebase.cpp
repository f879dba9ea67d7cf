#include "sigver/knowledgebase.hpp"

#include "sigver/errors.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace sigver {

namespace {

using nlohmann::json;

json to_json(const UserModel& model) {
    json j;
    j["user_id"] = model.user_id;
    j["selected_indices"] = model.selected_indices;
    j["normalization"]["mean"] =
        std::vector<double>(model.normalization.mean.begin(), model.normalization.mean.end());
    j["normalization"]["scale"] =
        std::vector<double>(model.normalization.scale.begin(), model.normalization.scale.end());
    j["alpha"] = model.alpha;
    j["tau"] = model.tau;
    j["references"] = json::array();
    for (const auto& ref : model.references) {
        json r;
        r["cluster_id"] = ref.cluster_id;
        r["member_count"] = ref.member_count;
        json intervals = json::array();
        for (const auto& [lo, hi] : ref.intervals) intervals.push_back({lo, hi});
        r["intervals"] = std::move(intervals);
        j["references"].push_back(std::move(r));
    }
    return j;
}

[[noreturn]] void corrupt(const std::string& what) {
    throw data_error("corrupt knowledgebase: " + what);
}

void require_finite(double v, const std::string& what) {
    if (!std::isfinite(v)) corrupt(what + " is not finite");
}

UserModel model_from_json(const json& j) {
    UserModel model;
    try {
        model.user_id = j.at("user_id").get<std::string>();
        model.selected_indices = j.at("selected_indices").get<std::vector<int>>();
        const auto mean = j.at("normalization").at("mean").get<std::vector<double>>();
        const auto scale = j.at("normalization").at("scale").get<std::vector<double>>();
        model.normalization.mean =
            Eigen::Map<const Eigen::VectorXd>(mean.data(), (int)mean.size());
        model.normalization.scale =
            Eigen::Map<const Eigen::VectorXd>(scale.data(), (int)scale.size());
        model.alpha = j.at("alpha").get<double>();
        model.tau = j.at("tau").get<double>();
        for (const auto& r : j.at("references")) {
            ReferenceInterval ref;
            ref.cluster_id = r.at("cluster_id").get<int>();
            ref.member_count = r.at("member_count").get<int>();
            for (const auto& pair : r.at("intervals")) {
                if (!pair.is_array() || pair.size() != 2) corrupt("interval is not a [lo, hi] pair");
                ref.intervals.emplace_back(pair[0].get<double>(), pair[1].get<double>());
            }
            model.references.push_back(std::move(ref));
        }
    } catch (const json::exception& e) {
        corrupt(e.what());
    }

    // invariant gate
    if (model.user_id.empty()) corrupt("empty user_id");
    const int K = (int)model.normalization.mean.size();
    if ((int)model.normalization.scale.size() != K)
        corrupt("normalization mean/scale lengths differ");
    for (int k = 0; k < K; ++k) {
        require_finite(model.normalization.mean[k], "normalization mean");
        require_finite(model.normalization.scale[k], "normalization scale");
        if (model.normalization.scale[k] <= 0.0) corrupt("normalization scale must be positive");
    }
    std::set<int> seen;
    for (int idx : model.selected_indices) {
        if (idx < 0 || idx >= K) corrupt("selected index out of range for user " + model.user_id);
        if (!seen.insert(idx).second) corrupt("duplicate selected index for user " + model.user_id);
    }
    if (model.alpha < 0.0) corrupt("alpha must be >= 0");
    if (model.tau < 0.0 || model.tau > 1.0) corrupt("tau outside [0, 1]");
    if (model.references.empty()) corrupt("user " + model.user_id + " has no references");
    for (const auto& ref : model.references) {
        if (ref.member_count < 1) corrupt("reference member_count must be >= 1");
        if (ref.intervals.size() != model.selected_indices.size())
            corrupt("reference interval count does not match selected_indices for user " +
                    model.user_id);
        for (const auto& [lo, hi] : ref.intervals) {
            require_finite(lo, "interval bound");
            require_finite(hi, "interval bound");
            if (lo > hi) corrupt("interval with lower bound above upper bound for user " +
                                 model.user_id);
        }
    }
    return model;
}

} // namespace

const UserModel* Knowledgebase::find(const std::string& user_id) const {
    for (const auto& model : models)
        if (model.user_id == user_id) return &model;
    return nullptr;
}

void save_knowledgebase(const Knowledgebase& kb, const std::string& path) {
    json doc;
    doc["version"] = kb.version;
    doc["created"] = kb.created;
    doc["config"] = kb.config.is_null() ? json::object() : kb.config;
    doc["models"] = json::array();
    for (const auto& model : kb.models) doc["models"].push_back(to_json(model));
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write " + path);
    out << doc.dump(2) << '\n';
    if (!out) throw io_error("write failed for " + path);
}

Knowledgebase load_knowledgebase(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw data_error(path + ": " + e.what());
    }
    if (!doc.contains("version") || !doc["version"].is_string())
        throw data_error(path + ": missing version");
    Knowledgebase kb;
    kb.version = doc["version"].get<std::string>();
    if (kb.version != "1")
        throw data_error(path + ": unsupported knowledgebase version '" + kb.version + "'");
    kb.created = doc.value("created", std::string());
    kb.config = doc.contains("config") ? doc["config"] : json::object();
    if (!doc.contains("models") || !doc["models"].is_array())
        throw data_error(path + ": missing models array");
    std::set<std::string> user_ids;
    for (const auto& entry : doc["models"]) {
        kb.models.push_back(model_from_json(entry));
        if (!user_ids.insert(kb.models.back().user_id).second)
            throw data_error(path + ": duplicate user_id " + kb.models.back().user_id);
    }
    return kb;
}

} // namespace sigver
