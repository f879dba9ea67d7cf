#pragma once

#include "sigver/reference_model.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace sigver {

struct Knowledgebase {
    std::string version = "1";
    std::string created;             // RFC 3339; pinned by --fixed-time
    nlohmann::json config;           // enrollment parameter echo
    std::vector<UserModel> models;

    const UserModel* find(const std::string& user_id) const;
};

// JSON, sorted keys, full round-trip number precision: save -> load -> save
// is byte-identical.
void save_knowledgebase(const Knowledgebase& kb, const std::string& path);

// Re-validates every model invariant; rejects unknown versions.
Knowledgebase load_knowledgebase(const std::string& path);

} // namespace sigver
