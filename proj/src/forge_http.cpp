#include <cstdlib>
#include <stdexcept>

#include <httplib.h>
#include <json.hpp>

#include "commitforge/miner.hpp"

namespace commitforge::miner {

std::vector<RepoDescriptor> HttpForgeClient::list_repos() {
    httplib::Client client(base_url_);
    client.set_connection_timeout(10);
    client.set_read_timeout(30);
    httplib::Headers headers;
    if (const char* token = std::getenv("COMMITFORGE_FORGE_TOKEN"))
        headers.emplace("Authorization", std::string("Bearer ") + token);

    auto res = client.Get("/repos", headers);
    if (!res) throw std::runtime_error("forge-unreachable: " + base_url_);
    if (res->status == 429) {
        std::string retry = res->get_header_value("Retry-After");
        throw std::runtime_error("rate-limited: retry-after=" +
                                 (retry.empty() ? "unknown" : retry));
    }
    if (res->status != 200)
        throw std::runtime_error("forge-unreachable: HTTP " + std::to_string(res->status));

    nlohmann::json j = nlohmann::json::parse(res->body);
    std::vector<RepoDescriptor> out;
    for (const auto& item : j) {
        RepoDescriptor d;
        d.id = item.value("id", "");
        d.license = item.value("license", "");
        d.forks = item.value("forks", 0L);
        d.created_at = item.value("created_at", "");
        d.latest_commit_date = item.value("latest_commit_date", "");
        d.avg_daily_commits = item.value("avg_daily_commits", 0.0);
        if (item.contains("doc_files"))
            for (const auto& doc : item["doc_files"]) d.doc_files.push_back(doc.get<std::string>());
        out.push_back(std::move(d));
    }
    return out;
}

} // namespace commitforge::miner
