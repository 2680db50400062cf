#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "vulncure/core.hpp"

namespace testing {

namespace fs = std::filesystem;

inline fs::path data_dir() { return VULNCURE_TEST_DATA; }
inline fs::path fixture_workspace() { return VULNCURE_FIXTURE_WORKSPACE; }

/// Fresh directory under the build tree, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = fs::path(VULNCURE_TEST_TMP) / (tag + "-" + std::to_string(++counter));
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

struct RecordSpec {
    std::string id;
    std::string published = "2017-03-01";
    std::vector<std::pair<std::string, std::string>> cpes;
    std::optional<double> v2;
    std::optional<double> v3;
    std::vector<std::string> cwes;
    std::vector<std::string> urls;
    std::string description = "A vulnerability.";
};

inline vulncure::CveRecord make_record(const RecordSpec& s) {
    using namespace vulncure;
    CveRecord r;
    r.id = CveId::parse(s.id);
    r.published = Date::parse(s.published);
    r.last_modified = r.published;
    r.descriptions = {s.description};
    for (const auto& [v, p] : s.cpes) r.cpes.push_back({v, p, std::nullopt});
    if (s.v2) {
        CvssV2Assessment a;
        a.access_vector = AccessVector::Network;
        a.access_complexity = AccessComplexity::Low;
        a.authentication = Authentication::None;
        a.conf_impact = Impact::Partial;
        a.integ_impact = Impact::Partial;
        a.avail_impact = Impact::Partial;
        a.base_score = *s.v2;
        r.v2 = a;
    }
    if (s.v3) r.v3 = CvssV3Assessment::make(*s.v3, Provenance::FromFeed);
    r.cwe_ids.insert(s.cwes.begin(), s.cwes.end());
    for (const auto& u : s.urls) r.references.push_back({u, {}});
    return r;
}

inline std::string random_string(std::mt19937_64& rng, std::size_t max_len, std::string_view alphabet) {
    const std::size_t len = rng() % (max_len + 1);
    std::string s;
    for (std::size_t i = 0; i < len; ++i) s.push_back(alphabet[rng() % alphabet.size()]);
    return s;
}

}  // namespace testing
