#include "vulncure/ingest.hpp"

#include <zlib.h>

#include <algorithm>
#include <fstream>
#include <future>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

namespace vulncure::ingest {

using nlohmann::json;
namespace fs = std::filesystem;

void FeedStats::merge(const FeedStats& other) {
    records_total += other.records_total;
    records_skipped += other.records_skipped;
    for (const auto& [reason, n] : other.skip_reasons) skip_reasons[reason] += n;
}

std::string maybe_gunzip(std::string_view bytes) {
    if (bytes.size() < 2 || static_cast<unsigned char>(bytes[0]) != 0x1f ||
        static_cast<unsigned char>(bytes[1]) != 0x8b) {
        return std::string(bytes);
    }
    z_stream zs{};
    // 15 + 32: zlib or gzip header autodetection.
    if (inflateInit2(&zs, 15 + 32) != Z_OK) throw FormatError("inflateInit2 failed");
    zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(bytes.data()));
    zs.avail_in = static_cast<uInt>(bytes.size());
    std::string out;
    char buffer[1 << 16];
    int rc = Z_OK;
    do {
        zs.next_out = reinterpret_cast<Bytef*>(buffer);
        zs.avail_out = sizeof buffer;
        rc = inflate(&zs, Z_NO_FLUSH);
        if (rc != Z_OK && rc != Z_STREAM_END) {
            inflateEnd(&zs);
            throw FormatError("corrupt gzip stream");
        }
        out.append(buffer, sizeof buffer - zs.avail_out);
    } while (rc != Z_STREAM_END);
    inflateEnd(&zs);
    return out;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("read error on " + path.string());
    return ss.str();
}

// ---------------------------------------------------------------------------
// CPE strings

namespace {

// Splits a CPE 2.3 formatted string on unescaped ':' and drops escapes.
std::vector<std::string> split_cpe23(std::string_view s) {
    std::vector<std::string> parts(1);
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '\\' && i + 1 < s.size()) {
            parts.back().push_back(s[++i]);
        } else if (s[i] == ':') {
            parts.emplace_back();
        } else {
            parts.back().push_back(s[i]);
        }
    }
    return parts;
}

std::string percent_decode(std::string_view s) {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '%' && i + 2 < s.size() && std::isxdigit(static_cast<unsigned char>(s[i + 1])) &&
            std::isxdigit(static_cast<unsigned char>(s[i + 2]))) {
            out.push_back(static_cast<char>(std::stoi(std::string(s.substr(i + 1, 2)), nullptr, 16)));
            i += 2;
        } else {
            out.push_back(s[i]);
        }
    }
    return out;
}

std::string escape_cpe23(std::string_view s) {
    std::string out;
    for (char c : s) {
        const auto u = static_cast<unsigned char>(c);
        if (!(std::isalnum(u) || c == '_' || c == '-' || c == '.' || u >= 0x80)) out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

std::optional<std::string> wildcard_to_optional(std::string v) {
    if (v.empty() || v == "*" || v == "-") return std::nullopt;
    return v;
}

}  // namespace

std::optional<CpeEntry> parse_cpe(std::string_view cpe) {
    std::string vendor, product;
    std::optional<std::string> version;
    if (cpe.rfind("cpe:2.3:", 0) == 0) {
        auto parts = split_cpe23(cpe);
        if (parts.size() < 5) return std::nullopt;
        vendor = parts[3];
        product = parts[4];
        if (parts.size() > 5) version = wildcard_to_optional(parts[5]);
    } else if (cpe.rfind("cpe:/", 0) == 0) {
        std::vector<std::string> parts;
        std::string cur;
        for (char c : cpe.substr(5)) {
            if (c == ':') {
                parts.push_back(std::move(cur));
                cur.clear();
            } else {
                cur.push_back(c);
            }
        }
        parts.push_back(std::move(cur));
        if (parts.size() < 3) return std::nullopt;
        vendor = percent_decode(parts[1]);
        product = percent_decode(parts[2]);
        if (parts.size() > 3) version = wildcard_to_optional(percent_decode(parts[3]));
    } else {
        return std::nullopt;
    }
    vendor = to_lower(vendor);
    product = to_lower(product);
    if (vendor.empty() || product.empty() || vendor == "*" || product == "*") return std::nullopt;
    return CpeEntry{std::move(vendor), std::move(product), std::move(version)};
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

struct SkipItem {
    std::string reason;
};

const json* child(const json& j, const char* key) {
    if (!j.is_object()) return nullptr;
    auto it = j.find(key);
    return it == j.end() || it->is_null() ? nullptr : &*it;
}

std::string string_at(const json& j, const char* key, const char* reason) {
    const json* v = child(j, key);
    if (!v || !v->is_string()) throw SkipItem{reason};
    return v->get<std::string>();
}

double score_at(const json& j, const char* key) {
    const json* v = child(j, key);
    if (!v || !v->is_number()) throw SkipItem{"bad-cvss"};
    const double s = v->get<double>();
    if (s < 0.0 || s > 10.0) throw SkipItem{"bad-cvss"};
    return s;
}

bool flag_at(const json& j, const char* key) {
    const json* v = child(j, key);
    return v && v->is_boolean() && v->get<bool>();
}

void collect_node_cpes(const json& node, std::vector<CpeEntry>& out) {
    for (const char* key : {"cpe_match", "cpe"}) {
        if (const json* matches = child(node, key); matches && matches->is_array()) {
            for (const auto& m : *matches) {
                if (const json* vuln = child(m, "vulnerable"); vuln && vuln->is_boolean() && !vuln->get<bool>()) {
                    continue;
                }
                for (const char* uri_key : {"cpe23Uri", "cpe22Uri"}) {
                    if (const json* uri = child(m, uri_key); uri && uri->is_string()) {
                        if (auto cpe = parse_cpe(uri->get<std::string>())) {
                            out.push_back(std::move(*cpe));
                            break;
                        }
                    }
                }
            }
        }
    }
    if (const json* children = child(node, "children"); children && children->is_array()) {
        for (const auto& c : *children) collect_node_cpes(c, out);
    }
}

std::vector<CpeEntry> dedup_cpes(std::vector<CpeEntry> cpes) {
    std::vector<CpeEntry> out;
    std::set<CpeEntry> seen;
    for (auto& c : cpes) {
        if (seen.insert(c).second) out.push_back(std::move(c));
    }
    return out;
}

CveRecord parse_item(const json& item) {
    if (!item.is_object()) throw SkipItem{"bad-structure"};
    const json* cve = child(item, "cve");
    if (!cve) throw SkipItem{"bad-structure"};
    const json* meta = child(*cve, "CVE_data_meta");
    if (!meta) throw SkipItem{"bad-id"};
    auto id = CveId::try_parse(string_at(*meta, "ID", "bad-id"));
    if (!id) throw SkipItem{"bad-id"};

    CveRecord r;
    r.id = *id;

    auto published = Date::try_parse(string_at(item, "publishedDate", "bad-date"));
    auto modified = Date::try_parse(string_at(item, "lastModifiedDate", "bad-date"));
    if (!published || !modified) throw SkipItem{"bad-date"};
    r.published = *published;
    r.last_modified = *modified;

    if (const json* desc = child(*cve, "description")) {
        if (const json* data = child(*desc, "description_data"); data && data->is_array()) {
            for (const auto& d : *data) {
                if (const json* v = child(d, "value"); v && v->is_string() && !v->get_ref<const std::string&>().empty()) {
                    r.descriptions.push_back(v->get<std::string>());
                }
            }
        }
    }
    if (r.descriptions.empty()) throw SkipItem{"no-description"};

    if (const json* refs = child(*cve, "references")) {
        if (const json* data = child(*refs, "reference_data"); data && data->is_array()) {
            for (const auto& ref : *data) {
                Reference out;
                out.url = string_at(ref, "url", "bad-structure");
                if (const json* tags = child(ref, "tags"); tags && tags->is_array()) {
                    for (const auto& t : *tags) {
                        if (t.is_string()) out.tags.push_back(t.get<std::string>());
                    }
                }
                r.references.push_back(std::move(out));
            }
        }
    }

    if (const json* pt = child(*cve, "problemtype")) {
        if (const json* data = child(*pt, "problemtype_data"); data && data->is_array()) {
            for (const auto& p : *data) {
                if (const json* descs = child(p, "description"); descs && descs->is_array()) {
                    for (const auto& d : *descs) {
                        if (const json* v = child(d, "value"); v && v->is_string()) r.cwe_ids.insert(v->get<std::string>());
                    }
                }
            }
        }
    }

    std::vector<CpeEntry> cpes;
    if (const json* conf = child(item, "configurations")) {
        if (const json* nodes = child(*conf, "nodes"); nodes && nodes->is_array()) {
            for (const auto& n : *nodes) collect_node_cpes(n, cpes);
        }
    }
    if (cpes.empty()) {
        for (const json* list : {child(item, "vulnerable_software_list"), child(*cve, "vulnerable_software_list")}) {
            if (list && list->is_array()) {
                for (const auto& s : *list) {
                    if (!s.is_string()) continue;
                    if (auto c = parse_cpe(s.get<std::string>())) cpes.push_back(std::move(*c));
                }
            }
        }
    }
    r.cpes = dedup_cpes(std::move(cpes));

    if (const json* impact = child(item, "impact")) {
        if (const json* m2 = child(*impact, "baseMetricV2")) {
            const json* c2 = child(*m2, "cvssV2");
            if (!c2) throw SkipItem{"bad-cvss"};
            try {
                CvssV2Assessment v2;
                v2.access_vector = access_vector_from_string(string_at(*c2, "accessVector", "bad-cvss"));
                v2.access_complexity = access_complexity_from_string(string_at(*c2, "accessComplexity", "bad-cvss"));
                v2.authentication = authentication_from_string(string_at(*c2, "authentication", "bad-cvss"));
                v2.conf_impact = impact_from_string(string_at(*c2, "confidentialityImpact", "bad-cvss"));
                v2.integ_impact = impact_from_string(string_at(*c2, "integrityImpact", "bad-cvss"));
                v2.avail_impact = impact_from_string(string_at(*c2, "availabilityImpact", "bad-cvss"));
                v2.base_score = score_at(*c2, "baseScore");
                v2.obtain_all_privilege = flag_at(*m2, "obtainAllPrivilege");
                v2.obtain_user_privilege = flag_at(*m2, "obtainUserPrivilege");
                v2.obtain_other_privilege = flag_at(*m2, "obtainOtherPrivilege");
                v2.user_interaction_required = flag_at(*m2, "userInteractionRequired");
                r.v2 = v2;
            } catch (const FormatError&) {
                throw SkipItem{"bad-cvss"};
            }
        }
        if (const json* m3 = child(*impact, "baseMetricV3")) {
            const json* c3 = child(*m3, "cvssV3");
            if (!c3) throw SkipItem{"bad-cvss"};
            r.v3 = CvssV3Assessment::make(score_at(*c3, "baseScore"), Provenance::FromFeed);
        }
    }

    if (const json* ext = child(item, "x_vulncure")) {
        if (!r.v3) {
            if (const json* p = child(*ext, "predicted_v3")) {
                r.v3 = CvssV3Assessment::make(score_at(*p, "baseScore"), Provenance::Predicted);
            }
        }
        if (const json* e = child(*ext, "edd")) {
            DisclosureEstimate est;
            auto d = Date::try_parse(string_at(*e, "date", "bad-date"));
            if (!d) throw SkipItem{"bad-date"};
            est.edd = *d;
            est.source = string_at(*e, "source", "bad-structure") == "reference_page"
                             ? DisclosureSource::ReferencePage
                             : DisclosureSource::NvdPublished;
            if (const json* u = child(*e, "url"); u && u->is_string()) est.source_url = u->get<std::string>();
            est.lag_days = days_between(est.edd, r.published);
            r.edd = est;
        }
    }

    try {
        r.validate();
    } catch (const FormatError&) {
        throw SkipItem{"invalid-record"};
    }
    return r;
}

}  // namespace

ParsedFeed parse_feed(std::string_view feed_bytes) {
    const std::string text = maybe_gunzip(feed_bytes);
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw FormatError(std::string("feed is not valid JSON: ") + e.what());
    }
    const json* items = child(doc, "CVE_Items");
    if (!items || !items->is_array()) throw FormatError("feed has no CVE_Items array");

    ParsedFeed out;
    for (const auto& item : *items) {
        ++out.stats.records_total;
        try {
            out.records.push_back(parse_item(item));
        } catch (const SkipItem& skip) {
            ++out.stats.records_skipped;
            ++out.stats.skip_reasons[skip.reason];
        } catch (const json::exception&) {
            ++out.stats.records_skipped;
            ++out.stats.skip_reasons["bad-structure"];
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Writing

namespace {

json format_item(const CveRecord& r) {
    json descs = json::array();
    for (const auto& d : r.descriptions) descs.push_back({{"lang", "en"}, {"value", d}});
    json refs = json::array();
    for (const auto& ref : r.references) {
        refs.push_back({{"url", ref.url}, {"name", ref.url}, {"refsource", "MISC"}, {"tags", ref.tags}});
    }
    json cwes = json::array();
    for (const auto& c : r.cwe_ids) cwes.push_back({{"lang", "en"}, {"value", c}});
    json matches = json::array();
    for (const auto& cpe : r.cpes) {
        std::string uri = "cpe:2.3:a:" + escape_cpe23(cpe.vendor) + ":" + escape_cpe23(cpe.product) + ":" +
                          (cpe.version ? escape_cpe23(*cpe.version) : std::string("*")) + ":*:*:*:*:*:*:*";
        matches.push_back({{"vulnerable", true}, {"cpe23Uri", uri}});
    }
    json nodes = json::array();
    if (!matches.empty()) nodes.push_back({{"operator", "OR"}, {"children", json::array()}, {"cpe_match", matches}});

    json impact = json::object();
    if (r.v2) {
        const auto& v = *r.v2;
        impact["baseMetricV2"] = {
            {"cvssV2",
             {{"version", "2.0"},
              {"accessVector", to_string(v.access_vector)},
              {"accessComplexity", to_string(v.access_complexity)},
              {"authentication", to_string(v.authentication)},
              {"confidentialityImpact", to_string(v.conf_impact)},
              {"integrityImpact", to_string(v.integ_impact)},
              {"availabilityImpact", to_string(v.avail_impact)},
              {"baseScore", v.base_score}}},
            {"severity", to_string(v.label())},
            {"obtainAllPrivilege", v.obtain_all_privilege},
            {"obtainUserPrivilege", v.obtain_user_privilege},
            {"obtainOtherPrivilege", v.obtain_other_privilege},
            {"userInteractionRequired", v.user_interaction_required}};
    }
    json ext = json::object();
    if (r.v3) {
        if (r.v3->provenance == Provenance::FromFeed) {
            impact["baseMetricV3"] = {
                {"cvssV3", {{"version", "3.0"}, {"baseScore", r.v3->base_score}, {"baseSeverity", to_string(r.v3->label)}}}};
        } else {
            ext["predicted_v3"] = {{"baseScore", r.v3->base_score}, {"baseSeverity", to_string(r.v3->label)}};
        }
    }
    if (r.edd) {
        json e = {{"date", r.edd->edd.iso()},
                  {"source", r.edd->source == DisclosureSource::ReferencePage ? "reference_page" : "nvd_published"},
                  {"lag_days", r.edd->lag_days}};
        if (r.edd->source_url) e["url"] = *r.edd->source_url;
        ext["edd"] = e;
    }

    json item = {{"cve",
                  {{"data_type", "CVE"},
                   {"data_format", "MITRE"},
                   {"data_version", "4.0"},
                   {"CVE_data_meta", {{"ID", r.id.str()}, {"ASSIGNER", "cve@mitre.org"}}},
                   {"problemtype", {{"problemtype_data", json::array({{{"description", cwes}}})}}},
                   {"references", {{"reference_data", refs}}},
                   {"description", {{"description_data", descs}}}}},
                 {"configurations", {{"CVE_data_version", "4.0"}, {"nodes", nodes}}},
                 {"impact", impact},
                 {"publishedDate", r.published.iso() + "T00:00Z"},
                 {"lastModifiedDate", r.last_modified.iso() + "T00:00Z"}};
    if (!ext.empty()) item["x_vulncure"] = ext;
    return item;
}

}  // namespace

std::string format_feed(const std::vector<CveRecord>& records) {
    json items = json::array();
    for (const auto& r : records) items.push_back(format_item(r));
    json doc = {{"CVE_data_type", "CVE"},
                {"CVE_data_format", "MITRE"},
                {"CVE_data_version", "4.0"},
                {"CVE_data_numberOfCVEs", std::to_string(records.size())},
                {"CVE_Items", items}};
    return doc.dump(1) + "\n";
}

std::string format_feed(const Corpus& corpus) {
    std::vector<CveRecord> records;
    records.reserve(corpus.size());
    for (const auto& [id, r] : corpus.records()) records.push_back(r);
    return format_feed(records);
}

// ---------------------------------------------------------------------------
// Snapshot loading

namespace {

bool is_feed_file(const fs::path& p) {
    const auto name = p.filename().string();
    if (name.rfind("nvdcve-", 0) != 0) return false;
    return name.ends_with(".json") || name.ends_with(".json.gz");
}

// Total order on duplicate candidates: newer last_modified wins, then a
// content comparison so the outcome never depends on file order.
bool supersedes(const CveRecord& candidate, const CveRecord& incumbent) {
    if (candidate.last_modified != incumbent.last_modified) return candidate.last_modified > incumbent.last_modified;
    return format_feed(std::vector<CveRecord>{candidate}) > format_feed(std::vector<CveRecord>{incumbent});
}

}  // namespace

SnapshotLoad merge_feeds(std::vector<ParsedFeed> feeds) {
    SnapshotLoad out;
    Corpus::RecordMap merged;
    for (auto& feed : feeds) {
        out.stats.merge(feed.stats);
        for (auto& r : feed.records) {
            auto it = merged.find(r.id);
            if (it == merged.end()) {
                auto id = r.id;
                merged.emplace(std::move(id), std::move(r));
                continue;
            }
            ++out.duplicates;
            if (supersedes(r, it->second)) it->second = std::move(r);
        }
    }
    out.corpus = Corpus(std::move(merged));
    return out;
}

SnapshotLoad load_snapshot_with_stats(const fs::path& directory) {
    std::error_code ec;
    if (!fs::is_directory(directory, ec)) throw IoError("feeds directory not found: " + directory.string());
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(directory)) {
        if (entry.is_regular_file() && is_feed_file(entry.path())) files.push_back(entry.path());
    }
    if (files.empty()) throw IoError("no feeds found in " + directory.string());
    std::sort(files.begin(), files.end());

    std::vector<std::future<ParsedFeed>> jobs;
    jobs.reserve(files.size());
    for (const auto& f : files) {
        jobs.push_back(std::async(std::launch::async, [f] {
            try {
                return parse_feed(read_file(f));
            } catch (const FormatError& e) {
                throw FormatError(f.filename().string() + ": " + e.what());
            }
        }));
    }
    std::vector<ParsedFeed> feeds;
    feeds.reserve(jobs.size());
    for (auto& j : jobs) feeds.push_back(j.get());

    auto out = merge_feeds(std::move(feeds));
    out.files = std::move(files);
    return out;
}

Corpus load_snapshot(const fs::path& directory) { return load_snapshot_with_stats(directory).corpus; }

std::vector<std::string> parse_vendor_list(std::string_view text) {
    std::vector<std::string> out;
    std::unordered_set<std::string> seen;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        auto line = text.substr(pos, nl - pos);
        while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.remove_suffix(1);
        while (!line.empty() && std::isspace(static_cast<unsigned char>(line.front()))) line.remove_prefix(1);
        if (!line.empty()) {
            auto name = to_lower(line);
            if (seen.insert(name).second) out.push_back(std::move(name));
        }
        pos = nl + 1;
    }
    return out;
}

std::vector<std::string> load_external_vendor_list(const fs::path& file) {
    return parse_vendor_list(read_file(file));
}

}  // namespace vulncure::ingest
