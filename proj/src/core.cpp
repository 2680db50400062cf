#include "vulncure/core.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace vulncure {

namespace {

bool parse_uint(std::string_view text, std::int64_t& out) {
    if (text.empty()) return false;
    for (char c : text) {
        if (c < '0' || c > '9') return false;
    }
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc() && ptr == text.data() + text.size();
}

}  // namespace

std::string to_lower(std::string_view text) {
    std::string out(text);
    for (char& c : out) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Date

Date::Date(int year, unsigned month, unsigned day) {
    const std::chrono::year_month_day ymd{std::chrono::year{year}, std::chrono::month{month},
                                          std::chrono::day{day}};
    if (!ymd.ok()) {
        throw FormatError("invalid calendar date " + std::to_string(year) + "-" +
                          std::to_string(month) + "-" + std::to_string(day));
    }
    days_ = std::chrono::sys_days{ymd};
}

std::optional<Date> Date::try_parse(std::string_view text) {
    if (text.size() < 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
    if (text.size() > 10 && text[10] != 'T' && text[10] != ' ') return std::nullopt;
    std::int64_t y = 0, m = 0, d = 0;
    if (!parse_uint(text.substr(0, 4), y) || !parse_uint(text.substr(5, 2), m) ||
        !parse_uint(text.substr(8, 2), d)) {
        return std::nullopt;
    }
    const std::chrono::year_month_day ymd{std::chrono::year{static_cast<int>(y)},
                                          std::chrono::month{static_cast<unsigned>(m)},
                                          std::chrono::day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) return std::nullopt;
    return Date{std::chrono::sys_days{ymd}};
}

Date Date::parse(std::string_view text) {
    if (auto d = try_parse(text)) return *d;
    throw FormatError("unparseable date '" + std::string(text) + "'");
}

std::string Date::iso() const {
    const std::chrono::year_month_day ymd{days_};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

int Date::year() const { return static_cast<int>(std::chrono::year_month_day{days_}.year()); }
unsigned Date::month() const {
    return static_cast<unsigned>(std::chrono::year_month_day{days_}.month());
}
unsigned Date::day() const { return static_cast<unsigned>(std::chrono::year_month_day{days_}.day()); }

unsigned Date::iso_weekday_index() const {
    return std::chrono::weekday{days_}.iso_encoding() - 1;
}

// ---------------------------------------------------------------------------
// CveId

CveId::CveId(int year, std::int64_t sequence) : year_(year), sequence_(sequence) {
    if (sequence < 1) throw FormatError("CVE sequence must be >= 1");
    if (year < 0 || year > 9999) throw FormatError("CVE year out of range");
    char buf[40];
    std::snprintf(buf, sizeof buf, "CVE-%04d-%04lld", year, static_cast<long long>(sequence));
    raw_ = buf;
}

std::optional<CveId> CveId::try_parse(std::string_view text) {
    if (text.size() < 13) return std::nullopt;
    if (to_lower(text.substr(0, 4)) != "cve-" || text[8] != '-') return std::nullopt;
    std::int64_t year = 0, seq = 0;
    const auto seq_text = text.substr(9);
    if (!parse_uint(text.substr(4, 4), year) || seq_text.size() < 4 || !parse_uint(seq_text, seq) ||
        seq < 1) {
        return std::nullopt;
    }
    CveId id(static_cast<int>(year), seq);
    // Keep the original digit run (sequence numbers are zero-padded to >= 4 digits).
    id.raw_ = "CVE-" + std::string(text.substr(4, 4)) + "-" + std::string(seq_text);
    return id;
}

CveId CveId::parse(std::string_view text) {
    if (auto id = try_parse(text)) return *id;
    throw FormatError("malformed CVE id '" + std::string(text) + "'");
}

// ---------------------------------------------------------------------------
// Severity

std::string_view to_string(SeverityLabel label) {
    switch (label) {
        case SeverityLabel::None: return "NONE";
        case SeverityLabel::Low: return "LOW";
        case SeverityLabel::Medium: return "MEDIUM";
        case SeverityLabel::High: return "HIGH";
        case SeverityLabel::Critical: return "CRITICAL";
    }
    return "NONE";
}

std::string_view abbreviation(SeverityLabel label) {
    switch (label) {
        case SeverityLabel::None: return "-";
        case SeverityLabel::Low: return "L";
        case SeverityLabel::Medium: return "M";
        case SeverityLabel::High: return "H";
        case SeverityLabel::Critical: return "C";
    }
    return "-";
}

SeverityLabel severity_label_from_string(std::string_view text) {
    const auto t = to_lower(text);
    if (t == "none") return SeverityLabel::None;
    if (t == "low" || t == "l") return SeverityLabel::Low;
    if (t == "medium" || t == "m") return SeverityLabel::Medium;
    if (t == "high" || t == "h") return SeverityLabel::High;
    if (t == "critical" || t == "c") return SeverityLabel::Critical;
    throw FormatError("unknown severity label '" + std::string(text) + "'");
}

SeverityLabel score_to_label(double score, CvssVersion version) {
    if (!std::isfinite(score) || score < 0.0 || score > 10.0) {
        throw RangeError("CVSS score " + std::to_string(score) + " outside [0, 10]");
    }
    if (version == CvssVersion::V3 && score == 0.0) return SeverityLabel::None;
    if (score < 4.0) return SeverityLabel::Low;
    if (score < 7.0) return SeverityLabel::Medium;
    if (version == CvssVersion::V2) return SeverityLabel::High;
    if (score < 9.0) return SeverityLabel::High;
    return SeverityLabel::Critical;
}

CvssV3Assessment CvssV3Assessment::make(double score, Provenance provenance) {
    return {score, score_to_label(score, CvssVersion::V3), provenance};
}

// ---------------------------------------------------------------------------
// CVSS v2 enumerations (NVD feed spellings)

std::string_view to_string(AccessVector v) {
    switch (v) {
        case AccessVector::Local: return "LOCAL";
        case AccessVector::AdjacentNetwork: return "ADJACENT_NETWORK";
        case AccessVector::Network: return "NETWORK";
    }
    return "LOCAL";
}

std::string_view to_string(AccessComplexity v) {
    switch (v) {
        case AccessComplexity::High: return "HIGH";
        case AccessComplexity::Medium: return "MEDIUM";
        case AccessComplexity::Low: return "LOW";
    }
    return "HIGH";
}

std::string_view to_string(Authentication v) {
    switch (v) {
        case Authentication::Multiple: return "MULTIPLE";
        case Authentication::Single: return "SINGLE";
        case Authentication::None: return "NONE";
    }
    return "MULTIPLE";
}

std::string_view to_string(Impact v) {
    switch (v) {
        case Impact::None: return "NONE";
        case Impact::Partial: return "PARTIAL";
        case Impact::Complete: return "COMPLETE";
    }
    return "NONE";
}

AccessVector access_vector_from_string(std::string_view text) {
    const auto t = to_lower(text);
    if (t == "local" || t == "l") return AccessVector::Local;
    if (t == "adjacent_network" || t == "a") return AccessVector::AdjacentNetwork;
    if (t == "network" || t == "n") return AccessVector::Network;
    throw FormatError("unknown accessVector '" + std::string(text) + "'");
}

AccessComplexity access_complexity_from_string(std::string_view text) {
    const auto t = to_lower(text);
    if (t == "high" || t == "h") return AccessComplexity::High;
    if (t == "medium" || t == "m") return AccessComplexity::Medium;
    if (t == "low" || t == "l") return AccessComplexity::Low;
    throw FormatError("unknown accessComplexity '" + std::string(text) + "'");
}

Authentication authentication_from_string(std::string_view text) {
    const auto t = to_lower(text);
    if (t == "multiple" || t == "m") return Authentication::Multiple;
    if (t == "single" || t == "s") return Authentication::Single;
    if (t == "none" || t == "n") return Authentication::None;
    throw FormatError("unknown authentication '" + std::string(text) + "'");
}

Impact impact_from_string(std::string_view text) {
    const auto t = to_lower(text);
    if (t == "none" || t == "n") return Impact::None;
    if (t == "partial" || t == "p") return Impact::Partial;
    if (t == "complete" || t == "c") return Impact::Complete;
    throw FormatError("unknown impact '" + std::string(text) + "'");
}

// ---------------------------------------------------------------------------
// CveRecord

void CveRecord::validate() const {
    if (descriptions.empty()) throw FormatError(id.str() + ": no description");
    if (last_modified < published) throw FormatError(id.str() + ": last_modified before published");
    for (const auto& cpe : cpes) {
        if (cpe.vendor.empty() || cpe.product.empty()) {
            throw FormatError(id.str() + ": CPE entry with empty vendor or product");
        }
    }
    if (v2 && (v2->base_score < 0.0 || v2->base_score > 10.0)) {
        throw FormatError(id.str() + ": v2 base score out of range");
    }
    if (v3) {
        if (v3->base_score < 0.0 || v3->base_score > 10.0) {
            throw FormatError(id.str() + ": v3 base score out of range");
        }
        if (v3->label != score_to_label(v3->base_score, CvssVersion::V3)) {
            throw FormatError(id.str() + ": v3 label disagrees with score");
        }
    }
    if (edd && (published < edd->edd || edd->lag_days != days_between(edd->edd, published))) {
        throw FormatError(id.str() + ": inconsistent disclosure estimate");
    }
}

// ---------------------------------------------------------------------------
// Corpus

Corpus::Corpus(RecordMap records) : records_(std::move(records)) { index(); }

Corpus::Corpus(std::vector<CveRecord> records) {
    for (auto& r : records) {
        auto id = r.id;
        records_.insert_or_assign(std::move(id), std::move(r));
    }
    index();
}

void Corpus::index() {
    vendor_index_.clear();
    product_index_.clear();
    vendor_cve_counts_.clear();
    for (const auto& [id, record] : records_) {
        std::set<std::string> vendors;
        for (const auto& cpe : record.cpes) {
            vendor_index_[cpe.vendor].insert(cpe.product);
            product_index_[{cpe.vendor, cpe.product}].insert(id);
            vendors.insert(cpe.vendor);
        }
        for (const auto& v : vendors) ++vendor_cve_counts_[v];
    }
}

const CveRecord* Corpus::find(const CveId& id) const {
    auto it = records_.find(id);
    return it == records_.end() ? nullptr : &it->second;
}

const std::set<std::string>& Corpus::products_of(const std::string& vendor) const {
    static const std::set<std::string> empty;
    auto it = vendor_index_.find(vendor);
    return it == vendor_index_.end() ? empty : it->second;
}

std::size_t Corpus::vendor_cve_count(const std::string& vendor) const {
    auto it = vendor_cve_counts_.find(vendor);
    return it == vendor_cve_counts_.end() ? 0 : it->second;
}

std::size_t Corpus::product_cve_count(const std::string& vendor, const std::string& product) const {
    auto it = product_index_.find({vendor, product});
    return it == product_index_.end() ? 0 : it->second.size();
}

Corpus rebuild_indices(const Corpus& corpus) {
    Corpus out;
    out.records_ = corpus.records_;
    out.index();
    return out;
}

}  // namespace vulncure
