#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace vulncure {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input could not be parsed at all (a whole document, not a single item).
class FormatError : public Error {
public:
    using Error::Error;
};

class RangeError : public Error {
public:
    using Error::Error;
};

class LookupError : public Error {
public:
    using Error::Error;
};

/// An operation was called before the step it depends on.
class PreconditionError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Calendar date
// ---------------------------------------------------------------------------

/// Calendar date without time of day. NVD timestamps are truncated on parse.
class Date {
public:
    constexpr Date() = default;
    constexpr explicit Date(std::chrono::sys_days days) : days_(days) {}
    Date(int year, unsigned month, unsigned day);

    /// Accepts "YYYY-MM-DD" optionally followed by a time component
    /// ("2011-03-14T19:00Z"). Throws FormatError on anything else.
    static Date parse(std::string_view text);
    static std::optional<Date> try_parse(std::string_view text);

    std::string iso() const;
    int year() const;
    unsigned month() const;
    unsigned day() const;
    /// 0 = Monday ... 6 = Sunday.
    unsigned iso_weekday_index() const;
    std::chrono::sys_days sys_days() const { return days_; }

    friend std::int64_t days_between(Date from, Date to) {
        return (to.days_ - from.days_).count();
    }

    friend constexpr auto operator<=>(const Date&, const Date&) = default;

private:
    std::chrono::sys_days days_{};
};

// ---------------------------------------------------------------------------
// Identifiers and enumerations
// ---------------------------------------------------------------------------

class CveId {
public:
    CveId() = default;
    CveId(int year, std::int64_t sequence);

    /// Parses "CVE-YYYY-NNNN+" (case-insensitive prefix). Throws FormatError.
    static CveId parse(std::string_view text);
    static std::optional<CveId> try_parse(std::string_view text);

    int year() const { return year_; }
    std::int64_t sequence() const { return sequence_; }
    const std::string& str() const { return raw_; }
    /// Identifiers from before the CVE program's 1999 start.
    bool legacy() const { return year_ < 1999; }

    friend bool operator==(const CveId& a, const CveId& b) {
        return a.year_ == b.year_ && a.sequence_ == b.sequence_;
    }
    friend std::strong_ordering operator<=>(const CveId& a, const CveId& b) {
        if (auto c = a.year_ <=> b.year_; c != 0) return c;
        return a.sequence_ <=> b.sequence_;
    }

private:
    int year_ = 0;
    std::int64_t sequence_ = 0;
    std::string raw_;
};

enum class CvssVersion { V2, V3 };

/// Ordered None < Low < Medium < High < Critical.
enum class SeverityLabel { None = 0, Low = 1, Medium = 2, High = 3, Critical = 4 };

std::string_view to_string(SeverityLabel label);
SeverityLabel severity_label_from_string(std::string_view text);
/// Single-letter abbreviation as used in transition tables ("-", "L", "M", "H", "C").
std::string_view abbreviation(SeverityLabel label);

/// Maps a CVSS base score onto its qualitative severity level.
///
/// v2: Low 0.0-3.9, Medium 4.0-6.9, High 7.0-10.0.
/// v3: None 0.0, Low 0.1-3.9, Medium 4.0-6.9, High 7.0-8.9, Critical 9.0-10.0.
///
/// Throws RangeError when the score is outside [0, 10] or not finite.
SeverityLabel score_to_label(double score, CvssVersion version);

enum class AccessVector { Local, AdjacentNetwork, Network };
enum class AccessComplexity { High, Medium, Low };
enum class Authentication { Multiple, Single, None };
enum class Impact { None, Partial, Complete };

std::string_view to_string(AccessVector v);
std::string_view to_string(AccessComplexity v);
std::string_view to_string(Authentication v);
std::string_view to_string(Impact v);
AccessVector access_vector_from_string(std::string_view text);
AccessComplexity access_complexity_from_string(std::string_view text);
Authentication authentication_from_string(std::string_view text);
Impact impact_from_string(std::string_view text);

struct CvssV2Assessment {
    AccessVector access_vector = AccessVector::Local;
    AccessComplexity access_complexity = AccessComplexity::High;
    Authentication authentication = Authentication::Multiple;
    Impact conf_impact = Impact::None;
    Impact integ_impact = Impact::None;
    Impact avail_impact = Impact::None;
    double base_score = 0.0;
    bool obtain_all_privilege = false;
    bool obtain_user_privilege = false;
    bool obtain_other_privilege = false;
    bool user_interaction_required = false;

    SeverityLabel label() const { return score_to_label(base_score, CvssVersion::V2); }

    friend bool operator==(const CvssV2Assessment&, const CvssV2Assessment&) = default;
};

enum class Provenance { FromFeed, Predicted };

struct CvssV3Assessment {
    double base_score = 0.0;
    SeverityLabel label = SeverityLabel::None;
    Provenance provenance = Provenance::FromFeed;

    /// Builds an assessment whose label is derived from the score.
    static CvssV3Assessment make(double score, Provenance provenance);

    friend bool operator==(const CvssV3Assessment&, const CvssV3Assessment&) = default;
};

struct CpeEntry {
    std::string vendor;
    std::string product;
    std::optional<std::string> version;

    friend bool operator==(const CpeEntry&, const CpeEntry&) = default;
    friend auto operator<=>(const CpeEntry&, const CpeEntry&) = default;
};

struct Reference {
    std::string url;
    std::vector<std::string> tags;

    friend bool operator==(const Reference&, const Reference&) = default;
};

enum class DisclosureSource { NvdPublished, ReferencePage };

struct DisclosureEstimate {
    Date edd;
    DisclosureSource source = DisclosureSource::NvdPublished;
    std::optional<std::string> source_url;
    std::int64_t lag_days = 0;

    friend bool operator==(const DisclosureEstimate&, const DisclosureEstimate&) = default;
};

inline const std::set<std::string>& placeholder_cwes() {
    static const std::set<std::string> values{"NVD-CWE-Other", "NVD-CWE-noinfo", ""};
    return values;
}

inline bool is_placeholder_cwe(std::string_view cwe) {
    return cwe.empty() || cwe == "NVD-CWE-Other" || cwe == "NVD-CWE-noinfo";
}

struct CveRecord {
    CveId id;
    Date published;
    Date last_modified;
    std::vector<std::string> descriptions;
    std::vector<Reference> references;
    std::set<std::string> cwe_ids;
    std::optional<CvssV2Assessment> v2;
    std::optional<CvssV3Assessment> v3;
    std::vector<CpeEntry> cpes;
    std::optional<DisclosureEstimate> edd;

    /// Throws FormatError if the record violates its invariants.
    void validate() const;

    friend bool operator==(const CveRecord&, const CveRecord&) = default;
};

/// Lowercases ASCII letters; other bytes pass through unchanged.
std::string to_lower(std::string_view text);

// ---------------------------------------------------------------------------
// Corpus
// ---------------------------------------------------------------------------

/// Immutable indexed collection of records. Indices are always derived from
/// the records at construction time.
class Corpus {
public:
    using RecordMap = std::map<CveId, CveRecord>;
    using VendorIndex = std::map<std::string, std::set<std::string>>;
    using ProductIndex = std::map<std::pair<std::string, std::string>, std::set<CveId>>;

    Corpus() = default;
    explicit Corpus(RecordMap records);
    explicit Corpus(std::vector<CveRecord> records);

    const RecordMap& records() const { return records_; }
    const VendorIndex& vendor_index() const { return vendor_index_; }
    const ProductIndex& product_index() const { return product_index_; }

    std::size_t size() const { return records_.size(); }
    bool empty() const { return records_.empty(); }
    const CveRecord* find(const CveId& id) const;

    /// Products listed under a vendor; empty set for unknown vendors.
    const std::set<std::string>& products_of(const std::string& vendor) const;
    /// Number of distinct CVEs naming the vendor in any CPE entry.
    std::size_t vendor_cve_count(const std::string& vendor) const;
    std::size_t product_cve_count(const std::string& vendor, const std::string& product) const;

    friend bool operator==(const Corpus& a, const Corpus& b) {
        return a.records_ == b.records_ && a.vendor_index_ == b.vendor_index_ &&
               a.product_index_ == b.product_index_;
    }

private:
    friend Corpus rebuild_indices(const Corpus& corpus);
    void index();

    RecordMap records_;
    VendorIndex vendor_index_;
    ProductIndex product_index_;
    std::map<std::string, std::size_t> vendor_cve_counts_;
};

/// Returns a corpus whose indices are recomputed from its records.
Corpus rebuild_indices(const Corpus& corpus);

}  // namespace vulncure
