#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vulncure/core.hpp"

namespace vulncure::dates {

/// Registrable host of an absolute URL: lowercased, port and "www." style
/// subdomains removed ("http://www.securityfocus.com:80/bid/1" gives
/// "securityfocus.com"). Throws FormatError for strings that are not URLs.
std::string extract_domain(std::string_view url);

struct DomainCoverage {
    /// Sorted by url_count descending, then domain ascending.
    std::vector<std::pair<std::string, std::size_t>> ranked;
    std::size_t total_urls = 0;  ///< parseable URLs only
    std::size_t unparseable_urls = 0;

    /// Fraction of parseable URLs that fall in the k highest-ranked domains.
    double coverage_at(std::size_t k) const;
};

DomainCoverage rank_domains(const Corpus& corpus);

/// When a page carries several candidate dates: take the first one found in
/// extractor order, or the earliest of all of them.
enum class DateMatchPolicy { FirstMatch, EarliestMatch };

using PageDateExtractor = std::function<std::optional<Date>(std::string_view html)>;

/// Generic extractor, tried in order: HTML meta date tags, ISO-8601 dates,
/// "Month DD, YYYY", "DD Mon YYYY".
std::optional<Date> generic_page_date(std::string_view html, DateMatchPolicy policy = DateMatchPolicy::FirstMatch);

/// Per-domain extractors with the generic extractor as fallback. A domain
/// extractor that finds nothing defers to the generic one. Read-only once
/// populated; safe to share between threads.
class ExtractorRegistry {
public:
    explicit ExtractorRegistry(DateMatchPolicy policy = DateMatchPolicy::FirstMatch) : policy_(policy) {}

    /// Registry with the bundled extractors (securityfocus.com,
    /// securitytracker.com and bugzilla-style trackers).
    static ExtractorRegistry with_defaults(DateMatchPolicy policy = DateMatchPolicy::FirstMatch);

    void add(std::string domain, PageDateExtractor extractor);
    bool has(const std::string& domain) const { return extractors_.contains(domain); }
    DateMatchPolicy policy() const { return policy_; }

    std::optional<Date> extract(const std::string& domain, std::string_view html) const;

private:
    DateMatchPolicy policy_;
    std::map<std::string, PageDateExtractor> extractors_;
};

std::optional<Date> extract_page_date(const std::string& domain, std::string_view html,
                                      const ExtractorRegistry& registry);

/// Hex SHA-256 of a string.
std::string sha256_hex(std::string_view data);

/// Stored reference pages: <root>/<domain>/<sha256(url)>.html with the URL in
/// a sidecar <sha256(url)>.url file.
class PageStore {
public:
    using FetchHook = std::function<std::optional<std::string>(const std::string& url)>;

    explicit PageStore(std::filesystem::path root, FetchHook fetch = {});

    std::filesystem::path page_path(const std::string& url) const;
    /// Stored body for a URL. If missing and a fetch hook is set, the hook's
    /// result is written to the store first.
    std::optional<std::string> load(const std::string& url) const;
    void store(const std::string& url, std::string_view html) const;

private:
    std::filesystem::path root_;
    FetchHook fetch_;
};

/// EDD = min(page dates, published). Page dates after the publication date
/// are dropped; on ties the reference page is reported as the source.
DisclosureEstimate estimate_disclosure(const CveRecord& record,
                                       const std::vector<std::pair<std::string, Date>>& page_dates);

/// Extracted dates for every reference of a record that has a stored page.
std::vector<std::pair<std::string, Date>> collect_page_dates(const CveRecord& record, const PageStore& store,
                                                             const ExtractorRegistry& registry);

struct EstimationStats {
    std::size_t records = 0;
    std::size_t pages_found = 0;
    std::size_t pages_dated = 0;
    std::size_t pages_after_published = 0;
    std::size_t improved = 0;  ///< records whose EDD precedes publication
};

struct EstimationResult {
    Corpus corpus;
    EstimationStats stats;
};

EstimationResult estimate_corpus(const Corpus& corpus, const PageStore& store, const ExtractorRegistry& registry);

struct LagRow {
    std::int64_t lag_days = 0;
    std::size_t count = 0;
    double cumulative_fraction = 0.0;
};

/// One row per distinct lag value, ascending. Throws PreconditionError naming
/// the first record without a disclosure estimate.
std::vector<LagRow> lag_cdf(const Corpus& corpus);

/// Fraction of records with lag <= days, read off a lag_cdf table.
double cdf_at(const std::vector<LagRow>& table, std::int64_t days);

/// CSV with header lag_days,count,cumulative_fraction.
std::string lag_cdf_csv(const std::vector<LagRow>& table);

/// Mean lag per v3 label (feed or predicted). Records without an estimate or
/// a v3 label are ignored; empty classes are omitted.
std::map<SeverityLabel, double> lag_by_severity(const Corpus& corpus);

}  // namespace vulncure::dates
