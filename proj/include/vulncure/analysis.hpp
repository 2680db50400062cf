#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "vulncure/core.hpp"
#include "vulncure/cwe.hpp"

namespace vulncure::analysis {

inline constexpr const char* kToolVersion = "vulncure 0.1.0";

enum class CorpusTag { Raw, Corrected };
std::string_view to_string(CorpusTag tag);
CorpusTag corpus_tag_from_string(std::string_view text);

/// A rectangular table with a documented row order. Values are preformatted
/// strings so CSV and JSON renderings agree byte for byte across runs.
struct Report {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
    CorpusTag corpus_tag = CorpusTag::Raw;
    std::map<std::string, std::string> parameters;

    std::string to_csv() const;
    /// Envelope carrying corpus tag, tool version and parameters.
    std::string to_json() const;
};

enum class DateField { Published, EDD };
std::string_view to_string(DateField f);
DateField date_field_from_string(std::string_view text);

enum class Scheme { V2, V3Feed, PV3 };
std::string_view to_string(Scheme s);
Scheme scheme_from_string(std::string_view text);

enum class VendorMetric { CveCount, ProductCount };

std::string_view weekday_name(unsigned iso_index);

/// Columns date, day_of_week, count, percent_of_year; count descending, then
/// date ascending. The year percentage uses the same date field for the
/// numerator and the denominator. EDD requires disclosure estimates.
Report top_dates(const Corpus& corpus, DateField field, std::size_t n = 10, CorpusTag tag = CorpusTag::Raw);

/// Seven rows, Monday first.
Report day_of_week_histogram(const Corpus& corpus, DateField field, CorpusTag tag = CorpusTag::Raw);

/// Label counts and percentages over records labelled under the scheme; with
/// by_year one block per publication year. V3Feed counts feed scores only;
/// PV3 counts feed scores plus predictions and refuses to run while records
/// that could be backfilled still lack a v3 score.
Report severity_distribution(const Corpus& corpus, Scheme scheme, bool by_year = false,
                             CorpusTag tag = CorpusTag::Raw);

/// Concrete CWE counts among records at one severity level; a record with
/// several CWEs counts once for each. Count descending, then CWE number.
Report top_cwe_by_severity(const Corpus& corpus, Scheme scheme, SeverityLabel level, std::size_t n = 10,
                           const cwe::CweCatalog* catalog = nullptr, CorpusTag tag = CorpusTag::Raw);

/// CVE count (a CVE naming k vendors counts for each) or distinct product
/// count per vendor, with the percentage of all records or all products.
Report top_vendors(const Corpus& corpus, VendorMetric metric, std::size_t n = 10, CorpusTag tag = CorpusTag::Raw);

/// Per severity label (read from the corrected corpus), the CVEs whose vendor
/// set or product set changed between the two corpora. Throws LookupError
/// when the corpora hold different ids.
Report mislabeled_severity_breakdown(const Corpus& raw, const Corpus& corrected, Scheme scheme);

/// Label of a record under a scheme, if it has one.
std::optional<SeverityLabel> label_under(const CveRecord& r, Scheme scheme);

}  // namespace vulncure::analysis
