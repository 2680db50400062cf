#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vulncure/core.hpp"

namespace vulncure::cwe {

/// "CWE-N" -> name, from a two-column TSV (id, name).
class CweCatalog {
public:
    CweCatalog() = default;

    /// Throws FormatError on a row whose id is not CWE-<digits>.
    static CweCatalog parse(std::string_view tsv);
    static CweCatalog load(const std::filesystem::path& file);

    void add(const std::string& id, std::string name);
    bool contains(const std::string& id) const { return entries_.contains(id); }
    std::optional<std::string> name(const std::string& id) const;
    std::size_t size() const { return entries_.size(); }
    const std::map<std::string, std::string>& entries() const { return entries_; }

private:
    std::map<std::string, std::string> entries_;
};

bool is_cwe_id(std::string_view text);

/// Every maximal CWE-<digits> run, prefix matched case-insensitively and
/// normalized to upper case, de-duplicated in first-occurrence order.
std::vector<std::string> extract_cwe_ids(std::string_view text);

/// Lowercase, expand contractions and drop possessives, strip special
/// characters, remove English stop words, then reduce regular past-tense
/// verbs to their base form ("accessed" -> "access", "used" -> "use").
std::string preprocess_description(std::string_view text);

const std::vector<std::string>& stop_words();

struct MergeResult {
    CveRecord record;
    bool changed = false;
    /// Ids found in descriptions but missing from the catalog; never merged.
    std::vector<std::string> quarantined;
};

/// Feed CWE set united with catalog-known ids from every description;
/// placeholders are dropped once a concrete id is present.
MergeResult merge_cwe(const CveRecord& record, const CweCatalog& catalog);

struct QuarantineEntry {
    CveId id;
    std::string cwe;
};

struct CorpusMerge {
    Corpus corpus;
    std::size_t changed = 0;
    std::vector<QuarantineEntry> quarantined;
};

CorpusMerge merge_corpus(const Corpus& corpus, const CweCatalog& catalog);

/// Placeholder-only records before the merge and how many of them gained a
/// concrete id. A record listing both placeholders counts as "other".
struct GapReport {
    std::size_t other = 0;
    std::size_t noinfo = 0;
    std::size_t unassigned = 0;
    std::size_t fixed_other = 0;
    std::size_t fixed_noinfo_or_unassigned = 0;
    /// Records that already had a concrete id and gained another one.
    std::size_t augmented = 0;

    std::string to_csv() const;
    friend bool operator==(const GapReport&, const GapReport&) = default;
};

/// Compares a corpus before and after merge_corpus. Throws LookupError if the
/// two do not hold the same ids.
GapReport cwe_gap_report(const Corpus& before, const Corpus& after);

}  // namespace vulncure::cwe
