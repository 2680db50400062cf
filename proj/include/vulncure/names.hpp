#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "vulncure/core.hpp"

namespace vulncure::names {

// ---------------------------------------------------------------------------
// String measures

/// Lowercase tokens split on whitespace and any non-alphanumeric byte.
std::vector<std::string> normalize_tokens(std::string_view name);

/// Length of the longest contiguous substring shared by a and b.
std::size_t longest_common_substring(std::string_view a, std::string_view b);

/// Insert/delete/substitute edit distance, unit costs.
std::size_t levenshtein(std::string_view a, std::string_view b);

/// First characters of each token ("lan_management_system" -> "lms"); empty
/// for names with fewer than two tokens.
std::string abbreviation(std::string_view name);

// ---------------------------------------------------------------------------
// Pair classification

enum class NameKind { Vendor, Product };

std::string_view to_string(NameKind kind);
NameKind name_kind_from_string(std::string_view text);

struct PairClassification {
    NameKind kind = NameKind::Vendor;
    /// Owning vendor for product pairs; empty for vendor pairs.
    std::string vendor;
    std::string a;
    std::string b;
    bool tokens_equal = false;
    std::size_t lcs_length = 0;
    bool is_prefix = false;
    bool product_as_vendor = false;
    std::size_t matching_products = 0;
    bool abbreviation_match = false;
    std::size_t edit_distance = 0;

    /// Compact flag summary used in review worksheets, e.g.
    /// "tokens;lcs=3;pref;mp=0;ed=8".
    std::string flags() const;

    friend bool operator==(const PairClassification&, const PairClassification&) = default;
};

/// Computes every flag for a pair of distinct names. For vendor pairs the
/// corpus supplies product sets (#MP and product-as-vendor); for product pairs
/// `vendor` names the owning vendor and those two flags stay unset.
PairClassification classify_pair(NameKind kind, std::string_view a, std::string_view b, const Corpus& corpus,
                                 std::string_view vendor = {});

/// Vendor pairs reach the review worksheet only if they are token-equal, share
/// a substring of length >= 3, are a prefix pair, are an abbreviation pair,
/// share a product, or one is a product of the other.
bool passes_vendor_gate(const PairClassification& p);

/// Product pairs: token-equal, abbreviation, edit distance <= 1, or edit
/// distance 2 with a shared substring of length >= 5.
bool passes_product_gate(const PairClassification& p);

/// All vendor pairs passing the vendor gate, sorted by (a, b) with a < b.
std::vector<PairClassification> candidate_vendor_pairs(const Corpus& corpus);

/// Product pairs under one vendor passing the product gate. Throws
/// LookupError for a vendor absent from the corpus.
std::vector<PairClassification> candidate_product_pairs(const Corpus& corpus, const std::string& vendor);

/// candidate_product_pairs over every vendor, in vendor order.
std::vector<PairClassification> candidate_product_pairs_all(const Corpus& corpus);

// ---------------------------------------------------------------------------
// Review decisions

/// Identifies a pair independent of the order its names were listed in.
struct PairKey {
    NameKind kind = NameKind::Vendor;
    std::string vendor;
    std::string first;
    std::string second;

    static PairKey of(NameKind kind, std::string vendor, std::string a, std::string b);
    static PairKey of(const PairClassification& p) { return of(p.kind, p.vendor, p.a, p.b); }

    friend auto operator<=>(const PairKey&, const PairKey&) = default;
};

struct Decision {
    bool match = false;
    std::string note;
};

/// Persistent review file: TSV with columns kind, a, b, flags, match, note.
/// Product names are written as "vendor:product". A blank match column marks
/// an undecided pair.
class DecisionSet {
public:
    static DecisionSet parse(std::string_view tsv);
    static DecisionSet load(const std::filesystem::path& file);

    void set(const PairKey& key, Decision d) { decisions_[key] = std::move(d); }
    const Decision* find(const PairKey& key) const;
    std::size_t size() const { return decisions_.size(); }
    const std::map<PairKey, Decision>& entries() const { return decisions_; }

private:
    std::map<PairKey, Decision> decisions_;
};

/// Worksheet listing the pairs with any known decisions filled in.
std::string format_worksheet(const std::vector<PairClassification>& pairs, const DecisionSet& decisions);

/// Raised when flagged pairs lack a decision; lists them.
class UndecidedPairsError : public Error {
public:
    explicit UndecidedPairsError(std::vector<PairKey> pairs);
    const std::vector<PairKey>& pairs() const { return pairs_; }

private:
    std::vector<PairKey> pairs_;
};

// ---------------------------------------------------------------------------
// Mapping

enum class DecidedBy { HeuristicManual, ImportedFile };

struct NameKey {
    NameKind kind = NameKind::Vendor;
    std::string vendor;  ///< owning vendor for products
    std::string raw;

    friend auto operator<=>(const NameKey&, const NameKey&) = default;
};

struct MappingProvenance {
    std::string flags;
    DecidedBy decided_by = DecidedBy::HeuristicManual;

    friend bool operator==(const MappingProvenance&, const MappingProvenance&) = default;
};

/// Raw name to canonical name. Only non-canonical names are stored, each
/// pointing directly at its group's canonical name.
class NameMapping {
public:
    void add(NameKey key, std::string canonical, MappingProvenance provenance);

    std::string resolve_vendor(const std::string& vendor) const;
    std::string resolve_product(const std::string& canonical_vendor, const std::string& product) const;

    bool empty() const { return entries_.empty(); }
    std::size_t size() const { return entries_.size(); }
    const std::map<NameKey, std::string>& entries() const { return entries_; }
    const std::map<NameKey, MappingProvenance>& provenance() const { return provenance_; }

    /// Throws FormatError unless every canonical name is a fixed point.
    void validate() const;

    /// TSV with columns kind, raw, canonical, decided_by.
    std::string to_tsv() const;
    static NameMapping from_tsv(std::string_view tsv);

    friend bool operator==(const NameMapping&, const NameMapping&) = default;

private:
    std::map<NameKey, std::string> entries_;
    std::map<NameKey, MappingProvenance> provenance_;
};

/// Associated-CVE count used to pick each group's canonical name.
using CveCounter = std::function<std::size_t(const NameKey&)>;

/// Union-find over matched pairs; each group's canonical name is the member
/// with the most associated CVEs, ties going to the lexicographically
/// smallest. Throws UndecidedPairsError if any pair has no decision.
NameMapping build_mapping(const std::vector<PairClassification>& pairs, const DecisionSet& decisions,
                          const CveCounter& cve_count);

CveCounter corpus_cve_counter(const Corpus& corpus);

struct ApplyStats {
    std::size_t vendors_before = 0;
    std::size_t vendors_after = 0;
    std::size_t products_before = 0;  ///< distinct (vendor, product) pairs
    std::size_t products_after = 0;
    std::size_t records_changed = 0;
    std::size_t cpe_entries_rewritten = 0;
};

struct ApplyResult {
    Corpus corpus;
    ApplyStats stats;
};

/// Rewrites each CPE vendor, then its product under the canonical vendor, and
/// drops CPE entries that become duplicates.
ApplyResult apply_mapping(const Corpus& corpus, const NameMapping& mapping);

/// Full two-stage consolidation: vendor pairs, then product pairs under the
/// consolidated vendors.
struct Consolidation {
    std::vector<PairClassification> vendor_pairs;
    std::vector<PairClassification> product_pairs;
    NameMapping mapping;
};

/// Runs both stages. Throws UndecidedPairsError listing every undecided pair
/// of the first stage that has any.
Consolidation consolidate(const Corpus& corpus, const DecisionSet& decisions);

/// Pairs a reviewer must decide next: all vendor pairs, plus product pairs
/// once every vendor pair is decided.
std::vector<PairClassification> review_candidates(const Corpus& corpus, const DecisionSet& decisions);

struct ExternalRemapStats {
    std::size_t total = 0;
    std::size_t impacted = 0;
    std::size_t consolidated_targets = 0;
};

ExternalRemapStats remap_external_vendor_list(const std::vector<std::string>& names, const NameMapping& mapping);

// ---------------------------------------------------------------------------
// Pattern summary

enum class PatternCategory { Tokens, MpZero, MpOne, MpMany, Prefix, ProductAsVendor };
enum class LcsBand { AtLeast3, Below3 };

std::string_view to_string(PatternCategory c);

struct PatternCell {
    std::size_t pairs = 0;
    std::size_t names = 0;

    friend bool operator==(const PatternCell&, const PatternCell&) = default;
};

/// Vendor-pair counts per pattern and LCS band, for flagged ("possible") and
/// matched ("confirmed") pairs. Token-equal pairs form their own category
/// (band AtLeast3 by convention). Remaining pairs land in one #MP column;
/// Prefix and ProductAsVendor are overlays. Pairs with #MP=0, |LCS|=0 and no
/// prefix relation are left out.
struct PatternStats {
    std::map<std::pair<PatternCategory, LcsBand>, PatternCell> possible;
    std::map<std::pair<PatternCategory, LcsBand>, PatternCell> confirmed;

    PatternCell cell(PatternCategory c, LcsBand band, bool confirmed_only) const;
    std::string to_csv() const;
};

PatternStats pattern_stats(const std::vector<PairClassification>& pairs, const DecisionSet& decisions);

}  // namespace vulncure::names
