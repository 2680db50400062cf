#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "vulncure/core.hpp"

namespace vulncure::ingest {

struct FeedStats {
    std::size_t records_total = 0;
    std::size_t records_skipped = 0;
    std::map<std::string, std::size_t> skip_reasons;

    std::size_t records_parsed() const { return records_total - records_skipped; }
    void merge(const FeedStats& other);
};

struct ParsedFeed {
    std::vector<CveRecord> records;
    FeedStats stats;
};

/// Parses an NVD "CVE_Items" JSON document (schema 1.0 or 1.1), gzip or plain.
/// Malformed items are skipped and counted by reason; only a document that
/// cannot be read at all raises FormatError.
ParsedFeed parse_feed(std::string_view feed_bytes);

/// Serializes records as an NVD 1.1 style document. Predicted v3 scores and
/// disclosure estimates go under an "x_vulncure" extension object so that
/// parse_feed(format_feed(r)) reproduces r.
std::string format_feed(const std::vector<CveRecord>& records);
std::string format_feed(const Corpus& corpus);

/// Decompresses a gzip stream; returns the input unchanged if it is not gzip.
std::string maybe_gunzip(std::string_view bytes);

std::string read_file(const std::filesystem::path& path);

/// CPE 2.3 formatted string or CPE 2.2 URI to vendor/product/version.
/// Returns nullopt for strings that name no vendor or product.
std::optional<CpeEntry> parse_cpe(std::string_view cpe);

struct SnapshotLoad {
    Corpus corpus;
    FeedStats stats;
    std::vector<std::filesystem::path> files;
    std::size_t duplicates = 0;
};

/// Loads every nvdcve-*.json[.gz] file in a directory. When an id appears in
/// several feeds the most recently modified record is kept.
SnapshotLoad load_snapshot_with_stats(const std::filesystem::path& directory);
Corpus load_snapshot(const std::filesystem::path& directory);

/// Merges feeds given in any order; same rule as load_snapshot.
SnapshotLoad merge_feeds(std::vector<ParsedFeed> feeds);

/// One vendor name per line; lowercased, de-duplicated, first occurrence order.
std::vector<std::string> load_external_vendor_list(const std::filesystem::path& file);
std::vector<std::string> parse_vendor_list(std::string_view text);

}  // namespace vulncure::ingest
