#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vulncure/analysis.hpp"
#include "vulncure/core.hpp"
#include "vulncure/dates.hpp"
#include "vulncure/severity.hpp"

namespace vulncure::workspace {

namespace fs = std::filesystem;

/// A stage was run before the artifact it needs exists.
class MissingPrerequisite : public PreconditionError {
public:
    explicit MissingPrerequisite(const fs::path& artifact, const std::string& hint = {});
    const fs::path& artifact() const { return artifact_; }

private:
    fs::path artifact_;
};

using EnvLookup = std::function<std::optional<std::string>(const std::string& name)>;

/// Reads the process environment.
std::optional<std::string> process_env(const std::string& name);

/// Flat key=value file. Keys carry a section prefix ("paths.feeds_dir"); a
/// "[paths]" header line sets the prefix for the keys that follow. Every key
/// can be overridden by VULNCURE_<KEY> with dots as underscores
/// (VULNCURE_RUN_SEED). Relative paths resolve against the config file's
/// directory.
struct Config {
    fs::path root;
    fs::path feeds_dir;
    fs::path fixtures_dir;
    fs::path decisions_file;
    fs::path mapping_file;
    fs::path model_file;
    fs::path output_dir;
    std::optional<fs::path> cwe_catalog;
    /// label -> vendor list file
    std::map<std::string, fs::path> vendor_lists;

    std::uint64_t seed = 1;
    dates::DateMatchPolicy date_policy = dates::DateMatchPolicy::FirstMatch;
    severity::ModelKind model_kind = severity::ModelKind::DNN;
    severity::StratifyOn split_stratify_on = severity::StratifyOn::V3;
    double split_ratio = 0.8;
    severity::DnnOptions dnn;
    double ridge = 1e-10;
    std::size_t report_top_n = 10;

    /// Every key with its effective value, for manifests.
    std::map<std::string, std::string> effective;

    static std::vector<std::string> known_keys();
    /// Throws FormatError on unknown keys or bad values.
    static Config parse(std::string_view text, const fs::path& root, const EnvLookup& env = process_env);
    static Config load(const fs::path& file, const EnvLookup& env = process_env);

    void set_seed(std::uint64_t s);
};

struct StageResult {
    std::string stage;
    /// Ordered so printed summaries and manifests are stable.
    std::vector<std::pair<std::string, std::string>> counts;
    std::vector<fs::path> outputs;
    std::vector<std::string> warnings;
};

/// Stages read and write artifacts under output_dir. Every artifact is written
/// atomically and each stage leaves a <stage>.manifest.json listing input and
/// output hashes, the seed, the effective config and its counts.
class Workspace {
public:
    explicit Workspace(Config config);

    const Config& config() const { return config_; }

    fs::path raw_corpus_path() const;
    fs::path corrected_corpus_path() const;
    fs::path worksheet_path() const;
    fs::path reports_dir(analysis::CorpusTag tag) const;

    StageResult ingest();
    StageResult estimate_dates();
    StageResult name_candidates();
    StageResult name_apply();
    StageResult extract_cwe();
    StageResult train_severity();
    StageResult backfill_v3();
    StageResult report(analysis::CorpusTag tag);

    /// ingest, estimate-dates, name-candidates, name-apply, extract-cwe,
    /// train-severity, backfill-v3, then reports for both corpora.
    std::vector<StageResult> pipeline();

    Corpus load_corpus(analysis::CorpusTag tag) const;

private:
    void write(const fs::path& path, std::string_view contents, StageResult& result) const;
    using Inputs = std::vector<std::pair<std::string, std::string>>;  // path, sha256
    Inputs snapshot(const std::vector<fs::path>& paths) const;
    void write_manifest(const StageResult& result, const Inputs& inputs) const;
    std::string relative(const fs::path& p) const;

    Config config_;
};

/// Report views of values computed outside the analysis module.
analysis::Report lag_cdf_report(const Corpus& corpus, analysis::CorpusTag tag);
analysis::Report lag_by_severity_report(const Corpus& corpus, analysis::CorpusTag tag);
analysis::Report domain_coverage_report(const Corpus& corpus, std::size_t n, analysis::CorpusTag tag);
analysis::Report transition_report(const std::string& name, const severity::TransitionMatrix& m,
                                   analysis::CorpusTag tag);

}  // namespace vulncure::workspace
