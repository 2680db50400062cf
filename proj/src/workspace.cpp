#include "vulncure/workspace.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <set>

#include <json.hpp>

#include "vulncure/cwe.hpp"
#include "vulncure/ingest.hpp"
#include "vulncure/io.hpp"
#include "vulncure/names.hpp"

namespace vulncure::workspace {

using analysis::CorpusTag;
using analysis::Report;

MissingPrerequisite::MissingPrerequisite(const fs::path& artifact, const std::string& hint)
    : PreconditionError("missing prerequisite: " + artifact.string() + (hint.empty() ? "" : " (" + hint + ")")),
      artifact_(artifact) {}

std::optional<std::string> process_env(const std::string& name) {
    if (const char* v = std::getenv(name.c_str())) return std::string(v);
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Config

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::string env_name(const std::string& key) {
    std::string out = "VULNCURE_";
    for (char c : key) out.push_back(c == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        T out;
        if constexpr (std::is_same_v<T, double>) {
            out = std::stod(value, &used);
        } else if constexpr (std::is_same_v<T, std::uint64_t>) {
            if (!value.empty() && value.front() == '-') throw std::invalid_argument("negative");
            out = std::stoull(value, &used);
        } else {
            out = static_cast<T>(std::stoll(value, &used));
        }
        if (used != value.size()) throw std::invalid_argument("trailing");
        return out;
    } catch (const std::exception&) {
        throw FormatError("config key " + key + ": '" + value + "' is not a valid number");
    }
}

fs::path resolve(const fs::path& root, const std::string& value) {
    fs::path p(value);
    return (p.is_absolute() ? p : root / p).lexically_normal();
}

std::string hash_file(const fs::path& p) { return dates::sha256_hex(ingest::read_file(p)); }

std::string fixed(double v) { return io::format_fixed(v, 6); }

}  // namespace

std::vector<std::string> Config::known_keys() {
    return {"paths.feeds_dir",          "paths.fixtures_dir",      "paths.decisions_file", "paths.mapping_file",
            "paths.model_file",         "paths.output_dir",        "paths.cwe_catalog",    "paths.vendor_lists",
            "run.seed",                 "dates.match_policy",      "severity.model",       "severity.split_ratio",
            "severity.split_stratify_on", "severity.epochs",       "severity.learning_rate", "severity.batch_size",
            "severity.ridge",           "severity.aer_zero_policy", "report.top_n"};
}

Config Config::parse(std::string_view text, const fs::path& root, const EnvLookup& env) {
    const auto keys = known_keys();
    std::map<std::string, std::string> values{{"paths.feeds_dir", "feeds"},
                                              {"paths.fixtures_dir", "pages"},
                                              {"paths.decisions_file", "decisions.tsv"},
                                              {"paths.mapping_file", ""},
                                              {"paths.model_file", ""},
                                              {"paths.output_dir", "out"},
                                              {"paths.cwe_catalog", ""},
                                              {"paths.vendor_lists", ""},
                                              {"run.seed", "1"},
                                              {"dates.match_policy", "first"},
                                              {"severity.model", "dnn"},
                                              {"severity.split_ratio", "0.8"},
                                              {"severity.split_stratify_on", "v3"},
                                              {"severity.epochs", "100"},
                                              {"severity.learning_rate", "0.001"},
                                              {"severity.batch_size", "128"},
                                              {"severity.ridge", "1e-10"},
                                              {"severity.aer_zero_policy", "exclude"},
                                              {"report.top_n", "10"}};

    std::string section;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        const std::string line = trim(text.substr(pos, nl - pos));
        pos = nl + 1;
        ++line_no;
        if (line.empty() || line.front() == '#' || line.front() == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw FormatError("config line " + std::to_string(line_no) + ": bad section header");
            section = trim(std::string_view(line).substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw FormatError("config line " + std::to_string(line_no) + ": expected key = value");
        std::string key = trim(std::string_view(line).substr(0, eq));
        if (!section.empty() && key.find('.') == std::string::npos) key = section + "." + key;
        if (!values.contains(key)) throw FormatError("config line " + std::to_string(line_no) + ": unknown key " + key);
        values[key] = trim(std::string_view(line).substr(eq + 1));
    }
    for (const auto& key : keys) {
        if (auto v = env(env_name(key))) values[key] = trim(*v);
    }

    Config c;
    c.root = root;
    c.feeds_dir = resolve(root, values["paths.feeds_dir"]);
    c.fixtures_dir = resolve(root, values["paths.fixtures_dir"]);
    c.decisions_file = resolve(root, values["paths.decisions_file"]);
    c.output_dir = resolve(root, values["paths.output_dir"]);
    c.mapping_file = values["paths.mapping_file"].empty() ? c.output_dir / "names.mapping.tsv"
                                                          : resolve(root, values["paths.mapping_file"]);
    c.model_file = values["paths.model_file"].empty() ? c.output_dir / "severity.model.json"
                                                      : resolve(root, values["paths.model_file"]);
    if (!values["paths.cwe_catalog"].empty()) c.cwe_catalog = resolve(root, values["paths.cwe_catalog"]);

    std::string lists = values["paths.vendor_lists"];
    std::size_t start = 0;
    while (start < lists.size()) {
        auto comma = lists.find(',', start);
        if (comma == std::string::npos) comma = lists.size();
        const std::string item = trim(std::string_view(lists).substr(start, comma - start));
        start = comma + 1;
        if (item.empty()) continue;
        const auto colon = item.find(':');
        if (colon != std::string::npos && item.substr(0, colon).find('/') == std::string::npos) {
            c.vendor_lists[trim(item.substr(0, colon))] = resolve(root, trim(item.substr(colon + 1)));
        } else {
            c.vendor_lists[fs::path(item).stem().string()] = resolve(root, item);
        }
    }

    c.seed = parse_number<std::uint64_t>("run.seed", values["run.seed"]);
    const auto& policy = values["dates.match_policy"];
    if (policy == "first") c.date_policy = dates::DateMatchPolicy::FirstMatch;
    else if (policy == "earliest") c.date_policy = dates::DateMatchPolicy::EarliestMatch;
    else throw FormatError("dates.match_policy must be first or earliest");
    const auto& model = values["severity.model"];
    if (model == "dnn") c.model_kind = severity::ModelKind::DNN;
    else if (model == "linear") c.model_kind = severity::ModelKind::Linear;
    else throw FormatError("severity.model must be dnn or linear");
    const auto& strat = values["severity.split_stratify_on"];
    if (strat == "v3") c.split_stratify_on = severity::StratifyOn::V3;
    else if (strat == "v2") c.split_stratify_on = severity::StratifyOn::V2;
    else throw FormatError("severity.split_stratify_on must be v3 or v2");
    if (values["severity.aer_zero_policy"] != "exclude") {
        throw FormatError("severity.aer_zero_policy supports only 'exclude'");
    }
    c.split_ratio = parse_number<double>("severity.split_ratio", values["severity.split_ratio"]);
    c.dnn.epochs = parse_number<int>("severity.epochs", values["severity.epochs"]);
    c.dnn.learning_rate = parse_number<double>("severity.learning_rate", values["severity.learning_rate"]);
    c.dnn.batch_size = parse_number<int>("severity.batch_size", values["severity.batch_size"]);
    c.ridge = parse_number<double>("severity.ridge", values["severity.ridge"]);
    c.report_top_n = parse_number<std::size_t>("report.top_n", values["report.top_n"]);
    if (c.dnn.epochs < 0 || c.dnn.batch_size < 1 || c.report_top_n < 1) throw FormatError("config value out of range");
    c.effective = std::move(values);
    return c;
}

Config Config::load(const fs::path& file, const EnvLookup& env) {
    if (!fs::exists(file)) throw MissingPrerequisite(file, "config file");
    const fs::path root = fs::absolute(file).parent_path();
    return parse(ingest::read_file(file), root, env);
}

void Config::set_seed(std::uint64_t s) {
    seed = s;
    effective["run.seed"] = std::to_string(s);
}

// ---------------------------------------------------------------------------
// Report helpers

Report lag_cdf_report(const Corpus& corpus, CorpusTag tag) {
    Report rep{"lag_cdf", {"lag_days", "count", "cumulative_fraction"}, {}, tag, {}};
    for (const auto& row : dates::lag_cdf(corpus)) {
        rep.rows.push_back({std::to_string(row.lag_days), std::to_string(row.count), fixed(row.cumulative_fraction)});
    }
    return rep;
}

Report lag_by_severity_report(const Corpus& corpus, CorpusTag tag) {
    Report rep{"lag_by_severity", {"v3_label", "mean_lag_days"}, {}, tag, {}};
    for (const auto& [label, mean] : dates::lag_by_severity(corpus)) {
        rep.rows.push_back({std::string(to_string(label)), io::format_fixed(mean, 2)});
    }
    return rep;
}

Report domain_coverage_report(const Corpus& corpus, std::size_t n, CorpusTag tag) {
    const auto cov = dates::rank_domains(corpus);
    Report rep{"domain_coverage", {"rank", "domain", "urls", "coverage"}, {}, tag, {{"n", std::to_string(n)}}};
    for (std::size_t i = 0; i < cov.ranked.size() && i < n; ++i) {
        rep.rows.push_back({std::to_string(i + 1), cov.ranked[i].first, std::to_string(cov.ranked[i].second),
                            fixed(cov.coverage_at(i + 1))});
    }
    return rep;
}

Report transition_report(const std::string& name, const severity::TransitionMatrix& m, CorpusTag tag) {
    static constexpr const char* rows[] = {"L", "M", "H"};
    Report rep{name, {"v2", "L", "M", "H", "C"}, {}, tag, {}};
    for (std::size_t r = 0; r < 3; ++r) {
        std::vector<std::string> row{rows[r]};
        for (std::size_t c = 0; c < 4; ++c) row.push_back(std::to_string(m[r][c]));
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Workspace

Workspace::Workspace(Config config) : config_(std::move(config)) {}

fs::path Workspace::raw_corpus_path() const { return config_.output_dir / "corpus.raw.json"; }
fs::path Workspace::corrected_corpus_path() const { return config_.output_dir / "corpus.corrected.json"; }
fs::path Workspace::worksheet_path() const { return config_.output_dir / "names.worksheet.tsv"; }
fs::path Workspace::reports_dir(CorpusTag tag) const {
    return config_.output_dir / "reports" / std::string(to_string(tag));
}

std::string Workspace::relative(const fs::path& p) const {
    const auto rel = p.lexically_relative(config_.root);
    return (rel.empty() || *rel.begin() == "..") ? p.generic_string() : rel.generic_string();
}

void Workspace::write(const fs::path& path, std::string_view contents, StageResult& result) const {
    io::write_atomic(path, contents);
    result.outputs.push_back(path);
}

Workspace::Inputs Workspace::snapshot(const std::vector<fs::path>& paths) const {
    Inputs out;
    for (const auto& p : paths) out.emplace_back(relative(p), hash_file(p));
    return out;
}

void Workspace::write_manifest(const StageResult& result, const Inputs& inputs) const {
    nlohmann::ordered_json doc;
    doc["stage"] = result.stage;
    doc["tool_version"] = analysis::kToolVersion;
    doc["seed"] = config_.seed;
    doc["config"] = config_.effective;
    auto files = [](const Inputs& list) {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const auto& [path, sha] : list) arr.push_back({{"path", path}, {"sha256", sha}});
        return arr;
    };
    doc["inputs"] = files(inputs);
    doc["outputs"] = files(snapshot(result.outputs));
    nlohmann::ordered_json counts = nlohmann::ordered_json::object();
    for (const auto& [k, v] : result.counts) counts[k] = v;
    doc["counts"] = counts;
    doc["warnings"] = result.warnings;
    io::write_atomic(config_.output_dir / "manifests" / (result.stage + ".manifest.json"), doc.dump(1) + "\n");
}

Corpus Workspace::load_corpus(CorpusTag tag) const {
    const auto path = tag == CorpusTag::Raw ? raw_corpus_path() : corrected_corpus_path();
    if (!fs::exists(path)) throw MissingPrerequisite(path, "run ingest first");
    auto parsed = ingest::parse_feed(ingest::read_file(path));
    if (parsed.stats.records_skipped) throw FormatError(path.string() + " holds invalid records");
    return Corpus(std::move(parsed.records));
}

namespace {

void count(StageResult& r, const std::string& key, std::size_t v) { r.counts.emplace_back(key, std::to_string(v)); }
void count(StageResult& r, const std::string& key, const std::string& v) { r.counts.emplace_back(key, v); }

std::size_t product_count(const Corpus& c) { return c.product_index().size(); }

}  // namespace

StageResult Workspace::ingest() {
    if (!fs::is_directory(config_.feeds_dir)) throw MissingPrerequisite(config_.feeds_dir, "feeds directory");
    auto load = ingest::load_snapshot_with_stats(config_.feeds_dir);
    StageResult r{"ingest", {}, {}, {}};
    const std::string doc = ingest::format_feed(load.corpus);
    write(raw_corpus_path(), doc, r);
    write(corrected_corpus_path(), doc, r);

    std::size_t v2 = 0, v3 = 0, dual = 0;
    for (const auto& [id, rec] : load.corpus.records()) {
        v2 += rec.v2 ? 1 : 0;
        v3 += rec.v3 ? 1 : 0;
        dual += rec.v2 && rec.v3 ? 1 : 0;
    }
    count(r, "feed_files", load.files.size());
    count(r, "items_total", load.stats.records_total);
    count(r, "items_skipped", load.stats.records_skipped);
    for (const auto& [reason, n] : load.stats.skip_reasons) count(r, "skipped_" + reason, n);
    count(r, "duplicates", load.duplicates);
    count(r, "records", load.corpus.size());
    count(r, "vendors", load.corpus.vendor_index().size());
    count(r, "products", product_count(load.corpus));
    count(r, "with_v2", v2);
    count(r, "with_v3", v3);
    count(r, "dual_scored", dual);
    write_manifest(r, snapshot(load.files));
    return r;
}

StageResult Workspace::estimate_dates() {
    const Corpus corpus = load_corpus(CorpusTag::Corrected);
    const auto inputs = snapshot({corrected_corpus_path()});
    StageResult r{"estimate-dates", {}, {}, {}};
    if (!fs::is_directory(config_.fixtures_dir)) {
        r.warnings.push_back("page store " + relative(config_.fixtures_dir) + " not found; EDD falls back to published");
    }
    const dates::PageStore store(config_.fixtures_dir);
    const auto registry = dates::ExtractorRegistry::with_defaults(config_.date_policy);
    const auto est = dates::estimate_corpus(corpus, store, registry);
    write(corrected_corpus_path(), ingest::format_feed(est.corpus), r);
    const auto table = dates::lag_cdf(est.corpus);
    write(config_.output_dir / "dates.lag_cdf.csv", dates::lag_cdf_csv(table), r);

    count(r, "records", est.stats.records);
    count(r, "pages_found", est.stats.pages_found);
    count(r, "pages_dated", est.stats.pages_dated);
    count(r, "pages_after_published", est.stats.pages_after_published);
    count(r, "records_with_earlier_edd", est.stats.improved);
    count(r, "cdf_at_0", fixed(dates::cdf_at(table, 0)));
    count(r, "cdf_at_6", fixed(dates::cdf_at(table, 6)));
    write_manifest(r, inputs);
    return r;
}

StageResult Workspace::name_candidates() {
    const Corpus raw = load_corpus(CorpusTag::Raw);
    const auto decisions =
        fs::exists(config_.decisions_file) ? names::DecisionSet::load(config_.decisions_file) : names::DecisionSet{};
    const auto pairs = names::review_candidates(raw, decisions);
    StageResult r{"name-candidates", {}, {}, {}};
    write(worksheet_path(), names::format_worksheet(pairs, decisions), r);
    std::size_t vendor = 0, product = 0, undecided = 0;
    for (const auto& p : pairs) {
        (p.kind == names::NameKind::Vendor ? vendor : product) += 1;
        undecided += decisions.find(names::PairKey::of(p)) ? 0 : 1;
    }
    count(r, "vendor_pairs", vendor);
    count(r, "product_pairs", product);
    count(r, "undecided", undecided);
    if (!fs::exists(config_.decisions_file)) {
        r.warnings.push_back("no decision file at " + relative(config_.decisions_file) + "; every pair is undecided");
    }
    std::vector<fs::path> inputs{raw_corpus_path()};
    if (fs::exists(config_.decisions_file)) inputs.push_back(config_.decisions_file);
    write_manifest(r, snapshot(inputs));
    return r;
}

StageResult Workspace::name_apply() {
    const Corpus raw = load_corpus(CorpusTag::Raw);
    const Corpus corrected = load_corpus(CorpusTag::Corrected);
    if (!fs::exists(config_.decisions_file)) {
        throw MissingPrerequisite(config_.decisions_file, "decide the pairs in " + relative(worksheet_path()));
    }
    const auto decisions = names::DecisionSet::load(config_.decisions_file);
    auto inputs = snapshot({raw_corpus_path(), corrected_corpus_path(), config_.decisions_file});
    // Candidates always come from the raw names, so the mapping does not
    // depend on how often this stage has run.
    const auto cons = names::consolidate(raw, decisions);
    const auto applied = names::apply_mapping(corrected, cons.mapping);

    StageResult r{"name-apply", {}, {}, {}};
    write(config_.mapping_file, cons.mapping.to_tsv(), r);
    write(corrected_corpus_path(), ingest::format_feed(applied.corpus), r);
    write(config_.output_dir / "names.patterns.csv", names::pattern_stats(cons.vendor_pairs, decisions).to_csv(), r);

    std::string external = "list,total,impacted,consolidated_targets\n";
    for (const auto& [label, file] : config_.vendor_lists) {
        if (!fs::exists(file)) throw MissingPrerequisite(file, "vendor list " + label);
        const auto s = names::remap_external_vendor_list(ingest::load_external_vendor_list(file), cons.mapping);
        external += io::csv_line({label, std::to_string(s.total), std::to_string(s.impacted),
                                  std::to_string(s.consolidated_targets)});
        inputs.emplace_back(relative(file), hash_file(file));
    }
    // The corpus itself, measured on raw names.
    const auto self = names::remap_external_vendor_list(
        [&] {
            std::vector<std::string> v;
            for (const auto& [vendor, _] : raw.vendor_index()) v.push_back(vendor);
            return v;
        }(),
        cons.mapping);
    external += io::csv_line({"nvd", std::to_string(self.total), std::to_string(self.impacted),
                              std::to_string(self.consolidated_targets)});
    write(config_.output_dir / "names.external.csv", external, r);

    std::size_t vendor_entries = 0;
    for (const auto& [key, _] : cons.mapping.entries()) vendor_entries += key.kind == names::NameKind::Vendor ? 1 : 0;
    count(r, "vendor_pairs", cons.vendor_pairs.size());
    count(r, "product_pairs", cons.product_pairs.size());
    count(r, "mapping_vendor_entries", vendor_entries);
    count(r, "mapping_product_entries", cons.mapping.size() - vendor_entries);
    count(r, "vendors_before", applied.stats.vendors_before);
    count(r, "vendors_after", applied.stats.vendors_after);
    count(r, "products_before", applied.stats.products_before);
    count(r, "products_after", applied.stats.products_after);
    count(r, "records_changed", applied.stats.records_changed);
    count(r, "cpe_entries_rewritten", applied.stats.cpe_entries_rewritten);
    write_manifest(r, inputs);
    return r;
}

StageResult Workspace::extract_cwe() {
    if (!config_.cwe_catalog) throw MissingPrerequisite("paths.cwe_catalog", "no CWE catalog configured");
    if (!fs::exists(*config_.cwe_catalog)) throw MissingPrerequisite(*config_.cwe_catalog, "CWE catalog");
    const Corpus raw = load_corpus(CorpusTag::Raw);
    const Corpus corrected = load_corpus(CorpusTag::Corrected);
    const auto catalog = cwe::CweCatalog::load(*config_.cwe_catalog);
    const auto inputs = snapshot({raw_corpus_path(), corrected_corpus_path(), *config_.cwe_catalog});
    const auto merged = cwe::merge_corpus(corrected, catalog);

    StageResult r{"extract-cwe", {}, {}, {}};
    write(corrected_corpus_path(), ingest::format_feed(merged.corpus), r);
    // Measured against the raw corpus so a rerun reports the same gap.
    const auto gap = cwe::cwe_gap_report(raw, merged.corpus);
    write(config_.output_dir / "cwe.gap.csv", gap.to_csv(), r);
    std::string quarantine = "id\tcwe\n";
    for (const auto& q : merged.quarantined) quarantine += q.id.str() + "\t" + q.cwe + "\n";
    write(config_.output_dir / "cwe.quarantine.tsv", quarantine, r);

    count(r, "catalog_entries", catalog.size());
    count(r, "records_changed", merged.changed);
    count(r, "quarantined_ids", merged.quarantined.size());
    count(r, "other", gap.other);
    count(r, "noinfo", gap.noinfo);
    count(r, "unassigned", gap.unassigned);
    count(r, "fixed_other", gap.fixed_other);
    count(r, "fixed_noinfo_or_unassigned", gap.fixed_noinfo_or_unassigned);
    count(r, "augmented", gap.augmented);
    write_manifest(r, inputs);
    return r;
}

StageResult Workspace::train_severity() {
    const Corpus corpus = load_corpus(CorpusTag::Corrected);
    const auto inputs = snapshot({corrected_corpus_path()});
    const auto table = severity::CweTable::from_corpus(corpus);
    const auto samples = severity::ground_truth(corpus, table);
    if (samples.size() < 2) throw Error("need at least two records scored under both v2 and v3 to train");
    const auto split = severity::split_dataset(samples, config_.split_ratio, config_.seed, config_.split_stratify_on);
    if (split.test.empty()) throw Error("stratified split left the test set empty");

    StageResult r{"train-severity", {}, {}, split.warnings};
    auto linear = severity::train_linear(split.train, config_.ridge);
    linear.cwe_table = table;
    linear.meta.seed = config_.seed;
    auto dnn = severity::train_dnn(split.train, config_.seed, config_.dnn);
    dnn.cwe_table = table;

    const auto& chosen = config_.model_kind == severity::ModelKind::DNN ? dnn : linear;
    write(config_.model_file, chosen.to_json(), r);
    const auto eval_dnn = severity::evaluate(dnn, split.test);
    const auto eval_linear = severity::evaluate(linear, split.test);
    write(config_.output_dir / "severity.eval.dnn.csv", eval_dnn.to_csv(), r);
    write(config_.output_dir / "severity.eval.dnn.json", eval_dnn.to_json(), r);
    write(config_.output_dir / "severity.eval.linear.csv", eval_linear.to_csv(), r);
    write(config_.output_dir / "severity.eval.linear.json", eval_linear.to_json(), r);
    write(config_.output_dir / "severity.transition.ground_truth.csv",
          severity::transition_csv(severity::ground_truth_transition(corpus)), r);

    count(r, "samples", samples.size());
    count(r, "train", split.train.size());
    count(r, "test", split.test.size());
    count(r, "model", std::string(to_string(chosen.kind)));
    count(r, "dnn_initial_train_loss", fixed(dnn.meta.initial_train_loss));
    count(r, "dnn_final_train_loss", fixed(dnn.meta.final_train_loss));
    count(r, "dnn_ae", fixed(eval_dnn.ae));
    count(r, "dnn_aer", fixed(eval_dnn.aer));
    count(r, "dnn_accuracy", fixed(eval_dnn.overall_accuracy));
    count(r, "linear_ae", fixed(eval_linear.ae));
    count(r, "linear_aer", fixed(eval_linear.aer));
    count(r, "linear_accuracy", fixed(eval_linear.overall_accuracy));
    count(r, "aer_excluded_zero_targets", eval_dnn.aer_excluded_zero_targets);

    std::vector<severity::FeatureVector> features;
    for (const auto& s : samples) features.push_back(s.features);
    try {
        const auto pca = severity::pca_project(features, 3);
        std::string csv = "id,pc1,pc2,pc3,v3_label\n";
        for (std::size_t i = 0; i < samples.size(); ++i) {
            const auto row = static_cast<Eigen::Index>(i);
            csv += io::csv_line({samples[i].id, fixed(pca.points(row, 0)), fixed(pca.points(row, 1)),
                                 fixed(pca.points(row, 2)), std::string(to_string(samples[i].v3_label()))});
        }
        write(config_.output_dir / "severity.pca.csv", csv, r);
        for (Eigen::Index k = 0; k < 3; ++k) {
            count(r, "pca_explained_" + std::to_string(k + 1), fixed(pca.explained_variance_ratio(k)));
        }
    } catch (const Error& e) {
        r.warnings.push_back(std::string("PCA skipped: ") + e.what());
    }
    write_manifest(r, inputs);
    return r;
}

StageResult Workspace::backfill_v3() {
    if (!fs::exists(config_.model_file)) throw MissingPrerequisite(config_.model_file, "run train-severity first");
    const Corpus corpus = load_corpus(CorpusTag::Corrected);
    const auto inputs = snapshot({corrected_corpus_path(), config_.model_file});
    const auto model = severity::RegressionModel::from_json(ingest::read_file(config_.model_file));
    const auto res = severity::backfill_v3(corpus, model);
    StageResult r{"backfill-v3", {}, {}, {}};
    write(corrected_corpus_path(), ingest::format_feed(res.corpus), r);
    write(config_.output_dir / "severity.transition.predicted.csv", severity::transition_csv(res.transition), r);
    count(r, "predicted", res.predicted);
    count(r, "skipped_no_v2", res.skipped_no_v2);
    write_manifest(r, inputs);
    return r;
}

StageResult Workspace::report(CorpusTag tag) {
    const Corpus corpus = load_corpus(tag);
    std::optional<Corpus> raw;
    if (tag == CorpusTag::Corrected) raw = load_corpus(CorpusTag::Raw);
    std::optional<cwe::CweCatalog> catalog;
    if (config_.cwe_catalog && fs::exists(*config_.cwe_catalog)) catalog = cwe::CweCatalog::load(*config_.cwe_catalog);
    const auto* cat = catalog ? &*catalog : nullptr;
    const std::size_t n = config_.report_top_n;

    const bool have_edd = !corpus.empty() && std::all_of(corpus.records().begin(), corpus.records().end(),
                                                         [](const auto& kv) { return kv.second.edd.has_value(); });
    bool have_pv3 = std::none_of(corpus.records().begin(), corpus.records().end(),
                                 [](const auto& kv) { return kv.second.v2 && !kv.second.v3; });
    have_pv3 = have_pv3 && std::any_of(corpus.records().begin(), corpus.records().end(), [](const auto& kv) {
                   return kv.second.v3 && kv.second.v3->provenance == Provenance::Predicted;
               });

    using analysis::DateField;
    using analysis::Scheme;
    std::vector<Report> reports;
    reports.push_back(analysis::top_dates(corpus, DateField::Published, n, tag));
    reports.push_back(analysis::day_of_week_histogram(corpus, DateField::Published, tag));
    if (have_edd) {
        reports.push_back(analysis::top_dates(corpus, DateField::EDD, n, tag));
        reports.push_back(analysis::day_of_week_histogram(corpus, DateField::EDD, tag));
        reports.push_back(lag_cdf_report(corpus, tag));
        reports.push_back(lag_by_severity_report(corpus, tag));
    }
    std::vector<Scheme> schemes{Scheme::V2, Scheme::V3Feed};
    if (have_pv3) schemes.push_back(Scheme::PV3);
    for (auto s : schemes) {
        reports.push_back(analysis::severity_distribution(corpus, s, false, tag));
        reports.push_back(analysis::severity_distribution(corpus, s, true, tag));
    }
    reports.push_back(analysis::top_cwe_by_severity(corpus, Scheme::V2, SeverityLabel::High, n, cat, tag));
    reports.push_back(analysis::top_cwe_by_severity(corpus, Scheme::V3Feed, SeverityLabel::Critical, n, cat, tag));
    if (have_pv3) {
        reports.push_back(analysis::top_cwe_by_severity(corpus, Scheme::PV3, SeverityLabel::Critical, n, cat, tag));
        reports.push_back(analysis::top_cwe_by_severity(corpus, Scheme::PV3, SeverityLabel::High, n, cat, tag));
    }
    reports.push_back(analysis::top_vendors(corpus, analysis::VendorMetric::CveCount, n, tag));
    reports.push_back(analysis::top_vendors(corpus, analysis::VendorMetric::ProductCount, n, tag));
    reports.push_back(domain_coverage_report(corpus, 50, tag));
    reports.push_back(transition_report("transition_ground_truth", severity::ground_truth_transition(corpus), tag));
    if (raw) {
        reports.push_back(analysis::mislabeled_severity_breakdown(*raw, corpus, Scheme::V2));
        if (have_pv3) reports.push_back(analysis::mislabeled_severity_breakdown(*raw, corpus, Scheme::PV3));
    }

    StageResult r{"report-" + std::string(to_string(tag)), {}, {}, {}};
    const auto dir = reports_dir(tag);
    nlohmann::ordered_json index;
    index["corpus_tag"] = to_string(tag);
    index["tool_version"] = analysis::kToolVersion;
    index["seed"] = config_.seed;
    index["reports"] = nlohmann::ordered_json::array();
    for (auto& rep : reports) {
        rep.parameters["seed"] = std::to_string(config_.seed);
        write(dir / (rep.name + ".csv"), rep.to_csv(), r);
        write(dir / (rep.name + ".json"), rep.to_json(), r);
        index["reports"].push_back({{"name", rep.name},
                                    {"csv", rep.name + ".csv"},
                                    {"json", rep.name + ".json"},
                                    {"rows", rep.rows.size()}});
    }
    write(dir / "index.json", index.dump(1) + "\n", r);
    if (!have_edd) r.warnings.push_back("no disclosure estimates; EDD reports skipped");
    if (!have_pv3) r.warnings.push_back("no predicted v3 scores; pv3 reports skipped");
    count(r, "reports", reports.size());
    count(r, "records", corpus.size());
    std::vector<fs::path> inputs{tag == CorpusTag::Raw ? raw_corpus_path() : corrected_corpus_path()};
    if (raw) inputs.push_back(raw_corpus_path());
    write_manifest(r, snapshot(inputs));
    return r;
}

std::vector<StageResult> Workspace::pipeline() {
    std::vector<StageResult> out;
    out.push_back(ingest());
    out.push_back(estimate_dates());
    out.push_back(name_candidates());
    out.push_back(name_apply());
    out.push_back(extract_cwe());
    out.push_back(train_severity());
    out.push_back(backfill_v3());
    out.push_back(report(CorpusTag::Raw));
    out.push_back(report(CorpusTag::Corrected));
    return out;
}

}  // namespace vulncure::workspace
