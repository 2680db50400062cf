#include "vulncure/names.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <set>
#include <unordered_map>

#include "vulncure/ingest.hpp"
#include "vulncure/io.hpp"

namespace vulncure::names {

// ---------------------------------------------------------------------------
// String measures

std::vector<std::string> normalize_tokens(std::string_view name) {
    std::vector<std::string> tokens;
    std::string cur;
    for (char c : name) {
        const auto u = static_cast<unsigned char>(c);
        if (std::isalnum(u) || u >= 0x80) {
            cur.push_back(static_cast<char>(std::tolower(u)));
        } else if (!cur.empty()) {
            tokens.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) tokens.push_back(std::move(cur));
    return tokens;
}

std::size_t longest_common_substring(std::string_view a, std::string_view b) {
    if (a.empty() || b.empty()) return 0;
    std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
    std::size_t best = 0;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : 0;
            best = std::max(best, cur[j]);
        }
        std::swap(prev, cur);
    }
    return best;
}

std::size_t levenshtein(std::string_view a, std::string_view b) {
    std::vector<std::size_t> row(b.size() + 1);
    std::iota(row.begin(), row.end(), std::size_t{0});
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::size_t diag = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t up = row[j];
            row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
            diag = up;
        }
    }
    return row[b.size()];
}

std::string abbreviation(std::string_view name) {
    const auto tokens = normalize_tokens(name);
    if (tokens.size() < 2) return {};
    std::string out;
    for (const auto& t : tokens) out.push_back(t.front());
    return out;
}

// ---------------------------------------------------------------------------
// Classification

std::string_view to_string(NameKind kind) { return kind == NameKind::Vendor ? "vendor" : "product"; }

NameKind name_kind_from_string(std::string_view text) {
    const auto t = to_lower(text);
    if (t == "vendor") return NameKind::Vendor;
    if (t == "product") return NameKind::Product;
    throw FormatError("unknown name kind '" + std::string(text) + "'");
}

std::string PairClassification::flags() const {
    std::string out;
    const auto add = [&](const std::string& f) {
        if (!out.empty()) out.push_back(';');
        out += f;
    };
    if (tokens_equal) add("tokens");
    if (abbreviation_match) add("abbr");
    if (is_prefix) add("pref");
    if (product_as_vendor) add("pav");
    add("lcs=" + std::to_string(lcs_length));
    if (kind == NameKind::Vendor) add("mp=" + std::to_string(matching_products));
    add("ed=" + std::to_string(edit_distance));
    return out;
}

namespace {

bool single_token_equals(std::string_view name, const std::string& abbr) {
    if (abbr.empty()) return false;
    const auto tokens = normalize_tokens(name);
    return tokens.size() == 1 && tokens.front() == abbr;
}

bool starts_with(std::string_view s, std::string_view prefix) { return s.substr(0, prefix.size()) == prefix; }

}  // namespace

PairClassification classify_pair(NameKind kind, std::string_view a, std::string_view b, const Corpus& corpus,
                                 std::string_view vendor) {
    PairClassification p;
    p.kind = kind;
    if (kind == NameKind::Product) p.vendor = std::string(vendor);
    p.a = std::string(a);
    p.b = std::string(b);
    p.tokens_equal = normalize_tokens(a) == normalize_tokens(b);
    p.lcs_length = longest_common_substring(a, b);
    p.is_prefix = a != b && (starts_with(a, b) || starts_with(b, a));
    p.abbreviation_match = single_token_equals(b, abbreviation(a)) || single_token_equals(a, abbreviation(b));
    p.edit_distance = levenshtein(a, b);
    if (kind == NameKind::Vendor) {
        const auto& pa = corpus.products_of(p.a);
        const auto& pb = corpus.products_of(p.b);
        std::size_t shared = 0;
        for (const auto& prod : pa) shared += pb.count(prod);
        p.matching_products = shared;
        p.product_as_vendor = pa.contains(p.b) || pb.contains(p.a);
    }
    return p;
}

bool passes_vendor_gate(const PairClassification& p) {
    return p.tokens_equal || p.lcs_length >= 3 || p.is_prefix || p.abbreviation_match || p.matching_products >= 1 ||
           p.product_as_vendor;
}

bool passes_product_gate(const PairClassification& p) {
    return p.tokens_equal || p.abbreviation_match || p.edit_distance <= 1 ||
           (p.edit_distance == 2 && p.lcs_length >= 5);
}

std::vector<PairClassification> candidate_vendor_pairs(const Corpus& corpus) {
    std::vector<std::string> vendors;
    for (const auto& [v, _] : corpus.vendor_index()) vendors.push_back(v);
    std::unordered_map<std::string, std::size_t> index_of;
    for (std::size_t i = 0; i < vendors.size(); ++i) index_of.emplace(vendors[i], i);

    // Blocking: enumerate only pairs that can pass the gate. Each block is
    // exact for one gate clause, so the union covers every passing pair.
    std::set<std::pair<std::size_t, std::size_t>> candidates;
    const auto add = [&](std::size_t i, std::size_t j) {
        if (i != j) candidates.emplace(std::min(i, j), std::max(i, j));
    };
    const auto add_bucket = [&](const std::vector<std::size_t>& bucket) {
        for (std::size_t x = 0; x < bucket.size(); ++x)
            for (std::size_t y = x + 1; y < bucket.size(); ++y) add(bucket[x], bucket[y]);
    };

    std::unordered_map<std::string, std::vector<std::size_t>> by_trigram, by_tokens, by_product;
    std::unordered_map<std::string, std::vector<std::size_t>> by_abbreviation;
    for (std::size_t i = 0; i < vendors.size(); ++i) {
        const auto& v = vendors[i];
        std::set<std::string> grams;
        for (std::size_t k = 0; k + 3 <= v.size(); ++k) grams.insert(v.substr(k, 3));
        for (const auto& g : grams) by_trigram[g].push_back(i);

        std::string key;
        for (const auto& t : normalize_tokens(v)) key += t + ' ';
        by_tokens[key].push_back(i);

        if (auto abbr = abbreviation(v); !abbr.empty()) by_abbreviation[abbr].push_back(i);

        for (const auto& prod : corpus.products_of(v)) {
            by_product[prod].push_back(i);
            if (auto it = index_of.find(prod); it != index_of.end()) add(i, it->second);
        }

        // Prefix pairs where the shorter name has no trigram.
        if (v.size() < 3) {
            for (auto it = std::lower_bound(vendors.begin(), vendors.end(), v);
                 it != vendors.end() && starts_with(*it, v); ++it) {
                add(i, static_cast<std::size_t>(it - vendors.begin()));
            }
        }
    }
    for (const auto& [_, bucket] : by_trigram) add_bucket(bucket);
    for (const auto& [_, bucket] : by_tokens) add_bucket(bucket);
    for (const auto& [_, bucket] : by_product) add_bucket(bucket);
    for (std::size_t j = 0; j < vendors.size(); ++j) {
        const auto tokens = normalize_tokens(vendors[j]);
        if (tokens.size() != 1) continue;
        if (auto it = by_abbreviation.find(tokens.front()); it != by_abbreviation.end()) {
            for (auto i : it->second) add(i, j);
        }
    }

    std::vector<PairClassification> out;
    for (const auto& [i, j] : candidates) {
        auto p = classify_pair(NameKind::Vendor, vendors[i], vendors[j], corpus);
        if (passes_vendor_gate(p)) out.push_back(std::move(p));
    }
    return out;
}

std::vector<PairClassification> candidate_product_pairs(const Corpus& corpus, const std::string& vendor) {
    const auto it = corpus.vendor_index().find(vendor);
    if (it == corpus.vendor_index().end()) throw LookupError("unknown vendor '" + vendor + "'");
    const std::vector<std::string> products(it->second.begin(), it->second.end());

    std::vector<std::vector<std::string>> tokens;
    std::vector<std::string> abbrs;
    for (const auto& p : products) {
        tokens.push_back(normalize_tokens(p));
        abbrs.push_back(abbreviation(p));
    }
    const auto abbr_pair = [&](std::size_t i, std::size_t j) {
        return (!abbrs[i].empty() && tokens[j].size() == 1 && tokens[j].front() == abbrs[i]) ||
               (!abbrs[j].empty() && tokens[i].size() == 1 && tokens[i].front() == abbrs[j]);
    };

    std::vector<PairClassification> out;
    for (std::size_t i = 0; i < products.size(); ++i) {
        for (std::size_t j = i + 1; j < products.size(); ++j) {
            const auto len_gap = products[i].size() > products[j].size() ? products[i].size() - products[j].size()
                                                                          : products[j].size() - products[i].size();
            if (tokens[i] != tokens[j] && !abbr_pair(i, j) && len_gap > 2) continue;
            auto p = classify_pair(NameKind::Product, products[i], products[j], corpus, vendor);
            if (passes_product_gate(p)) out.push_back(std::move(p));
        }
    }
    return out;
}

std::vector<PairClassification> candidate_product_pairs_all(const Corpus& corpus) {
    std::vector<PairClassification> out;
    for (const auto& [vendor, _] : corpus.vendor_index()) {
        auto pairs = candidate_product_pairs(corpus, vendor);
        out.insert(out.end(), std::make_move_iterator(pairs.begin()), std::make_move_iterator(pairs.end()));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Decisions

PairKey PairKey::of(NameKind kind, std::string vendor, std::string a, std::string b) {
    if (b < a) std::swap(a, b);
    if (kind == NameKind::Vendor) vendor.clear();
    return PairKey{kind, std::move(vendor), std::move(a), std::move(b)};
}

namespace {

std::pair<std::string, std::string> split_qualified(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw FormatError("product name '" + text + "' lacks a vendor: prefix");
    return {text.substr(0, colon), text.substr(colon + 1)};
}

std::string qualified(NameKind kind, const std::string& vendor, const std::string& name) {
    return kind == NameKind::Product ? vendor + ":" + name : name;
}

std::string key_label(const PairKey& k) {
    return std::string(to_string(k.kind)) + " " + qualified(k.kind, k.vendor, k.first) + " / " +
           qualified(k.kind, k.vendor, k.second);
}

}  // namespace

DecisionSet DecisionSet::parse(std::string_view tsv) {
    DecisionSet out;
    for (const auto& row : io::parse_tsv(tsv)) {
        if (!row.empty() && row[0] == "kind") continue;
        if (row.size() < 5) throw FormatError("decision row has fewer than 5 columns");
        const auto kind = name_kind_from_string(row[0]);
        const auto match = to_lower(row[4]);
        if (match.empty()) continue;
        if (match != "yes" && match != "no") throw FormatError("match column must be yes/no, got '" + row[4] + "'");
        PairKey key;
        if (kind == NameKind::Product) {
            auto [va, pa] = split_qualified(row[1]);
            auto [vb, pb] = split_qualified(row[2]);
            if (va != vb) throw FormatError("product pair spans vendors: " + row[1] + " / " + row[2]);
            key = PairKey::of(kind, va, pa, pb);
        } else {
            key = PairKey::of(kind, "", to_lower(row[1]), to_lower(row[2]));
        }
        out.set(key, Decision{match == "yes", row.size() > 5 ? row[5] : std::string()});
    }
    return out;
}

DecisionSet DecisionSet::load(const std::filesystem::path& file) { return parse(ingest::read_file(file)); }

const Decision* DecisionSet::find(const PairKey& key) const {
    auto it = decisions_.find(key);
    return it == decisions_.end() ? nullptr : &it->second;
}

std::string format_worksheet(const std::vector<PairClassification>& pairs, const DecisionSet& decisions) {
    std::string out = "kind\ta\tb\tflags\tmatch\tnote\n";
    for (const auto& p : pairs) {
        const auto* d = decisions.find(PairKey::of(p));
        out += std::string(to_string(p.kind)) + "\t" + qualified(p.kind, p.vendor, p.a) + "\t" +
               qualified(p.kind, p.vendor, p.b) + "\t" + p.flags() + "\t" + (d ? (d->match ? "yes" : "no") : "") +
               "\t" + (d ? d->note : "") + "\n";
    }
    return out;
}

UndecidedPairsError::UndecidedPairsError(std::vector<PairKey> pairs)
    : Error([&] {
          std::string msg = std::to_string(pairs.size()) + " flagged pair(s) have no decision:";
          for (const auto& k : pairs) msg += "\n  " + key_label(k);
          return msg;
      }()),
      pairs_(std::move(pairs)) {}

// ---------------------------------------------------------------------------
// Mapping

void NameMapping::add(NameKey key, std::string canonical, MappingProvenance provenance) {
    provenance_[key] = std::move(provenance);
    entries_[std::move(key)] = std::move(canonical);
}

std::string NameMapping::resolve_vendor(const std::string& vendor) const {
    auto it = entries_.find(NameKey{NameKind::Vendor, "", vendor});
    return it == entries_.end() ? vendor : it->second;
}

std::string NameMapping::resolve_product(const std::string& canonical_vendor, const std::string& product) const {
    auto it = entries_.find(NameKey{NameKind::Product, canonical_vendor, product});
    return it == entries_.end() ? product : it->second;
}

void NameMapping::validate() const {
    for (const auto& [key, canonical] : entries_) {
        if (canonical == key.raw) throw FormatError("mapping entry maps '" + key.raw + "' to itself");
        if (entries_.contains(NameKey{key.kind, key.vendor, canonical})) {
            throw FormatError("canonical name '" + canonical + "' is itself remapped");
        }
    }
}

std::string NameMapping::to_tsv() const {
    std::string out = "kind\traw\tcanonical\tdecided_by\n";
    for (const auto& [key, canonical] : entries_) {
        const auto& prov = provenance_.at(key);
        out += std::string(to_string(key.kind)) + "\t" + qualified(key.kind, key.vendor, key.raw) + "\t" +
               qualified(key.kind, key.vendor, canonical) + "\t" +
               (prov.decided_by == DecidedBy::HeuristicManual ? "heuristic+manual" : "imported") + "\n";
    }
    return out;
}

NameMapping NameMapping::from_tsv(std::string_view tsv) {
    NameMapping out;
    for (const auto& row : io::parse_tsv(tsv)) {
        if (!row.empty() && row[0] == "kind") continue;
        if (row.size() < 3) throw FormatError("mapping row has fewer than 3 columns");
        const auto kind = name_kind_from_string(row[0]);
        const auto decided = row.size() > 3 && row[3] == "heuristic+manual" ? DecidedBy::HeuristicManual
                                                                           : DecidedBy::ImportedFile;
        if (kind == NameKind::Product) {
            auto [vr, raw] = split_qualified(row[1]);
            auto [vc, canonical] = split_qualified(row[2]);
            if (vr != vc) throw FormatError("product mapping spans vendors: " + row[1]);
            out.add(NameKey{kind, vr, raw}, canonical, {"", decided});
        } else {
            out.add(NameKey{kind, "", to_lower(row[1])}, to_lower(row[2]), {"", decided});
        }
    }
    out.validate();
    return out;
}

namespace {

class UnionFind {
public:
    std::size_t id(const NameKey& k) {
        auto [it, inserted] = ids_.emplace(k, parent_.size());
        if (inserted) {
            parent_.push_back(parent_.size());
            keys_.push_back(k);
        }
        return it->second;
    }
    std::size_t root(std::size_t x) {
        while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b) {
        a = root(a);
        b = root(b);
        if (a != b) parent_[std::max(a, b)] = std::min(a, b);
    }
    const std::vector<NameKey>& keys() const { return keys_; }

private:
    std::map<NameKey, std::size_t> ids_;
    std::vector<std::size_t> parent_;
    std::vector<NameKey> keys_;
};

}  // namespace

NameMapping build_mapping(const std::vector<PairClassification>& pairs, const DecisionSet& decisions,
                          const CveCounter& cve_count) {
    std::vector<PairKey> undecided;
    UnionFind uf;
    std::map<NameKey, std::string> flags_of;
    for (const auto& p : pairs) {
        const auto key = PairKey::of(p);
        const auto* d = decisions.find(key);
        if (!d) {
            undecided.push_back(key);
            continue;
        }
        if (!d->match) continue;
        const NameKey a{p.kind, p.vendor, p.a};
        const NameKey b{p.kind, p.vendor, p.b};
        uf.unite(uf.id(a), uf.id(b));
        for (const auto& k : {a, b}) {
            auto& f = flags_of[k];
            if (f.empty()) f = p.flags();
        }
    }
    if (!undecided.empty()) throw UndecidedPairsError(std::move(undecided));

    std::map<std::size_t, std::vector<NameKey>> groups;
    for (std::size_t i = 0; i < uf.keys().size(); ++i) groups[uf.root(i)].push_back(uf.keys()[i]);

    NameMapping mapping;
    for (const auto& [_, members] : groups) {
        const NameKey* best = nullptr;
        std::size_t best_count = 0;
        for (const auto& m : members) {
            const auto n = cve_count(m);
            if (!best || n > best_count || (n == best_count && m.raw < best->raw)) {
                best = &m;
                best_count = n;
            }
        }
        for (const auto& m : members) {
            if (m.raw != best->raw) mapping.add(m, best->raw, {flags_of[m], DecidedBy::HeuristicManual});
        }
    }
    return mapping;
}

CveCounter corpus_cve_counter(const Corpus& corpus) {
    return [&corpus](const NameKey& k) {
        return k.kind == NameKind::Vendor ? corpus.vendor_cve_count(k.raw) : corpus.product_cve_count(k.vendor, k.raw);
    };
}

ApplyResult apply_mapping(const Corpus& corpus, const NameMapping& mapping) {
    ApplyResult out;
    out.stats.vendors_before = corpus.vendor_index().size();
    out.stats.products_before = corpus.product_index().size();
    if (mapping.empty()) {
        out.corpus = corpus;
        out.stats.vendors_after = out.stats.vendors_before;
        out.stats.products_after = out.stats.products_before;
        return out;
    }
    Corpus::RecordMap records;
    for (const auto& [id, record] : corpus.records()) {
        CveRecord r = record;
        std::vector<CpeEntry> cpes;
        std::set<CpeEntry> seen;
        for (const auto& cpe : record.cpes) {
            CpeEntry c = cpe;
            c.vendor = mapping.resolve_vendor(cpe.vendor);
            c.product = mapping.resolve_product(c.vendor, cpe.product);
            if (c != cpe) ++out.stats.cpe_entries_rewritten;
            if (seen.insert(c).second) cpes.push_back(std::move(c));
        }
        r.cpes = std::move(cpes);
        if (r.cpes != record.cpes) ++out.stats.records_changed;
        records.emplace(id, std::move(r));
    }
    out.corpus = Corpus(std::move(records));
    out.stats.vendors_after = out.corpus.vendor_index().size();
    out.stats.products_after = out.corpus.product_index().size();
    return out;
}

std::vector<PairClassification> review_candidates(const Corpus& corpus, const DecisionSet& decisions) {
    auto pairs = candidate_vendor_pairs(corpus);
    const bool vendors_done = std::all_of(pairs.begin(), pairs.end(),
                                          [&](const auto& p) { return decisions.find(PairKey::of(p)) != nullptr; });
    if (!vendors_done) return pairs;
    const auto vendor_mapping = build_mapping(pairs, decisions, corpus_cve_counter(corpus));
    const auto consolidated = apply_mapping(corpus, vendor_mapping).corpus;
    auto products = candidate_product_pairs_all(consolidated);
    pairs.insert(pairs.end(), std::make_move_iterator(products.begin()), std::make_move_iterator(products.end()));
    return pairs;
}

Consolidation consolidate(const Corpus& corpus, const DecisionSet& decisions) {
    Consolidation out;
    out.vendor_pairs = candidate_vendor_pairs(corpus);
    const auto vendor_mapping = build_mapping(out.vendor_pairs, decisions, corpus_cve_counter(corpus));
    const auto consolidated = apply_mapping(corpus, vendor_mapping).corpus;
    out.product_pairs = candidate_product_pairs_all(consolidated);
    const auto product_mapping = build_mapping(out.product_pairs, decisions, corpus_cve_counter(consolidated));
    out.mapping = vendor_mapping;
    for (const auto& [key, canonical] : product_mapping.entries()) {
        out.mapping.add(key, canonical, product_mapping.provenance().at(key));
    }
    out.mapping.validate();
    return out;
}

ExternalRemapStats remap_external_vendor_list(const std::vector<std::string>& names, const NameMapping& mapping) {
    ExternalRemapStats out;
    std::set<std::string> targets;
    std::set<std::string> distinct;
    for (const auto& raw : names) {
        const auto name = to_lower(raw);
        if (!distinct.insert(name).second) continue;
        ++out.total;
        const auto canonical = mapping.resolve_vendor(name);
        if (canonical != name) {
            ++out.impacted;
            targets.insert(canonical);
        }
    }
    out.consolidated_targets = targets.size();
    return out;
}

// ---------------------------------------------------------------------------
// Pattern summary

std::string_view to_string(PatternCategory c) {
    switch (c) {
        case PatternCategory::Tokens: return "tokens";
        case PatternCategory::MpZero: return "mp=0";
        case PatternCategory::MpOne: return "mp=1";
        case PatternCategory::MpMany: return "mp>1";
        case PatternCategory::Prefix: return "pref";
        case PatternCategory::ProductAsVendor: return "pav";
    }
    return "";
}

PatternCell PatternStats::cell(PatternCategory c, LcsBand band, bool confirmed_only) const {
    const auto& table = confirmed_only ? confirmed : possible;
    auto it = table.find({c, band});
    return it == table.end() ? PatternCell{} : it->second;
}

std::string PatternStats::to_csv() const {
    std::string out = "category,lcs_band,possible_pairs,possible_names,confirmed_pairs,confirmed_names\n";
    const auto row = [&](PatternCategory c, LcsBand band) {
        const auto p = cell(c, band, false);
        const auto k = cell(c, band, true);
        out += std::string(to_string(c)) + "," + (band == LcsBand::AtLeast3 ? "lcs>=3" : "lcs<3") + "," +
               std::to_string(p.pairs) + "," + std::to_string(p.names) + "," + std::to_string(k.pairs) + "," +
               std::to_string(k.names) + "\n";
    };
    row(PatternCategory::Tokens, LcsBand::AtLeast3);
    for (auto band : {LcsBand::AtLeast3, LcsBand::Below3}) {
        for (auto c : {PatternCategory::MpZero, PatternCategory::MpOne, PatternCategory::MpMany,
                       PatternCategory::Prefix, PatternCategory::ProductAsVendor}) {
            row(c, band);
        }
    }
    return out;
}

PatternStats pattern_stats(const std::vector<PairClassification>& pairs, const DecisionSet& decisions) {
    using Cell = std::pair<PatternCategory, LcsBand>;
    std::map<Cell, std::set<PairKey>> possible_pairs, confirmed_pairs;
    for (const auto& p : pairs) {
        if (p.kind != NameKind::Vendor) continue;
        const auto key = PairKey::of(p);
        const auto* d = decisions.find(key);
        const bool confirmed = d && d->match;
        std::vector<Cell> cells;
        if (p.tokens_equal) {
            cells.push_back({PatternCategory::Tokens, LcsBand::AtLeast3});
        } else {
            if (p.matching_products == 0 && p.lcs_length == 0 && !p.is_prefix) continue;
            const auto band = p.lcs_length >= 3 ? LcsBand::AtLeast3 : LcsBand::Below3;
            const auto mp = p.matching_products == 0   ? PatternCategory::MpZero
                            : p.matching_products == 1 ? PatternCategory::MpOne
                                                       : PatternCategory::MpMany;
            cells.push_back({mp, band});
            if (p.is_prefix) cells.push_back({PatternCategory::Prefix, band});
            if (p.product_as_vendor) cells.push_back({PatternCategory::ProductAsVendor, band});
        }
        for (const auto& c : cells) {
            possible_pairs[c].insert(key);
            if (confirmed) confirmed_pairs[c].insert(key);
        }
    }
    const auto summarize = [](const std::map<Cell, std::set<PairKey>>& in) {
        std::map<Cell, PatternCell> out;
        for (const auto& [cell, keys] : in) {
            std::set<std::string> names;
            for (const auto& k : keys) {
                names.insert(k.first);
                names.insert(k.second);
            }
            out[cell] = PatternCell{keys.size(), names.size()};
        }
        return out;
    };
    PatternStats out;
    out.possible = summarize(possible_pairs);
    out.confirmed = summarize(confirmed_pairs);
    return out;
}

}  // namespace vulncure::names
