#include "vulncure/cwe.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <regex>
#include <set>
#include <unordered_set>

#include "vulncure/ingest.hpp"
#include "vulncure/io.hpp"

namespace vulncure::cwe {

bool is_cwe_id(std::string_view text) {
    if (text.size() < 5 || text.substr(0, 4) != "CWE-") return false;
    return std::all_of(text.begin() + 4, text.end(), [](unsigned char c) { return std::isdigit(c); });
}

CweCatalog CweCatalog::parse(std::string_view tsv) {
    CweCatalog catalog;
    for (const auto& row : io::parse_tsv(tsv)) {
        if (row.size() < 2) throw FormatError("catalog row needs id and name: " + row.front());
        catalog.add(row[0], row[1]);
    }
    return catalog;
}

CweCatalog CweCatalog::load(const std::filesystem::path& file) { return parse(ingest::read_file(file)); }

void CweCatalog::add(const std::string& id, std::string name) {
    if (!is_cwe_id(id)) throw FormatError("not a CWE id: '" + id + "'");
    entries_[id] = std::move(name);
}

std::optional<std::string> CweCatalog::name(const std::string& id) const {
    if (auto it = entries_.find(id); it != entries_.end()) return it->second;
    return std::nullopt;
}

std::vector<std::string> extract_cwe_ids(std::string_view text) {
    static const std::regex pattern("CWE-[0-9]+", std::regex::icase | std::regex::optimize);
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (std::cregex_iterator it(text.data(), text.data() + text.size(), pattern), end; it != end; ++it) {
        std::string id = "CWE-" + it->str().substr(4);
        if (seen.insert(id).second) out.push_back(std::move(id));
    }
    return out;
}

const std::vector<std::string>& stop_words() {
    // The common NLTK English list.
    static const std::vector<std::string> words{
        "i", "me", "my", "myself", "we", "our", "ours", "ourselves", "you", "your", "yours", "yourself",
        "yourselves", "he", "him", "his", "himself", "she", "her", "hers", "herself", "it", "its", "itself",
        "they", "them", "their", "theirs", "themselves", "what", "which", "who", "whom", "this", "that", "these",
        "those", "am", "is", "are", "was", "were", "be", "been", "being", "have", "has", "had", "having", "do",
        "does", "did", "doing", "a", "an", "the", "and", "but", "if", "or", "because", "as", "until", "while",
        "of", "at", "by", "for", "with", "about", "against", "between", "into", "through", "during", "before",
        "after", "above", "below", "to", "from", "up", "down", "in", "out", "on", "off", "over", "under", "again",
        "further", "then", "once", "here", "there", "when", "where", "why", "how", "all", "any", "both", "each",
        "few", "more", "most", "other", "some", "such", "no", "nor", "not", "only", "own", "same", "so", "than",
        "too", "very", "s", "t", "can", "will", "just", "don", "should", "now", "d", "ll", "m", "o", "re", "ve",
        "y", "ain", "aren", "couldn", "didn", "doesn", "hadn", "hasn", "haven", "isn", "ma", "mightn", "mustn",
        "needn", "shan", "shouldn", "wasn", "weren", "won", "wouldn", "could", "would", "may", "might", "must"};
    return words;
}

namespace {

bool is_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

// Regular past tense only; irregular forms are left alone.
std::string base_form(const std::string& w) {
    if (w.size() < 4 || w.compare(w.size() - 2, 2, "ed") != 0) return w;
    if (w.size() >= 5 && w.compare(w.size() - 3, 3, "eed") == 0) return w;
    std::string stem = w.substr(0, w.size() - 2);
    if (std::none_of(stem.begin(), stem.end(), is_vowel)) return w;  // "shed", "red"
    if (stem.size() >= 2 && stem.back() == 'i' && !is_vowel(stem[stem.size() - 2])) {
        stem.back() = 'y';  // "specified"
        return stem;
    }
    const char last = stem.back();
    const char prev = stem.size() >= 2 ? stem[stem.size() - 2] : '\0';
    if (last == prev && !is_vowel(last) && last != 's' && last != 'l' && last != 'f' && last != 'z') {
        stem.pop_back();  // "stopped", "submitted"
        return stem;
    }
    if (is_vowel(last)) return w;  // "agreed"-like forms already handled; keep "freed"
    if ((last == 'c' || last == 'g' || last == 's' || last == 'v' || last == 'z') && prev != last &&
        (is_vowel(prev) || prev == 'r' || prev == 'n' || prev == 'l')) {
        return stem + "e";  // "used", "caused", "forced", "managed", "received"
    }
    if (last == 't' && prev == 'a' && stem.size() >= 6) return stem + "e";  // "validated", "truncated"
    return stem;
}

std::string expand_contractions(std::string text) {
    // Typographic apostrophe to ASCII first.
    for (std::size_t p; (p = text.find("\xE2\x80\x99")) != std::string::npos;) text.replace(p, 3, "'");
    static const std::pair<const char*, const char*> fixed[] = {{"can't", "can not"}, {"won't", "will not"},
                                                                {"shan't", "shall not"}};
    for (const auto& [from, to] : fixed) {
        for (std::size_t p; (p = text.find(from)) != std::string::npos;) text.replace(p, std::strlen(from), to);
    }
    static const std::pair<const char*, const char*> suffixes[] = {
        {"n't", " not"}, {"'re", " are"}, {"'ve", " have"}, {"'ll", " will"}, {"'d", " would"}, {"'m", " am"}, {"'s", ""}};
    for (const auto& [from, to] : suffixes) {
        const std::size_t len = std::strlen(from);
        std::size_t p = 0;
        while ((p = text.find(from, p)) != std::string::npos) {
            const std::size_t after = p + len;
            if (after < text.size() && std::isalnum(static_cast<unsigned char>(text[after]))) {
                p = after;
                continue;
            }
            text.replace(p, len, to);
            p += std::strlen(to);
        }
    }
    return text;
}

}  // namespace

std::string preprocess_description(std::string_view text) {
    static const std::unordered_set<std::string> stops(stop_words().begin(), stop_words().end());
    std::string s = expand_contractions(to_lower(text));
    for (auto& c : s) {
        if (!std::isalnum(static_cast<unsigned char>(c))) c = ' ';
    }
    std::string out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && s[i] == ' ') ++i;
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ') ++j;
        if (j > i) {
            const std::string word = s.substr(i, j - i);
            if (!stops.contains(word)) {
                if (!out.empty()) out.push_back(' ');
                out += base_form(word);
            }
        }
        i = j;
    }
    return out;
}

MergeResult merge_cwe(const CveRecord& record, const CweCatalog& catalog) {
    MergeResult out{record, false, {}};
    std::set<std::string> merged = record.cwe_ids;
    for (const auto& d : record.descriptions) {
        for (auto& id : extract_cwe_ids(d)) {
            if (!catalog.contains(id)) {
                if (!record.cwe_ids.contains(id) &&
                    std::find(out.quarantined.begin(), out.quarantined.end(), id) == out.quarantined.end()) {
                    out.quarantined.push_back(id);
                }
                continue;
            }
            merged.insert(std::move(id));
        }
    }
    const bool concrete = std::any_of(merged.begin(), merged.end(), [](const auto& c) { return !is_placeholder_cwe(c); });
    if (concrete) std::erase_if(merged, [](const auto& c) { return is_placeholder_cwe(c); });
    out.changed = merged != record.cwe_ids;
    out.record.cwe_ids = std::move(merged);
    return out;
}

CorpusMerge merge_corpus(const Corpus& corpus, const CweCatalog& catalog) {
    CorpusMerge out;
    Corpus::RecordMap records;
    for (const auto& [id, r] : corpus.records()) {
        auto m = merge_cwe(r, catalog);
        if (m.changed) ++out.changed;
        for (auto& q : m.quarantined) out.quarantined.push_back({id, std::move(q)});
        records.emplace(id, std::move(m.record));
    }
    out.corpus = Corpus(std::move(records));
    return out;
}

namespace {

enum class Gap { None, Other, NoInfo, Unassigned };

Gap gap_of(const std::set<std::string>& ids) {
    if (std::any_of(ids.begin(), ids.end(), [](const auto& c) { return !is_placeholder_cwe(c); })) return Gap::None;
    if (ids.contains("NVD-CWE-Other")) return Gap::Other;
    if (ids.contains("NVD-CWE-noinfo")) return Gap::NoInfo;
    return Gap::Unassigned;
}

std::size_t concrete_count(const std::set<std::string>& ids) {
    return static_cast<std::size_t>(std::count_if(ids.begin(), ids.end(), [](const auto& c) { return !is_placeholder_cwe(c); }));
}

}  // namespace

GapReport cwe_gap_report(const Corpus& before, const Corpus& after) {
    if (before.size() != after.size()) throw LookupError("corpora hold different record counts");
    GapReport r;
    for (const auto& [id, raw] : before.records()) {
        const auto* merged = after.find(id);
        if (!merged) throw LookupError(id.str() + " is missing from the merged corpus");
        const bool fixed = gap_of(merged->cwe_ids) == Gap::None;
        switch (gap_of(raw.cwe_ids)) {
            case Gap::Other:
                ++r.other;
                r.fixed_other += fixed ? 1 : 0;
                break;
            case Gap::NoInfo:
                ++r.noinfo;
                r.fixed_noinfo_or_unassigned += fixed ? 1 : 0;
                break;
            case Gap::Unassigned:
                ++r.unassigned;
                r.fixed_noinfo_or_unassigned += fixed ? 1 : 0;
                break;
            case Gap::None:
                r.augmented += concrete_count(merged->cwe_ids) > concrete_count(raw.cwe_ids) ? 1 : 0;
                break;
        }
    }
    return r;
}

std::string GapReport::to_csv() const {
    std::string out = "metric,value\n";
    out += "other," + std::to_string(other) + "\n";
    out += "noinfo," + std::to_string(noinfo) + "\n";
    out += "unassigned," + std::to_string(unassigned) + "\n";
    out += "fixed_other," + std::to_string(fixed_other) + "\n";
    out += "fixed_noinfo_or_unassigned," + std::to_string(fixed_noinfo_or_unassigned) + "\n";
    out += "augmented," + std::to_string(augmented) + "\n";
    return out;
}

}  // namespace vulncure::cwe
