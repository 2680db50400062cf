#include "vulncure/analysis.hpp"

#include <algorithm>

#include <json.hpp>

#include "vulncure/io.hpp"

namespace vulncure::analysis {

namespace {

std::string percent(std::size_t part, std::size_t whole) {
    return io::format_fixed(whole ? 100.0 * static_cast<double>(part) / static_cast<double>(whole) : 0.0, 2);
}

std::optional<Date> date_of(const CveRecord& r, DateField field) {
    if (field == DateField::Published) return r.published;
    if (!r.edd) return std::nullopt;
    return r.edd->edd;
}

void require_dates(const Corpus& corpus, DateField field) {
    if (field != DateField::EDD) return;
    for (const auto& [id, r] : corpus.records()) {
        if (!r.edd) throw PreconditionError(id.str() + " has no disclosure estimate; run estimate-dates first");
    }
}

const std::vector<SeverityLabel>& labels_of(Scheme s) {
    static const std::vector<SeverityLabel> v2{SeverityLabel::Low, SeverityLabel::Medium, SeverityLabel::High};
    static const std::vector<SeverityLabel> v3{SeverityLabel::None, SeverityLabel::Low, SeverityLabel::Medium,
                                               SeverityLabel::High, SeverityLabel::Critical};
    return s == Scheme::V2 ? v2 : v3;
}

void require_scheme(const Corpus& corpus, Scheme scheme) {
    if (scheme != Scheme::PV3) return;
    for (const auto& [id, r] : corpus.records()) {
        if (r.v2 && !r.v3) {
            throw PreconditionError("predicted v3 labels are missing (" + id.str() + "); run backfill-v3 first");
        }
    }
}

int cwe_number(const std::string& id) { return std::stoi(id.substr(4)); }

}  // namespace

std::string_view to_string(CorpusTag tag) { return tag == CorpusTag::Raw ? "raw" : "corrected"; }

CorpusTag corpus_tag_from_string(std::string_view text) {
    if (text == "raw") return CorpusTag::Raw;
    if (text == "corrected") return CorpusTag::Corrected;
    throw FormatError("corpus must be raw or corrected, got '" + std::string(text) + "'");
}

std::string_view to_string(DateField f) { return f == DateField::Published ? "published" : "edd"; }

DateField date_field_from_string(std::string_view text) {
    if (text == "published") return DateField::Published;
    if (text == "edd") return DateField::EDD;
    throw FormatError("date field must be published or edd");
}

std::string_view to_string(Scheme s) {
    switch (s) {
        case Scheme::V2: return "v2";
        case Scheme::V3Feed: return "v3";
        case Scheme::PV3: return "pv3";
    }
    return "v2";
}

Scheme scheme_from_string(std::string_view text) {
    if (text == "v2") return Scheme::V2;
    if (text == "v3") return Scheme::V3Feed;
    if (text == "pv3") return Scheme::PV3;
    throw FormatError("scheme must be v2, v3 or pv3");
}

std::string_view weekday_name(unsigned iso_index) {
    static constexpr std::string_view names[] = {"Monday", "Tuesday",  "Wednesday", "Thursday",
                                                 "Friday", "Saturday", "Sunday"};
    if (iso_index > 6) throw RangeError("weekday index out of range");
    return names[iso_index];
}

std::optional<SeverityLabel> label_under(const CveRecord& r, Scheme scheme) {
    switch (scheme) {
        case Scheme::V2:
            if (r.v2) return r.v2->label();
            break;
        case Scheme::V3Feed:
            if (r.v3 && r.v3->provenance == Provenance::FromFeed) return r.v3->label;
            break;
        case Scheme::PV3:
            if (r.v3) return r.v3->label;
            break;
    }
    return std::nullopt;
}

std::string Report::to_csv() const {
    std::string out = io::csv_line(columns);
    for (const auto& row : rows) out += io::csv_line(row);
    return out;
}

std::string Report::to_json() const {
    nlohmann::ordered_json doc;
    doc["report"] = name;
    doc["corpus_tag"] = to_string(corpus_tag);
    doc["tool_version"] = kToolVersion;
    doc["parameters"] = parameters;
    doc["columns"] = columns;
    doc["rows"] = rows;
    return doc.dump(1) + "\n";
}

Report top_dates(const Corpus& corpus, DateField field, std::size_t n, CorpusTag tag) {
    require_dates(corpus, field);
    std::map<Date, std::size_t> per_date;
    std::map<int, std::size_t> per_year;
    for (const auto& [id, r] : corpus.records()) {
        const Date d = *date_of(r, field);
        ++per_date[d];
        ++per_year[d.year()];
    }
    std::vector<std::pair<Date, std::size_t>> sorted(per_date.begin(), per_date.end());
    std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    if (sorted.size() > n) sorted.resize(n);

    Report rep{"top_dates_" + std::string(to_string(field)), {"date", "day_of_week", "count", "percent_of_year"}, {}, tag,
               {{"date_field", std::string(to_string(field))}, {"n", std::to_string(n)}}};
    for (const auto& [d, count] : sorted) {
        rep.rows.push_back({d.iso(), std::string(weekday_name(d.iso_weekday_index())), std::to_string(count),
                            percent(count, per_year.at(d.year()))});
    }
    return rep;
}

Report day_of_week_histogram(const Corpus& corpus, DateField field, CorpusTag tag) {
    require_dates(corpus, field);
    std::array<std::size_t, 7> counts{};
    for (const auto& [id, r] : corpus.records()) ++counts[date_of(r, field)->iso_weekday_index()];
    Report rep{"day_of_week_" + std::string(to_string(field)), {"day_of_week", "count", "percent"}, {}, tag,
               {{"date_field", std::string(to_string(field))}}};
    for (unsigned i = 0; i < 7; ++i) {
        rep.rows.push_back({std::string(weekday_name(i)), std::to_string(counts[i]), percent(counts[i], corpus.size())});
    }
    return rep;
}

Report severity_distribution(const Corpus& corpus, Scheme scheme, bool by_year, CorpusTag tag) {
    require_scheme(corpus, scheme);
    // Year 0 holds the overall block.
    std::map<int, std::map<SeverityLabel, std::size_t>> counts;
    for (const auto& [id, r] : corpus.records()) {
        const auto label = label_under(r, scheme);
        if (!label) continue;
        ++counts[by_year ? r.published.year() : 0][*label];
    }
    Report rep;
    rep.name = "severity_" + std::string(to_string(scheme)) + (by_year ? "_by_year" : "");
    rep.corpus_tag = tag;
    rep.parameters = {{"scheme", std::string(to_string(scheme))}, {"by_year", by_year ? "true" : "false"}};
    rep.columns = by_year ? std::vector<std::string>{"year", "label", "count", "percent"}
                          : std::vector<std::string>{"label", "count", "percent"};
    if (!by_year && counts.empty()) counts[0];
    for (const auto& [year, per_label] : counts) {
        std::size_t total = 0;
        for (const auto& [l, c] : per_label) total += c;
        for (auto l : labels_of(scheme)) {
            const auto it = per_label.find(l);
            const std::size_t c = it == per_label.end() ? 0 : it->second;
            std::vector<std::string> row;
            if (by_year) row.push_back(std::to_string(year));
            row.insert(row.end(), {std::string(to_string(l)), std::to_string(c), percent(c, total)});
            rep.rows.push_back(std::move(row));
        }
    }
    return rep;
}

Report top_cwe_by_severity(const Corpus& corpus, Scheme scheme, SeverityLabel level, std::size_t n,
                           const cwe::CweCatalog* catalog, CorpusTag tag) {
    require_scheme(corpus, scheme);
    std::map<std::string, std::size_t> counts;
    for (const auto& [id, r] : corpus.records()) {
        if (label_under(r, scheme) != level) continue;
        for (const auto& c : r.cwe_ids) {
            if (!is_placeholder_cwe(c) && cwe::is_cwe_id(c)) ++counts[c];
        }
    }
    std::vector<std::pair<std::string, std::size_t>> sorted(counts.begin(), counts.end());
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return cwe_number(a.first) < cwe_number(b.first);
    });
    if (sorted.size() > n) sorted.resize(n);
    Report rep{"top_cwe_" + std::string(to_string(scheme)) + "_" + to_lower(to_string(level)),
               {"rank", "cwe", "name", "count"},
               {},
               tag,
               {{"scheme", std::string(to_string(scheme))}, {"level", std::string(to_string(level))}, {"n", std::to_string(n)}}};
    std::size_t rank = 0;
    for (const auto& [c, count] : sorted) {
        std::string name = catalog ? catalog->name(c).value_or("") : "";
        rep.rows.push_back({std::to_string(++rank), c, name, std::to_string(count)});
    }
    return rep;
}

Report top_vendors(const Corpus& corpus, VendorMetric metric, std::size_t n, CorpusTag tag) {
    std::vector<std::pair<std::string, std::size_t>> rows;
    std::size_t total = 0;
    if (metric == VendorMetric::CveCount) {
        total = corpus.size();
        for (const auto& [vendor, products] : corpus.vendor_index()) rows.emplace_back(vendor, corpus.vendor_cve_count(vendor));
    } else {
        total = corpus.product_index().size();
        for (const auto& [vendor, products] : corpus.vendor_index()) rows.emplace_back(vendor, products.size());
    }
    std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    if (rows.size() > n) rows.resize(n);
    const bool cves = metric == VendorMetric::CveCount;
    Report rep{cves ? "top_vendors_cves" : "top_vendors_products",
               {"rank", "vendor", cves ? "cves" : "products", "percent"},
               {},
               tag,
               {{"metric", cves ? "cve_count" : "product_count"}, {"n", std::to_string(n)}}};
    std::size_t rank = 0;
    for (const auto& [v, c] : rows) rep.rows.push_back({std::to_string(++rank), v, std::to_string(c), percent(c, total)});
    return rep;
}

Report mislabeled_severity_breakdown(const Corpus& raw, const Corpus& corrected, Scheme scheme) {
    if (raw.size() != corrected.size()) throw LookupError("raw and corrected corpora hold different record counts");
    std::map<SeverityLabel, std::pair<std::size_t, std::size_t>> counts;
    std::size_t unlabeled_vendor = 0, unlabeled_product = 0;
    for (const auto& [id, r] : raw.records()) {
        const auto* c = corrected.find(id);
        if (!c) throw LookupError(id.str() + " is missing from the corrected corpus");
        std::set<std::string> rv, cv, rp, cp;
        for (const auto& e : r.cpes) rv.insert(e.vendor), rp.insert(e.product);
        for (const auto& e : c->cpes) cv.insert(e.vendor), cp.insert(e.product);
        const bool vendor_changed = rv != cv;
        const bool product_changed = rp != cp;
        if (!vendor_changed && !product_changed) continue;
        if (const auto label = label_under(*c, scheme)) {
            counts[*label].first += vendor_changed ? 1 : 0;
            counts[*label].second += product_changed ? 1 : 0;
        } else {
            unlabeled_vendor += vendor_changed ? 1 : 0;
            unlabeled_product += product_changed ? 1 : 0;
        }
    }
    Report rep{"mislabeled_" + std::string(to_string(scheme)),
               {"label", "mislabeled_vendor", "mislabeled_product"},
               {},
               CorpusTag::Corrected,
               {{"scheme", std::string(to_string(scheme))}}};
    for (auto l : labels_of(scheme)) {
        const auto it = counts.find(l);
        const auto [v, p] = it == counts.end() ? std::pair<std::size_t, std::size_t>{0, 0} : it->second;
        rep.rows.push_back({std::string(to_string(l)), std::to_string(v), std::to_string(p)});
    }
    rep.rows.push_back({"unlabeled", std::to_string(unlabeled_vendor), std::to_string(unlabeled_product)});
    return rep;
}

}  // namespace vulncure::analysis
