#include "vulncure/dates.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <regex>
#include <sstream>

#include "vulncure/io.hpp"

namespace vulncure::dates {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Domains

namespace {

// Second-level registries under country-code TLDs seen among NVD references.
const std::set<std::string>& two_label_suffixes() {
    static const std::set<std::string> s{
        "co.uk", "org.uk", "ac.uk", "gov.uk", "ltd.uk", "me.uk",  "co.jp", "ne.jp", "or.jp",  "ac.jp",
        "go.jp", "com.au", "net.au", "org.au", "edu.au", "gov.au", "com.br", "net.br", "org.br", "com.cn",
        "net.cn", "org.cn", "edu.cn", "gov.cn", "com.tw", "org.tw", "co.kr", "or.kr", "co.in", "co.nz",
        "org.nz", "co.za", "com.mx", "com.ar", "com.tr", "com.ru", "com.pl", "co.il", "com.sg", "com.hk"};
    return s;
}

bool is_ipv4(std::string_view host) {
    int dots = 0;
    for (char c : host) {
        if (c == '.') ++dots;
        else if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    }
    return dots == 3;
}

}  // namespace

std::string extract_domain(std::string_view url) {
    const auto fail = [&] { return FormatError("not an absolute URL: '" + std::string(url) + "'"); };
    const auto sep = url.find("://");
    if (sep == std::string_view::npos || sep == 0) throw fail();
    for (std::size_t i = 0; i < sep; ++i) {
        const auto c = static_cast<unsigned char>(url[i]);
        if (!(std::isalnum(c) || c == '+' || c == '-' || c == '.') || (i == 0 && !std::isalpha(c))) throw fail();
    }
    auto authority = url.substr(sep + 3);
    authority = authority.substr(0, authority.find_first_of("/?#"));
    if (auto at = authority.rfind('@'); at != std::string_view::npos) authority.remove_prefix(at + 1);

    std::string host;
    if (!authority.empty() && authority.front() == '[') {
        const auto close = authority.find(']');
        if (close == std::string_view::npos) throw fail();
        return to_lower(authority.substr(1, close - 1));
    }
    host = to_lower(authority.substr(0, authority.find(':')));
    while (!host.empty() && host.back() == '.') host.pop_back();
    if (host.empty()) throw fail();
    for (char c : host) {
        const auto u = static_cast<unsigned char>(c);
        if (!(std::isalnum(u) || c == '-' || c == '.' || c == '_')) throw fail();
    }
    if (is_ipv4(host)) return host;

    std::vector<std::string_view> labels;
    std::string_view rest = host;
    while (true) {
        const auto dot = rest.find('.');
        labels.push_back(rest.substr(0, dot));
        if (dot == std::string_view::npos) break;
        rest.remove_prefix(dot + 1);
    }
    if (std::any_of(labels.begin(), labels.end(), [](auto l) { return l.empty(); })) throw fail();
    if (labels.size() <= 2) return host;

    const std::string last_two = std::string(labels[labels.size() - 2]) + "." + std::string(labels.back());
    const std::size_t keep = two_label_suffixes().contains(last_two) ? 3 : 2;
    std::string out;
    for (std::size_t i = labels.size() - keep; i < labels.size(); ++i) {
        if (!out.empty()) out.push_back('.');
        out.append(labels[i]);
    }
    return out;
}

double DomainCoverage::coverage_at(std::size_t k) const {
    if (total_urls == 0) return 0.0;
    std::size_t covered = 0;
    for (std::size_t i = 0; i < std::min(k, ranked.size()); ++i) covered += ranked[i].second;
    return static_cast<double>(covered) / static_cast<double>(total_urls);
}

DomainCoverage rank_domains(const Corpus& corpus) {
    DomainCoverage out;
    std::map<std::string, std::size_t> counts;
    for (const auto& [id, r] : corpus.records()) {
        for (const auto& ref : r.references) {
            try {
                ++counts[extract_domain(ref.url)];
                ++out.total_urls;
            } catch (const FormatError&) {
                ++out.unparseable_urls;
            }
        }
    }
    out.ranked.assign(counts.begin(), counts.end());
    std::stable_sort(out.ranked.begin(), out.ranked.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    return out;
}

// ---------------------------------------------------------------------------
// Page date extraction

namespace {

std::optional<unsigned> month_from_name(std::string_view name) {
    static constexpr std::array<std::string_view, 12> names{"jan", "feb", "mar", "apr", "may", "jun",
                                                            "jul", "aug", "sep", "oct", "nov", "dec"};
    if (name.size() < 3) return std::nullopt;
    const auto lower = to_lower(name);
    for (unsigned i = 0; i < names.size(); ++i) {
        if (lower.compare(0, 3, names[i]) == 0) return i + 1;
    }
    return std::nullopt;
}

std::optional<Date> make_date(int y, unsigned m, unsigned d) {
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
    if (!ymd.ok() || y < 1970 || y > 2100) return std::nullopt;
    return Date{std::chrono::sys_days{ymd}};
}

const std::string kMonth =
    "(jan(?:uary)?|feb(?:ruary)?|mar(?:ch)?|apr(?:il)?|may|june?|july?|aug(?:ust)?|sep(?:t(?:ember)?)?|"
    "oct(?:ober)?|nov(?:ember)?|dec(?:ember)?)";

const std::regex& iso_re() {
    static const std::regex re(R"((?:^|[^0-9])((?:19|20)[0-9]{2})-([01][0-9])-([0-3][0-9])(?![0-9]))");
    return re;
}
const std::regex& month_day_year_re() {
    static const std::regex re("\\b" + kMonth + "\\.? +([0-3]?[0-9]),? +((?:19|20)[0-9]{2})\\b", std::regex::icase);
    return re;
}
const std::regex& day_month_year_re() {
    static const std::regex re("\\b([0-3]?[0-9]) +" + kMonth + "\\.?,? +((?:19|20)[0-9]{2})\\b", std::regex::icase);
    return re;
}
const std::regex& meta_tag_re() {
    static const std::regex re(R"(<meta\b[^>]*>)", std::regex::icase);
    return re;
}
const std::regex& attr_re() {
    static const std::regex re(R"re(([a-zA-Z:_-]+)\s*=\s*(?:"([^"]*)"|'([^']*)'))re");
    return re;
}

using Scanner = std::vector<Date> (*)(std::string_view, bool);

std::vector<Date> scan_iso(std::string_view text, bool all) {
    std::vector<Date> out;
    for (std::cregex_iterator it(text.data(), text.data() + text.size(), iso_re()), end; it != end; ++it) {
        const auto& m = *it;
        if (auto d = make_date(std::stoi(m[1]), static_cast<unsigned>(std::stoi(m[2])),
                               static_cast<unsigned>(std::stoi(m[3])))) {
            out.push_back(*d);
            if (!all) break;
        }
    }
    return out;
}

std::vector<Date> scan_month_day_year(std::string_view text, bool all) {
    std::vector<Date> out;
    for (std::cregex_iterator it(text.data(), text.data() + text.size(), month_day_year_re()), end; it != end; ++it) {
        const auto& m = *it;
        if (auto d = make_date(std::stoi(m[3]), *month_from_name(m[1].str()), static_cast<unsigned>(std::stoi(m[2])))) {
            out.push_back(*d);
            if (!all) break;
        }
    }
    return out;
}

std::vector<Date> scan_day_month_year(std::string_view text, bool all) {
    std::vector<Date> out;
    for (std::cregex_iterator it(text.data(), text.data() + text.size(), day_month_year_re()), end; it != end; ++it) {
        const auto& m = *it;
        if (auto d = make_date(std::stoi(m[3]), *month_from_name(m[2].str()), static_cast<unsigned>(std::stoi(m[1])))) {
            out.push_back(*d);
            if (!all) break;
        }
    }
    return out;
}

std::optional<Date> parse_loose_date(std::string_view text) {
    for (Scanner s : {scan_iso, scan_month_day_year, scan_day_month_year}) {
        if (auto found = s(text, false); !found.empty()) return found.front();
    }
    return std::nullopt;
}

bool is_publication_meta(const std::string& key) {
    static const std::set<std::string> keys{
        "article:published_time", "og:published_time", "date",          "dc.date",
        "dc.date.issued",         "dc.date.created",   "dcterms.issued", "dcterms.created",
        "dcterms.date",           "pubdate",           "publishdate",   "publish-date",
        "publish_date",           "publication_date",  "citation_publication_date",
        "citation_date",          "datepublished",     "sailthru.date", "parsely-pub-date"};
    return keys.contains(key);
}

std::vector<Date> scan_meta(std::string_view html, bool all) {
    std::vector<Date> out;
    for (std::cregex_iterator it(html.data(), html.data() + html.size(), meta_tag_re()), end; it != end; ++it) {
        const std::string tag = (*it)[0].str();
        bool publication = false;
        std::optional<std::string> content;
        for (std::sregex_iterator a(tag.begin(), tag.end(), attr_re()), aend; a != aend; ++a) {
            const auto name = to_lower((*a)[1].str());
            const auto value = (*a)[2].matched ? (*a)[2].str() : (*a)[3].str();
            if (name == "name" || name == "property" || name == "itemprop" || name == "http-equiv") {
                publication = publication || is_publication_meta(to_lower(value));
            } else if (name == "content") {
                content = value;
            }
        }
        if (publication && content) {
            if (auto d = parse_loose_date(*content)) {
                out.push_back(*d);
                if (!all) break;
            }
        }
    }
    return out;
}

// Visible text with tags and entity spacing collapsed; keeps numeric dates
// split across inline tags matchable.
std::string strip_tags(std::string_view html) {
    static const std::regex drop(R"(<(script|style)\b[^>]*>[\s\S]*?</\1\s*>)", std::regex::icase);
    std::string without_code = std::regex_replace(std::string(html), drop, " ");
    std::string out;
    out.reserve(without_code.size());
    bool in_tag = false;
    for (char c : without_code) {
        if (c == '<') in_tag = true;
        else if (c == '>' && in_tag) {
            in_tag = false;
            out.push_back(' ');
        } else if (!in_tag) out.push_back(c == '\n' || c == '\t' || c == '\r' ? ' ' : c);
    }
    static const std::regex nbsp("&nbsp;|&#160;", std::regex::icase);
    return std::regex_replace(out, nbsp, " ");
}

std::optional<Date> first_capture_date(std::string_view html, const std::regex& re) {
    std::cmatch m;
    if (!std::regex_search(html.data(), html.data() + html.size(), m, re)) return std::nullopt;
    return parse_loose_date(m[1].str());
}

// SecurityFocus BID pages: "Published: Feb 07 2011 12:00AM".
std::optional<Date> securityfocus_date(std::string_view html) {
    static const std::regex re(R"(Published:\s*(?:<[^>]+>\s*)*([A-Za-z]{3,9}\s+[0-9]{1,2}\s+[0-9]{4}))", std::regex::icase);
    std::cmatch m;
    if (!std::regex_search(html.data(), html.data() + html.size(), m, re)) return std::nullopt;
    std::istringstream ss(m[1].str());
    std::string mon;
    unsigned day = 0;
    int year = 0;
    ss >> mon >> day >> year;
    auto month = month_from_name(mon);
    if (!month) return std::nullopt;
    return make_date(year, *month, day);
}

// SecurityTracker alerts: "Date:  Feb 7 2011" near the alert header.
std::optional<Date> securitytracker_date(std::string_view html) {
    static const std::regex re(R"((?:^|[^a-z])Date:\s*(?:<[^>]+>\s*)*([A-Za-z]{3,9})\.?\s+([0-9]{1,2}),?\s+([0-9]{4}))",
                               std::regex::icase);
    std::cmatch m;
    if (!std::regex_search(html.data(), html.data() + html.size(), m, re)) return std::nullopt;
    auto month = month_from_name(m[1].str());
    if (!month) return std::nullopt;
    return make_date(std::stoi(m[3]), *month, static_cast<unsigned>(std::stoi(m[2])));
}

// Bugzilla show_bug pages: "Reported: 2011-02-07 10:12 UTC by ..." / "Opened:".
std::optional<Date> bugzilla_date(std::string_view html) {
    static const std::regex re(R"((?:Reported|Opened):?\s*(?:<[^>]+>\s*)*((?:19|20)[0-9]{2}-[01][0-9]-[0-3][0-9]))",
                               std::regex::icase);
    return first_capture_date(html, re);
}

}  // namespace

std::optional<Date> generic_page_date(std::string_view html, DateMatchPolicy policy) {
    const bool all = policy == DateMatchPolicy::EarliestMatch;
    std::vector<Date> found = scan_meta(html, all);
    if (!all && !found.empty()) return found.front();
    const std::string text = strip_tags(html);
    for (Scanner s : {scan_iso, scan_month_day_year, scan_day_month_year}) {
        auto more = s(text, all);
        if (!all && !more.empty()) return more.front();
        found.insert(found.end(), more.begin(), more.end());
    }
    if (found.empty()) return std::nullopt;
    return *std::min_element(found.begin(), found.end());
}

ExtractorRegistry ExtractorRegistry::with_defaults(DateMatchPolicy policy) {
    ExtractorRegistry r(policy);
    r.add("securityfocus.com", securityfocus_date);
    r.add("securitytracker.com", securitytracker_date);
    for (const char* d : {"mozilla.org", "redhat.com", "novell.com", "suse.com", "gentoo.org", "kde.org", "gnome.org",
                          "wireshark.org", "freedesktop.org", "kernel.org", "mageia.org", "apache.org"}) {
        r.add(d, bugzilla_date);
    }
    return r;
}

void ExtractorRegistry::add(std::string domain, PageDateExtractor extractor) {
    extractors_.insert_or_assign(std::move(domain), std::move(extractor));
}

std::optional<Date> ExtractorRegistry::extract(const std::string& domain, std::string_view html) const {
    if (auto it = extractors_.find(domain); it != extractors_.end()) {
        if (auto d = it->second(html)) return d;
    }
    return generic_page_date(html, policy_);
}

std::optional<Date> extract_page_date(const std::string& domain, std::string_view html,
                                      const ExtractorRegistry& registry) {
    return registry.extract(domain, html);
}

// ---------------------------------------------------------------------------
// Page store

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw Error("SHA-256 digest failed");
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

PageStore::PageStore(fs::path root, FetchHook fetch) : root_(std::move(root)), fetch_(std::move(fetch)) {}

fs::path PageStore::page_path(const std::string& url) const {
    return root_ / extract_domain(url) / (sha256_hex(url) + ".html");
}

std::optional<std::string> PageStore::load(const std::string& url) const {
    fs::path path;
    try {
        path = page_path(url);
    } catch (const FormatError&) {
        return std::nullopt;
    }
    std::error_code ec;
    if (fs::is_regular_file(path, ec)) {
        std::ifstream in(path, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }
    if (fetch_) {
        if (auto body = fetch_(url)) {
            store(url, *body);
            return body;
        }
    }
    return std::nullopt;
}

void PageStore::store(const std::string& url, std::string_view html) const {
    const auto path = page_path(url);
    fs::create_directories(path.parent_path());
    io::write_atomic(path, html);
    auto sidecar = path;
    sidecar.replace_extension(".url");
    io::write_atomic(sidecar, url + "\n");
}

// ---------------------------------------------------------------------------
// Estimation

DisclosureEstimate estimate_disclosure(const CveRecord& record,
                                       const std::vector<std::pair<std::string, Date>>& page_dates) {
    DisclosureEstimate est;
    est.edd = record.published;
    est.source = DisclosureSource::NvdPublished;
    for (const auto& [url, date] : page_dates) {
        if (date > record.published) continue;
        const bool earlier = date < est.edd;
        const bool first_tie = date == est.edd && est.source == DisclosureSource::NvdPublished;
        if (earlier || first_tie) {
            est.edd = date;
            est.source = DisclosureSource::ReferencePage;
            est.source_url = url;
        }
    }
    est.lag_days = days_between(est.edd, record.published);
    return est;
}

std::vector<std::pair<std::string, Date>> collect_page_dates(const CveRecord& record, const PageStore& store,
                                                             const ExtractorRegistry& registry) {
    std::vector<std::pair<std::string, Date>> out;
    for (const auto& ref : record.references) {
        std::string domain;
        try {
            domain = extract_domain(ref.url);
        } catch (const FormatError&) {
            continue;
        }
        if (auto html = store.load(ref.url)) {
            if (auto d = registry.extract(domain, *html)) out.emplace_back(ref.url, *d);
        }
    }
    return out;
}

EstimationResult estimate_corpus(const Corpus& corpus, const PageStore& store, const ExtractorRegistry& registry) {
    EstimationResult out;
    Corpus::RecordMap records;
    for (const auto& [id, record] : corpus.records()) {
        CveRecord r = record;
        std::vector<std::pair<std::string, Date>> page_dates;
        for (const auto& ref : r.references) {
            std::string domain;
            try {
                domain = extract_domain(ref.url);
            } catch (const FormatError&) {
                continue;
            }
            auto html = store.load(ref.url);
            if (!html) continue;
            ++out.stats.pages_found;
            if (auto d = registry.extract(domain, *html)) {
                ++out.stats.pages_dated;
                if (*d > r.published) ++out.stats.pages_after_published;
                page_dates.emplace_back(ref.url, *d);
            }
        }
        r.edd = estimate_disclosure(r, page_dates);
        if (r.edd->lag_days > 0) ++out.stats.improved;
        ++out.stats.records;
        records.emplace(id, std::move(r));
    }
    out.corpus = Corpus(std::move(records));
    return out;
}

// ---------------------------------------------------------------------------
// Lag statistics

std::vector<LagRow> lag_cdf(const Corpus& corpus) {
    std::map<std::int64_t, std::size_t> counts;
    for (const auto& [id, r] : corpus.records()) {
        if (!r.edd) throw PreconditionError("no disclosure estimate for " + id.str() + " (run estimate-dates first)");
        ++counts[r.edd->lag_days];
    }
    std::vector<LagRow> out;
    std::size_t running = 0;
    const auto total = static_cast<double>(corpus.size());
    for (const auto& [lag, n] : counts) {
        running += n;
        out.push_back({lag, n, static_cast<double>(running) / total});
    }
    return out;
}

double cdf_at(const std::vector<LagRow>& table, std::int64_t days) {
    double value = 0.0;
    for (const auto& row : table) {
        if (row.lag_days > days) break;
        value = row.cumulative_fraction;
    }
    return value;
}

std::string lag_cdf_csv(const std::vector<LagRow>& table) {
    std::string out = "lag_days,count,cumulative_fraction\n";
    for (const auto& row : table) {
        out += std::to_string(row.lag_days) + "," + std::to_string(row.count) + "," +
               io::format_fixed(row.cumulative_fraction, 6) + "\n";
    }
    return out;
}

std::map<SeverityLabel, double> lag_by_severity(const Corpus& corpus) {
    std::map<SeverityLabel, std::pair<double, std::size_t>> sums;
    for (const auto& [id, r] : corpus.records()) {
        if (!r.edd || !r.v3) continue;
        auto& [sum, n] = sums[r.v3->label];
        sum += static_cast<double>(r.edd->lag_days);
        ++n;
    }
    std::map<SeverityLabel, double> out;
    for (const auto& [label, sn] : sums) out[label] = sn.first / static_cast<double>(sn.second);
    return out;
}

}  // namespace vulncure::dates
