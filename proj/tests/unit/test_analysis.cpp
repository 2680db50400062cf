#include <doctest.h>

#include <json.hpp>

#include "helpers.hpp"
#include "vulncure/analysis.hpp"

using namespace vulncure;
using namespace vulncure::analysis;
using testing::make_record;

namespace {

using Rows = std::vector<std::vector<std::string>>;

Corpus sample_corpus() {
    return Corpus(std::vector<CveRecord>{
        make_record({.id = "CVE-2004-0001", .published = "2004-12-31", .cpes = {{"microsoft", "windows"}}, .v2 = 7.5,
                     .cwes = {"CWE-79"}}),
        make_record({.id = "CVE-2004-0002", .published = "2004-12-31", .cpes = {{"microsoft", "office"}}, .v2 = 5.0,
                     .cwes = {"CWE-89"}}),
        make_record({.id = "CVE-2004-0003", .published = "2004-06-01", .cpes = {{"apache", "http_server"}}, .v2 = 2.0,
                     .cwes = {"NVD-CWE-Other"}}),
        make_record({.id = "CVE-2004-0004", .published = "2004-06-01", .cpes = {{"apache", "http_server"}}, .v2 = 10.0,
                     .cwes = {"CWE-20", "CWE-79"}}),
        make_record({.id = "CVE-2017-0001", .published = "2017-01-02", .cpes = {{"microsoft", "windows"}}, .v2 = 9.3,
                     .v3 = 9.8, .cwes = {"CWE-20"}}),
        make_record({.id = "CVE-2017-0002", .published = "2017-01-03", .cpes = {{"google", "chrome"}}, .v2 = 4.3,
                     .v3 = 6.1, .cwes = {"CWE-79"}}),
    });
}

}  // namespace

TEST_CASE("top dates") {
    const auto r = top_dates(sample_corpus(), DateField::Published, 3);
    CHECK(r.columns == std::vector<std::string>{"date", "day_of_week", "count", "percent_of_year"});
    CHECK(r.rows == Rows{{"2004-06-01", "Tuesday", "2", "50.00"},
                         {"2004-12-31", "Friday", "2", "50.00"},
                         {"2017-01-02", "Monday", "1", "50.00"}});
    CHECK_THROWS_AS(top_dates(sample_corpus(), DateField::EDD), PreconditionError);
}

TEST_CASE("day of week histogram") {
    const auto r = day_of_week_histogram(sample_corpus(), DateField::Published);
    REQUIRE(r.rows.size() == 7);
    CHECK(r.rows[0] == std::vector<std::string>{"Monday", "1", "16.67"});
    CHECK(r.rows[1] == std::vector<std::string>{"Tuesday", "3", "50.00"});
    CHECK(r.rows[4] == std::vector<std::string>{"Friday", "2", "33.33"});
    CHECK(r.rows[6] == std::vector<std::string>{"Sunday", "0", "0.00"});
}

TEST_CASE("severity distributions") {
    const auto c = sample_corpus();
    const auto v2 = severity_distribution(c, Scheme::V2);
    CHECK(v2.rows == Rows{{"LOW", "1", "16.67"}, {"MEDIUM", "2", "33.33"}, {"HIGH", "3", "50.00"}});
    const auto v3 = severity_distribution(c, Scheme::V3Feed);
    REQUIRE(v3.rows.size() == 5);
    CHECK(v3.rows[2] == std::vector<std::string>{"MEDIUM", "1", "50.00"});
    CHECK(v3.rows[4] == std::vector<std::string>{"CRITICAL", "1", "50.00"});
    const auto by_year = severity_distribution(c, Scheme::V2, true);
    CHECK(by_year.columns.front() == "year");
    CHECK(by_year.rows.size() == 6);
    CHECK(by_year.rows[2] == std::vector<std::string>{"2004", "HIGH", "2", "50.00"});
    CHECK_THROWS_AS(severity_distribution(c, Scheme::PV3), PreconditionError);

    Corpus::RecordMap filled = c.records();
    for (auto& [id, r] : filled) {
        if (!r.v3) r.v3 = CvssV3Assessment::make(8.0, Provenance::Predicted);
    }
    const auto pv3 = severity_distribution(Corpus(filled), Scheme::PV3);
    CHECK(pv3.rows[3] == std::vector<std::string>{"HIGH", "4", "66.67"});
    CHECK(label_under(filled.begin()->second, Scheme::V3Feed) == std::nullopt);
    CHECK(label_under(filled.begin()->second, Scheme::PV3) == SeverityLabel::High);
}

TEST_CASE("top cwe by severity") {
    cwe::CweCatalog cat;
    cat.add("CWE-79", "Cross-site Scripting");
    const auto r = top_cwe_by_severity(sample_corpus(), Scheme::V2, SeverityLabel::High, 10, &cat);
    CHECK(r.name == "top_cwe_v2_high");
    // CWE-20 and CWE-79 each on two High records; placeholders never appear.
    CHECK(r.rows == Rows{{"1", "CWE-20", "", "2"}, {"2", "CWE-79", "Cross-site Scripting", "2"}});
    const auto crit = top_cwe_by_severity(sample_corpus(), Scheme::V3Feed, SeverityLabel::Critical);
    CHECK(crit.rows == Rows{{"1", "CWE-20", "", "1"}});

    // Ties break on the CWE number, not the string.
    Corpus tie(std::vector<CveRecord>{make_record({.id = "CVE-2017-0001", .v2 = 8.0, .cwes = {"CWE-100", "CWE-20"}})});
    const auto t = top_cwe_by_severity(tie, Scheme::V2, SeverityLabel::High);
    CHECK(t.rows[0][1] == "CWE-20");
}

TEST_CASE("top vendors") {
    const auto cves = top_vendors(sample_corpus(), VendorMetric::CveCount, 2);
    CHECK(cves.rows == Rows{{"1", "microsoft", "3", "50.00"}, {"2", "apache", "2", "33.33"}});
    const auto products = top_vendors(sample_corpus(), VendorMetric::ProductCount, 1);
    CHECK(products.rows == Rows{{"1", "microsoft", "2", "50.00"}});
}

TEST_CASE("mislabeled breakdown") {
    const auto raw = sample_corpus();
    Corpus::RecordMap fixed = raw.records();
    fixed.at(CveId::parse("CVE-2004-0001")).cpes = {{"microsoft", "windows_xp", std::nullopt}};
    fixed.at(CveId::parse("CVE-2004-0003")).cpes = {{"apache_foundation", "http_server", std::nullopt}};
    fixed.at(CveId::parse("CVE-2017-0001")).cpes = {{"msft", "win", std::nullopt}};
    const auto r = mislabeled_severity_breakdown(raw, Corpus(fixed), Scheme::V2);
    CHECK(r.rows == Rows{{"LOW", "1", "0"}, {"MEDIUM", "0", "0"}, {"HIGH", "1", "2"}, {"unlabeled", "0", "0"}});
    CHECK_THROWS_AS(mislabeled_severity_breakdown(raw, Corpus(std::vector<CveRecord>{}), Scheme::V2), LookupError);
}

TEST_CASE("report renderings") {
    const auto r = top_vendors(sample_corpus(), VendorMetric::CveCount, 1, CorpusTag::Corrected);
    CHECK(r.to_csv() == "rank,vendor,cves,percent\n1,microsoft,3,50.00\n");
    const auto j = nlohmann::json::parse(r.to_json());
    CHECK(j["report"] == "top_vendors_cves");
    CHECK(j["corpus_tag"] == "corrected");
    CHECK(j["tool_version"] == kToolVersion);
    CHECK(j["parameters"]["n"] == "1");
    CHECK(j["rows"][0][1] == "microsoft");
    CHECK(corpus_tag_from_string("raw") == CorpusTag::Raw);
    CHECK_THROWS_AS(corpus_tag_from_string("clean"), FormatError);
    CHECK(scheme_from_string(to_string(Scheme::PV3)) == Scheme::PV3);
    CHECK(date_field_from_string("edd") == DateField::EDD);
    CHECK_THROWS_AS(weekday_name(7), RangeError);
}
