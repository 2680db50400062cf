#include <doctest.h>

#include <cmath>
#include <limits>

#include "helpers.hpp"
#include "vulncure/core.hpp"
#include "vulncure/io.hpp"

using namespace vulncure;

TEST_CASE("date parsing and calendar fields") {
    const Date d = Date::parse("2011-03-14T19:00Z");
    CHECK(d.iso() == "2011-03-14");
    CHECK(d.year() == 2011);
    CHECK(d.month() == 3u);
    CHECK(d.day() == 14u);
    CHECK(d.iso_weekday_index() == 0u);  // a Monday
    CHECK(Date(2004, 12, 31).iso_weekday_index() == 4u);
    CHECK(days_between(Date(2011, 2, 7), d) == 35);
    CHECK(days_between(d, Date(2011, 2, 7)) == -35);
    CHECK(Date::parse("2016-02-29") < Date::parse("2016-03-01"));

    CHECK_THROWS_AS(Date::parse("2017-02-29"), FormatError);
    CHECK_THROWS_AS(Date::parse("2017-13-01"), FormatError);
    CHECK_THROWS_AS(Date::parse("14/03/2011"), FormatError);
    CHECK_THROWS_AS(Date::parse(""), FormatError);
    CHECK_FALSE(Date::try_parse("2017-1-1"));
}

TEST_CASE("cve identifiers") {
    const auto a = CveId::parse("CVE-2008-4019");
    CHECK(a.year() == 2008);
    CHECK(a.sequence() == 4019);
    CHECK(a.str() == "CVE-2008-4019");
    CHECK_FALSE(a.legacy());
    CHECK(CveId::parse("cve-1999-0067").year() == 1999);
    CHECK(CveId::parse("CVE-1998-0001").legacy());
    // Numeric ordering, not lexicographic.
    CHECK(CveId::parse("CVE-2014-9999") < CveId::parse("CVE-2014-10000"));
    CHECK(CveId::parse("CVE-2013-99999") < CveId::parse("CVE-2014-0001"));
    CHECK_THROWS_AS(CveId::parse("CAN-2017-0001"), FormatError);
    CHECK_THROWS_AS(CveId::parse("CVE-17-0001"), FormatError);
    CHECK_THROWS_AS(CveId::parse("CVE-2017-"), FormatError);
}

TEST_CASE("score thresholds") {
    struct Row {
        double score;
        CvssVersion v;
        SeverityLabel want;
    };
    const Row rows[] = {
        {0.0, CvssVersion::V2, SeverityLabel::Low},      {3.9, CvssVersion::V2, SeverityLabel::Low},
        {4.0, CvssVersion::V2, SeverityLabel::Medium},   {6.9, CvssVersion::V2, SeverityLabel::Medium},
        {7.0, CvssVersion::V2, SeverityLabel::High},     {10.0, CvssVersion::V2, SeverityLabel::High},
        {0.0, CvssVersion::V3, SeverityLabel::None},     {0.1, CvssVersion::V3, SeverityLabel::Low},
        {3.9, CvssVersion::V3, SeverityLabel::Low},      {4.0, CvssVersion::V3, SeverityLabel::Medium},
        {6.9, CvssVersion::V3, SeverityLabel::Medium},   {7.0, CvssVersion::V3, SeverityLabel::High},
        {8.9, CvssVersion::V3, SeverityLabel::High},     {9.0, CvssVersion::V3, SeverityLabel::Critical},
        {10.0, CvssVersion::V3, SeverityLabel::Critical},
    };
    for (const auto& r : rows) {
        CAPTURE(r.score);
        CHECK(score_to_label(r.score, r.v) == r.want);
    }
    CHECK_THROWS_AS(score_to_label(-0.1, CvssVersion::V2), RangeError);
    CHECK_THROWS_AS(score_to_label(10.1, CvssVersion::V3), RangeError);
    CHECK_THROWS_AS(score_to_label(std::nan(""), CvssVersion::V3), RangeError);
    CHECK_THROWS_AS(score_to_label(std::numeric_limits<double>::infinity(), CvssVersion::V2), RangeError);

    // Monotone over a fine grid.
    for (auto v : {CvssVersion::V2, CvssVersion::V3}) {
        SeverityLabel prev = score_to_label(0.0, v);
        for (int i = 1; i <= 100; ++i) {
            const auto cur = score_to_label(i / 10.0, v);
            CHECK(cur >= prev);
            prev = cur;
        }
    }
}

TEST_CASE("enum string round trips") {
    for (int i = 0; i <= 4; ++i) {
        const auto l = static_cast<SeverityLabel>(i);
        CHECK(severity_label_from_string(to_string(l)) == l);
    }
    CHECK(abbreviation(SeverityLabel::Critical) == "C");
    CHECK(abbreviation(SeverityLabel::None) == "-");
    CHECK(access_vector_from_string("ADJACENT_NETWORK") == AccessVector::AdjacentNetwork);
    CHECK(access_complexity_from_string(to_string(AccessComplexity::Medium)) == AccessComplexity::Medium);
    CHECK(authentication_from_string(to_string(Authentication::Single)) == Authentication::Single);
    CHECK(impact_from_string("COMPLETE") == Impact::Complete);
    CHECK_THROWS_AS(impact_from_string("TOTAL"), FormatError);
}

TEST_CASE("v3 assessment derives its label") {
    CHECK(CvssV3Assessment::make(9.8, Provenance::FromFeed).label == SeverityLabel::Critical);
    CHECK(CvssV3Assessment::make(0.0, Provenance::Predicted).label == SeverityLabel::None);
}

TEST_CASE("record invariants") {
    auto r = testing::make_record({.id = "CVE-2017-0001", .cpes = {{"php", "php"}}, .v2 = 5.0, .v3 = 7.5});
    CHECK_NOTHROW(r.validate());

    auto bad = r;
    bad.descriptions.clear();
    CHECK_THROWS_AS(bad.validate(), FormatError);

    bad = r;
    bad.v3->label = SeverityLabel::Low;
    CHECK_THROWS_AS(bad.validate(), FormatError);

    bad = r;
    bad.last_modified = Date(2016, 1, 1);
    CHECK_THROWS_AS(bad.validate(), FormatError);

    bad = r;
    bad.cpes.push_back({"", "x", std::nullopt});
    CHECK_THROWS_AS(bad.validate(), FormatError);

    bad = r;
    bad.edd = DisclosureEstimate{Date(2017, 2, 1), DisclosureSource::ReferencePage, "http://a.example/", 3};
    CHECK_THROWS_AS(bad.validate(), FormatError);
    bad.edd->lag_days = 28;
    CHECK_NOTHROW(bad.validate());
}

TEST_CASE("corpus indices follow the records") {
    using testing::make_record;
    Corpus c(std::vector<CveRecord>{
        make_record({.id = "CVE-2017-0001", .cpes = {{"microsoft", "windows"}, {"microsoft", "office"}}}),
        make_record({.id = "CVE-2017-0002", .cpes = {{"microsoft", "windows"}}}),
        make_record({.id = "CVE-2017-0003", .cpes = {{"bea", "weblogic_server"}}}),
        make_record({.id = "CVE-2017-0004"}),
    });
    CHECK(c.size() == 4);
    CHECK(c.vendor_index().size() == 2);
    CHECK(c.products_of("microsoft") == std::set<std::string>{"office", "windows"});
    CHECK(c.products_of("nobody").empty());
    CHECK(c.vendor_cve_count("microsoft") == 2);
    CHECK(c.vendor_cve_count("nobody") == 0);
    CHECK(c.product_cve_count("microsoft", "windows") == 2);
    CHECK(c.product_cve_count("microsoft", "office") == 1);
    CHECK(c.find(CveId::parse("CVE-2017-0003")) != nullptr);
    CHECK(c.find(CveId::parse("CVE-2017-0009")) == nullptr);
    CHECK(rebuild_indices(c) == c);
}

TEST_CASE("lowercasing leaves non-ascii bytes alone") {
    CHECK(to_lower("Avast!") == "avast!");
    CHECK(to_lower("\xC3\x89T\xC3\x89") == "\xC3\x89t\xC3\x89");
}

TEST_CASE("csv and fixed formatting") {
    CHECK(io::csv_field("plain") == "plain");
    CHECK(io::csv_field("a,b") == "\"a,b\"");
    CHECK(io::csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(io::csv_field("two\nlines") == "\"two\nlines\"");
    CHECK(io::csv_line({"a", "b,c", ""}) == "a,\"b,c\",\n");
    CHECK(io::format_fixed(0.126, 2) == "0.13");
    CHECK(io::format_fixed(0.125, 2) == "0.12");  // exact binary tie rounds to even
    CHECK(io::format_fixed(-1.0, 3) == "-1.000");
    CHECK(io::format_fixed(38.0, 0) == "38");
    const auto rows = io::parse_tsv("# comment\na\tb\r\n\nc\t\td\n");
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == std::vector<std::string>{"a", "b"});
    CHECK(rows[1] == std::vector<std::string>{"c", "", "d"});
}

TEST_CASE("atomic write replaces the whole file") {
    testing::TempDir tmp("atomic");
    const auto p = tmp.path() / "sub" / "f.txt";
    std::filesystem::create_directories(p.parent_path());
    io::write_atomic(p, "first version, long");
    io::write_atomic(p, "second");
    std::ifstream in(p);
    std::string s((std::istreambuf_iterator<char>(in)), {});
    CHECK(s == "second");
    std::size_t entries = 0;
    for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(p.parent_path())) ++entries;
    CHECK(entries == 1);
}
