#include <doctest.h>

#include "helpers.hpp"
#include "oracles.hpp"
#include "vulncure/cwe.hpp"

using namespace vulncure;
using namespace vulncure::cwe;
using testing::make_record;

namespace {

CweCatalog catalog() {
    return CweCatalog::parse("CWE-835\tLoop with Unreachable Exit Condition ('Infinite Loop')\nCWE-79\tXSS\nCWE-125\tOOB read\n");
}

}  // namespace

TEST_CASE("cwe id syntax") {
    CHECK(is_cwe_id("CWE-79"));
    CHECK_FALSE(is_cwe_id("CWE-"));
    CHECK_FALSE(is_cwe_id("cwe-79"));
    CHECK_FALSE(is_cwe_id("NVD-CWE-Other"));
    CHECK_FALSE(is_cwe_id("CWE-7a"));
}

TEST_CASE("extraction on known text") {
    CHECK(extract_cwe_ids("CWE-835: Loop with Unreachable Exit Condition ('Infinite Loop')") ==
          std::vector<std::string>{"CWE-835"});
    CHECK(extract_cwe_ids("see cwe-89 and CWE-79, then Cwe-89 again") == std::vector<std::string>{"CWE-89", "CWE-79"});
    CHECK(extract_cwe_ids("CWE- 12 and CWE-x and NVD-CWE-Other").empty());
    CHECK(extract_cwe_ids("CWE-1234567").front() == "CWE-1234567");
}

TEST_CASE("extraction agrees with a character scan on planted strings") {
    std::mt19937_64 rng(99);
    const std::string filler = "abcCWEcwe- 0123456789:,()";
    for (int i = 0; i < 3000; ++i) {
        std::string s;
        const int parts = static_cast<int>(rng() % 6);
        for (int k = 0; k < parts; ++k) {
            s += testing::random_string(rng, 6, filler);
            if (rng() % 2) s += (rng() % 2 ? "CWE-" : "cWe-") + std::to_string(rng() % 1000);
        }
        CAPTURE(s);
        CHECK(extract_cwe_ids(s) == testing::cwe_scan_oracle(s));
    }
}

TEST_CASE("description preprocessing") {
    CHECK(preprocess_description("This capability can be accessed") == "capability access");
    CHECK(preprocess_description("The identifier's value was used") == "identifier value use");
    CHECK(preprocess_description("Attackers can't bypass it; they're blocked.") == "attackers bypass block");
    CHECK(preprocess_description("It isn’t exploited") == "exploit");
    CHECK(preprocess_description("Remote attackers injected scripts and stopped services") ==
          "remote attackers inject scripts stop services");
    CHECK(preprocess_description("The parser applied changes") == "parser apply changes");
    CHECK(preprocess_description("It was freed and then validated") == "freed validate");
    CHECK(preprocess_description("") == "");
    CHECK(std::find(stop_words().begin(), stop_words().end(), "the") != stop_words().end());
}

TEST_CASE("catalog parsing") {
    const auto c = catalog();
    CHECK(c.size() == 3);
    CHECK(c.contains("CWE-835"));
    CHECK(c.name("CWE-79") == "XSS");
    CHECK_FALSE(c.name("CWE-1"));
    CHECK_THROWS_AS(CweCatalog::parse("835\tLoop\n"), FormatError);
    CHECK_THROWS_AS(CweCatalog::parse("CWE-835\n"), FormatError);
    const auto fixture = CweCatalog::load(testing::fixture_workspace() / "cwe_catalog.tsv");
    CHECK(fixture.contains("CWE-835"));
}

TEST_CASE("merge replaces the placeholder and is idempotent") {
    auto r = make_record({.id = "CVE-2007-0838", .cwes = {"NVD-CWE-Other"}});
    r.descriptions.push_back("CWE-835: Loop with Unreachable Exit Condition ('Infinite Loop')");
    const auto once = merge_cwe(r, catalog());
    CHECK(once.changed);
    CHECK(once.record.cwe_ids == std::set<std::string>{"CWE-835"});
    CHECK(once.quarantined.empty());
    const auto twice = merge_cwe(once.record, catalog());
    CHECK_FALSE(twice.changed);
    CHECK(twice.record == once.record);
}

TEST_CASE("merge unions, quarantines unknown ids and keeps lone placeholders") {
    auto r = make_record({.id = "CVE-2012-0001", .cwes = {"CWE-20"}, .description = "leads to CWE-125 and CWE-9999"});
    const auto m = merge_cwe(r, catalog());
    CHECK(m.record.cwe_ids == std::set<std::string>{"CWE-125", "CWE-20"});
    CHECK(m.quarantined == std::vector<std::string>{"CWE-9999"});

    r = make_record({.id = "CVE-2012-0002", .cwes = {"NVD-CWE-noinfo"}, .description = "CWE-9999 only"});
    const auto q = merge_cwe(r, catalog());
    CHECK_FALSE(q.changed);
    CHECK(q.record.cwe_ids == std::set<std::string>{"NVD-CWE-noinfo"});
}

TEST_CASE("corpus merge and gap report") {
    auto other = make_record({.id = "CVE-2007-0838", .cwes = {"NVD-CWE-Other"}, .description = "CWE-835 loop"});
    auto noinfo = make_record({.id = "CVE-2010-0001", .cwes = {"NVD-CWE-noinfo"}, .description = "cwe-79"});
    auto empty = make_record({.id = "CVE-2010-0002", .description = "nothing here"});
    auto both = make_record({.id = "CVE-2010-0003", .cwes = {"NVD-CWE-Other", "NVD-CWE-noinfo"}});
    auto concrete = make_record({.id = "CVE-2010-0004", .cwes = {"CWE-20"}, .description = "CWE-125 and CWE-9999"});
    const Corpus before(std::vector<CveRecord>{other, noinfo, empty, both, concrete});
    const auto merged = merge_corpus(before, catalog());
    CHECK(merged.changed == 3);
    REQUIRE(merged.quarantined.size() == 1);
    CHECK(merged.quarantined[0].cwe == "CWE-9999");
    CHECK(merged.quarantined[0].id == CveId::parse("CVE-2010-0004"));

    const auto gap = cwe_gap_report(before, merged.corpus);
    CHECK(gap.other == 2);
    CHECK(gap.noinfo == 1);
    CHECK(gap.unassigned == 1);
    CHECK(gap.fixed_other == 1);
    CHECK(gap.fixed_noinfo_or_unassigned == 1);
    CHECK(gap.augmented == 1);
    CHECK(gap.to_csv().rfind("metric,value\n", 0) == 0);
    CHECK(cwe_gap_report(merged.corpus, merge_corpus(merged.corpus, catalog()).corpus).fixed_other == 0);

    const Corpus smaller(std::vector<CveRecord>{other});
    CHECK_THROWS_AS(cwe_gap_report(before, smaller), LookupError);
}
