#include <doctest.h>

#include <functional>

#include "helpers.hpp"
#include "oracles.hpp"
#include "vulncure/ingest.hpp"
#include "vulncure/names.hpp"

using namespace vulncure;
using namespace vulncure::names;
using testing::edit_oracle;
using testing::lcs_oracle;
using testing::make_record;

namespace {

Corpus corpus_of(const std::vector<std::tuple<std::string, std::string, int>>& rows) {
    std::vector<CveRecord> records;
    int n = 0;
    for (const auto& [v, p, count] : rows) {
        for (int i = 0; i < count; ++i) {
            records.push_back(make_record({.id = "CVE-2015-" + std::to_string(1000 + n++), .cpes = {{v, p}}}));
        }
    }
    return Corpus(records);
}

DecisionSet decide_all(const std::vector<PairClassification>& pairs, const std::set<std::pair<std::string, std::string>>& yes) {
    DecisionSet d;
    for (const auto& p : pairs) d.set(PairKey::of(p), Decision{yes.contains({p.a, p.b}) || yes.contains({p.b, p.a}), ""});
    return d;
}

}  // namespace

TEST_CASE("tokens and abbreviations") {
    CHECK(normalize_tokens("Internet-Explorer") == std::vector<std::string>{"internet", "explorer"});
    CHECK(normalize_tokens("avast!") == std::vector<std::string>{"avast"});
    CHECK(normalize_tokens("__").empty());
    CHECK(abbreviation("lan_management_system") == "lms");
    CHECK(abbreviation("internet_explorer") == "ie");
    CHECK(abbreviation("windows").empty());
}

TEST_CASE("string measures on known pairs") {
    CHECK(levenshtein("bea", "bea_systems") == 8);
    CHECK(levenshtein("microsoft", "microsft") == 1);
    CHECK(levenshtein("kitten", "sitting") == 3);
    CHECK(levenshtein("", "abc") == 3);
    CHECK(longest_common_substring("lynx", "lynx_project") == 4);
    CHECK(longest_common_substring("ucs-e160dp-m1_firmware", "ucs-e140dp-m1_firmware") == 15);
    CHECK(longest_common_substring("abc", "") == 0);
}

TEST_CASE("string measures agree with oracles and satisfy metric laws") {
    std::mt19937_64 rng(42);
    for (int i = 0; i < 2000; ++i) {
        const auto a = testing::random_string(rng, 8, "abc_");
        const auto b = testing::random_string(rng, 8, "abc_");
        const auto c = testing::random_string(rng, 8, "abc_");
        const auto ab = levenshtein(a, b);
        CHECK(ab == edit_oracle(a, b));
        CHECK(longest_common_substring(a, b) == lcs_oracle(a, b));
        CHECK(ab == levenshtein(b, a));
        CHECK(longest_common_substring(a, b) == longest_common_substring(b, a));
        CHECK((ab == 0) == (a == b));
        CHECK(levenshtein(a, a) == 0);
        CHECK(longest_common_substring(a, a) == a.size());
        CHECK(levenshtein(a, c) <= ab + levenshtein(b, c));
    }
}

TEST_CASE("pair classification flags") {
    const auto c = corpus_of({{"microsoft", "windows", 3}, {"windows", "windows", 1}, {"microsft", "windows", 1},
                              {"lan_management_system", "lan_management_system", 2}, {"lms", "lms", 1}});
    auto p = classify_pair(NameKind::Vendor, "microsoft", "microsft", c);
    CHECK(p.edit_distance == 1);
    CHECK(p.matching_products == 1);
    CHECK_FALSE(p.is_prefix);
    CHECK(p.flags() == "lcs=6;mp=1;ed=1");

    p = classify_pair(NameKind::Vendor, "microsoft", "windows", c);
    CHECK(p.product_as_vendor);
    CHECK(passes_vendor_gate(p));

    p = classify_pair(NameKind::Vendor, "lan_management_system", "lms", c);
    CHECK(p.abbreviation_match);
    CHECK(p.matching_products == 0);
    CHECK(passes_vendor_gate(p));

    p = classify_pair(NameKind::Product, "ucs-e160dp-m1_firmware", "ucs-e140dp-m1_firmware", c, "cisco");
    CHECK(p.vendor == "cisco");
    CHECK(p.edit_distance == 1);
    CHECK(p.flags() == "lcs=15;ed=1");
    CHECK(passes_product_gate(p));

    p = classify_pair(NameKind::Product, "office", "outlook", c, "microsoft");
    CHECK_FALSE(passes_product_gate(p));
}

TEST_CASE("blocked vendor enumeration equals the exhaustive scan") {
    std::mt19937_64 rng(7);
    for (int round = 0; round < 5; ++round) {
        std::vector<std::tuple<std::string, std::string, int>> rows;
        std::set<std::string> vendors;
        while (vendors.size() < 60) {
            auto v = testing::random_string(rng, 7, "abcd_");
            if (v.empty() || v == "_") continue;
            vendors.insert(v);
        }
        const std::vector<std::string> vs(vendors.begin(), vendors.end());
        for (const auto& v : vs) {
            // Some products are other vendors' names, some are shared.
            const auto prod = rng() % 4 == 0 ? vs[rng() % vs.size()] : "p" + std::to_string(rng() % 40);
            rows.emplace_back(v, prod, 1);
        }
        const auto c = corpus_of(rows);

        std::set<std::pair<std::string, std::string>> exhaustive;
        for (std::size_t i = 0; i < vs.size(); ++i)
            for (std::size_t j = i + 1; j < vs.size(); ++j)
                if (passes_vendor_gate(classify_pair(NameKind::Vendor, vs[i], vs[j], c))) exhaustive.emplace(vs[i], vs[j]);

        std::set<std::pair<std::string, std::string>> blocked;
        const auto pairs = candidate_vendor_pairs(c);
        for (const auto& p : pairs) {
            CHECK(p.a < p.b);
            blocked.emplace(p.a, p.b);
        }
        CHECK(blocked.size() == pairs.size());
        CHECK(blocked == exhaustive);
    }
}

TEST_CASE("blocked product enumeration equals the exhaustive scan") {
    std::mt19937_64 rng(8);
    std::vector<std::tuple<std::string, std::string, int>> rows;
    std::set<std::string> products;
    while (products.size() < 70) products.insert(testing::random_string(rng, 7, "ab_-e") + "x");
    for (const auto& p : products) rows.emplace_back("v", p, 1);
    const auto c = corpus_of(rows);
    const std::vector<std::string> ps(products.begin(), products.end());
    std::set<std::pair<std::string, std::string>> exhaustive, blocked;
    for (std::size_t i = 0; i < ps.size(); ++i)
        for (std::size_t j = i + 1; j < ps.size(); ++j)
            if (passes_product_gate(classify_pair(NameKind::Product, ps[i], ps[j], c, "v"))) exhaustive.emplace(ps[i], ps[j]);
    for (const auto& p : candidate_product_pairs(c, "v")) blocked.emplace(p.a, p.b);
    CHECK(blocked == exhaustive);
    CHECK_FALSE(exhaustive.empty());
    CHECK_THROWS_AS(candidate_product_pairs(c, "nobody"), LookupError);
}

TEST_CASE("decision files") {
    const auto d = DecisionSet::parse(
        "kind\ta\tb\tflags\tmatch\tnote\n"
        "vendor\tBEA_systems\tbea\tpref\tYes\tsuffix\n"
        "product\tmicrosoft:ie\tmicrosoft:internet_explorer\tabbr\tno\t\n"
        "vendor\tx\ty\t\t\t\n");
    CHECK(d.size() == 2);
    const auto* v = d.find(PairKey::of(NameKind::Vendor, "", "bea", "bea_systems"));
    REQUIRE(v);
    CHECK(v->match);
    CHECK(v->note == "suffix");
    const auto* p = d.find(PairKey::of(NameKind::Product, "microsoft", "internet_explorer", "ie"));
    REQUIRE(p);
    CHECK_FALSE(p->match);
    CHECK_FALSE(d.find(PairKey::of(NameKind::Vendor, "", "x", "y")));

    CHECK_THROWS_AS(DecisionSet::parse("vendor\ta\tb\t\tmaybe\n"), FormatError);
    CHECK_THROWS_AS(DecisionSet::parse("product\ta:x\tb:y\t\tyes\n"), FormatError);
    CHECK_THROWS_AS(DecisionSet::parse("product\tx\ty\t\tyes\n"), FormatError);
    CHECK_THROWS_AS(DecisionSet::parse("vendor\ta\tb\n"), FormatError);
    CHECK_THROWS_AS(DecisionSet::parse("thing\ta\tb\t\tyes\n"), FormatError);
}

TEST_CASE("mapping groups pick the most cited name") {
    const auto c = corpus_of({{"bea", "weblogic_server", 10}, {"bea_systems", "weblogic_portal", 3},
                              {"oracle", "weblogic_server", 5}, {"avast", "antivirus", 1}, {"avast!", "antivirus", 1}});
    const auto pairs = candidate_vendor_pairs(c);
    const auto decisions = decide_all(pairs, {{"bea", "bea_systems"}, {"avast", "avast!"}});
    const auto m = build_mapping(pairs, decisions, corpus_cve_counter(c));
    CHECK(m.resolve_vendor("bea_systems") == "bea");
    CHECK(m.resolve_vendor("bea") == "bea");
    CHECK(m.resolve_vendor("oracle") == "oracle");
    CHECK(m.resolve_vendor("avast!") == "avast");  // 1-1 tie goes to the smaller string
    CHECK(m.size() == 2);
    CHECK_NOTHROW(m.validate());

    DecisionSet partial;
    partial.set(PairKey::of(pairs.front()), Decision{true, ""});
    try {
        build_mapping(pairs, partial, corpus_cve_counter(c));
        FAIL("expected UndecidedPairsError");
    } catch (const UndecidedPairsError& e) {
        CHECK(e.pairs().size() == pairs.size() - 1);
    }
}

TEST_CASE("transitive groups collapse onto one canonical name") {
    const auto c = corpus_of({{"microsoft", "windows", 8}, {"microsft", "windows", 2}, {"windows", "windows", 1}});
    const auto pairs = candidate_vendor_pairs(c);
    CHECK(pairs.size() == 3);
    // Only two of three edges confirmed; union-find still joins all three.
    const auto decisions = decide_all(pairs, {{"microsft", "microsoft"}, {"microsoft", "windows"}});
    const auto m = build_mapping(pairs, decisions, corpus_cve_counter(c));
    CHECK(m.resolve_vendor("microsft") == "microsoft");
    CHECK(m.resolve_vendor("windows") == "microsoft");
    const auto applied = apply_mapping(c, m);
    CHECK(applied.corpus.vendor_index().size() == 1);
    CHECK(applied.stats.vendors_before == 3);
    CHECK(applied.stats.vendors_after == 1);
    CHECK(applied.stats.records_changed == 3);
    CHECK(applied.corpus.vendor_cve_count("microsoft") == 11);
}

TEST_CASE("mapping file round trip and validation") {
    NameMapping m;
    m.add({NameKind::Vendor, "", "bea_systems"}, "bea", {"pref", DecidedBy::HeuristicManual});
    m.add({NameKind::Product, "microsoft", "ie"}, "internet_explorer", {"abbr", DecidedBy::ImportedFile});
    // The export keeps kind, raw, canonical and decided_by; flags stay in the worksheet.
    const auto back = NameMapping::from_tsv(m.to_tsv());
    CHECK(back.entries() == m.entries());
    for (const auto& [k, prov] : back.provenance()) CHECK(prov.decided_by == m.provenance().at(k).decided_by);
    CHECK(m.to_tsv().rfind("kind\traw\tcanonical\tdecided_by\n", 0) == 0);
    CHECK(m.resolve_product("microsoft", "ie") == "internet_explorer");
    CHECK(m.resolve_product("apple", "ie") == "ie");

    NameMapping chain;
    chain.add({NameKind::Vendor, "", "a"}, "b", {});
    chain.add({NameKind::Vendor, "", "b"}, "c", {});
    CHECK_THROWS_AS(chain.validate(), FormatError);
}

TEST_CASE("apply drops duplicate cpe entries") {
    auto r = make_record({.id = "CVE-2009-0001", .cpes = {{"microsoft", "ie"}, {"microsoft", "internet_explorer"}}});
    const Corpus c(std::vector<CveRecord>{r});
    NameMapping m;
    m.add({NameKind::Product, "microsoft", "ie"}, "internet_explorer", {});
    const auto out = apply_mapping(c, m);
    CHECK(out.corpus.records().begin()->second.cpes.size() == 1);
    CHECK(out.stats.products_before == 2);
    CHECK(out.stats.products_after == 1);
    CHECK(out.stats.cpe_entries_rewritten == 1);
    CHECK(apply_mapping(out.corpus, m).stats.records_changed == 0);
}

TEST_CASE("fixture workspace consolidation") {
    const auto raw = ingest::load_snapshot(testing::fixture_workspace() / "feeds");
    const auto decisions = DecisionSet::load(testing::fixture_workspace() / "decisions.tsv");
    const auto cons = consolidate(raw, decisions);

    const std::map<std::string, std::string> vendors{
        {"avast!", "avast"}, {"bea_systems", "bea"}, {"lms", "lan_management_system"}, {"lynx", "lynx_project"},
        {"microsft", "microsoft"}, {"windows", "microsoft"}, {"oracle_corporation", "oracle"}};
    for (const auto& [raw_name, canonical] : vendors) CHECK(cons.mapping.resolve_vendor(raw_name) == canonical);
    CHECK(cons.mapping.resolve_vendor("cisco") == "cisco");
    CHECK(cons.mapping.resolve_product("microsoft", "ie") == "internet_explorer");
    CHECK(cons.mapping.resolve_product("microsoft", "internet-explorer") == "internet_explorer");
    CHECK(cons.mapping.resolve_product("nativesolutions", "tbe_banner_engine") == "the_banner_engine");
    CHECK(cons.mapping.resolve_product("cisco", "ucs-e140dp-m1_firmware") == "ucs-e140dp-m1_firmware");
    CHECK(cons.mapping.resolve_product("lan_management_system", "lms") == "lan_management_system");

    const auto applied = apply_mapping(raw, cons.mapping);
    CHECK(applied.stats.vendors_before - applied.stats.vendors_after == 7);
    CHECK(applied.corpus.vendor_cve_count("bea") == 13);
    // Re-running on the corrected corpus finds nothing new to merge.
    const auto again = consolidate(applied.corpus, decisions);
    CHECK(apply_mapping(applied.corpus, again.mapping).stats.records_changed == 0);

    // Without decisions the first stage refuses to guess.
    CHECK_THROWS_AS(consolidate(raw, DecisionSet{}), UndecidedPairsError);
}

TEST_CASE("review worksheet is staged") {
    const auto c = corpus_of({{"bea", "weblogic_server", 2}, {"bea_systems", "weblogic_server", 1},
                              {"microsoft", "ie", 1}, {"microsoft", "internet_explorer", 1}});
    auto pairs = review_candidates(c, DecisionSet{});
    CHECK(pairs.size() == 1);
    const auto decisions = decide_all(pairs, {{"bea", "bea_systems"}});
    pairs = review_candidates(c, decisions);
    REQUIRE(pairs.size() == 2);
    CHECK(pairs[1].kind == NameKind::Product);
    const auto sheet = format_worksheet(pairs, decisions);
    CHECK(sheet.find("vendor\tbea\tbea_systems\t") != std::string::npos);
    CHECK(sheet.find("\tyes\t") != std::string::npos);
    CHECK(sheet.find("product\tmicrosoft:ie\tmicrosoft:internet_explorer\tabbr;lcs=1;ed=15\t\t\n") != std::string::npos);
    // The worksheet parses back as a decision file.
    CHECK(DecisionSet::parse(sheet).size() == 1);
}

TEST_CASE("external vendor lists are remapped") {
    NameMapping m;
    m.add({NameKind::Vendor, "", "bea_systems"}, "bea", {});
    m.add({NameKind::Vendor, "", "microsft"}, "microsoft", {});
    m.add({NameKind::Vendor, "", "windows"}, "microsoft", {});
    const auto s = remap_external_vendor_list({"BEA_Systems", "bea_systems", "Microsft", "windows", "apple"}, m);
    CHECK(s.total == 4);
    CHECK(s.impacted == 3);
    CHECK(s.consolidated_targets == 2);
}

TEST_CASE("pattern statistics") {
    const auto c = corpus_of({{"bea", "weblogic_server", 2}, {"bea_systems", "weblogic_portal", 1},
                              {"avast", "antivirus", 1}, {"avast!", "antivirus", 1}});
    const auto pairs = candidate_vendor_pairs(c);
    const auto decisions = decide_all(pairs, {{"bea", "bea_systems"}, {"avast", "avast!"}});
    const auto stats = pattern_stats(pairs, decisions);
    CHECK(stats.cell(PatternCategory::Tokens, LcsBand::AtLeast3, false).pairs == 1);
    CHECK(stats.cell(PatternCategory::Tokens, LcsBand::AtLeast3, true).names == 2);
    CHECK(stats.cell(PatternCategory::MpZero, LcsBand::AtLeast3, true).pairs == 1);
    // avast/avast! is also a prefix pair but token-equal pairs are not overlaid.
    CHECK(stats.cell(PatternCategory::Prefix, LcsBand::AtLeast3, true).pairs == 1);
    CHECK(stats.to_csv().find('\n') != std::string::npos);
}
