#include <doctest.h>

#include <zlib.h>

#include "helpers.hpp"
#include "vulncure/ingest.hpp"

using namespace vulncure;
using testing::data_dir;

namespace {

std::string gzip(const std::string& plain) {
    z_stream zs{};
    REQUIRE(deflateInit2(&zs, Z_DEFAULT_COMPRESSION, Z_DEFLATED, 15 + 16, 8, Z_DEFAULT_STRATEGY) == Z_OK);
    std::string out(compressBound(plain.size()) + 64, '\0');
    zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(plain.data()));
    zs.avail_in = static_cast<uInt>(plain.size());
    zs.next_out = reinterpret_cast<Bytef*>(out.data());
    zs.avail_out = static_cast<uInt>(out.size());
    REQUIRE(deflate(&zs, Z_FINISH) == Z_STREAM_END);
    out.resize(zs.total_out);
    deflateEnd(&zs);
    return out;
}

std::string feed_with(const std::string& items) {
    return R"({"CVE_data_type":"CVE","CVE_Items":[)" + items + "]}";
}

std::string item(const std::string& id, const std::string& modified, const std::string& text) {
    return R"({"cve":{"CVE_data_meta":{"ID":")" + id +
           R"("},"description":{"description_data":[{"lang":"en","value":")" + text +
           R"("}]}},"publishedDate":"2017-01-02T10:00Z","lastModifiedDate":")" + modified + R"("})";
}

}  // namespace

TEST_CASE("bundled 100-item feed matches its hand count") {
    // Built by fixtures/generate.py: item k is dual scored when k % 3 != 0,
    // v2-only when k % 6 == 3 and unscored when k % 6 == 0; vendors and
    // products cycle through 11 vendors / 16 products.
    const auto parsed = ingest::parse_feed(ingest::read_file(data_dir() / "nvdcve-1.1-sample100.json"));
    CHECK(parsed.stats.records_total == 100);
    CHECK(parsed.stats.records_skipped == 0);
    CHECK(parsed.stats.records_parsed() == 100);
    REQUIRE(parsed.records.size() == 100);

    std::size_t v2 = 0, v3 = 0, both = 0;
    for (const auto& r : parsed.records) {
        v2 += r.v2 ? 1 : 0;
        v3 += r.v3 ? 1 : 0;
        both += (r.v2 && r.v3) ? 1 : 0;
        CHECK(r.cpes.size() == 1);
        CHECK_NOTHROW(r.validate());
        if (r.v3) CHECK(r.v3->provenance == Provenance::FromFeed);
    }
    CHECK(v2 == 83);
    CHECK(v3 == 66);
    CHECK(both == 66);
    const Corpus c(parsed.records);
    CHECK(c.vendor_index().size() == 11);
    CHECK(c.product_index().size() == 16);
}

TEST_CASE("malformed items are skipped and counted by reason") {
    const auto parsed = ingest::parse_feed(ingest::read_file(data_dir() / "nvdcve-1.1-malformed.json"));
    CHECK(parsed.records.size() == 3);
    CHECK(parsed.stats.records_total == 8);
    CHECK(parsed.stats.records_skipped == 5);
    const std::map<std::string, std::size_t> want{
        {"bad-cvss", 1}, {"bad-date", 1}, {"bad-id", 1}, {"bad-structure", 1}, {"no-description", 1}};
    CHECK(parsed.stats.skip_reasons == want);
}

TEST_CASE("unreadable documents raise") {
    CHECK_THROWS_AS(ingest::parse_feed("{not json"), FormatError);
    CHECK_THROWS_AS(ingest::parse_feed(R"({"CVE_Items": 3})"), FormatError);
    CHECK_THROWS_AS(ingest::parse_feed(R"({"other": []})"), FormatError);
    CHECK(ingest::parse_feed(feed_with("")).records.empty());
}

TEST_CASE("gzip input is transparent") {
    const std::string plain = ingest::read_file(data_dir() / "nvdcve-1.1-sample100.json");
    const std::string packed = gzip(plain);
    CHECK(packed.size() < plain.size());
    CHECK(ingest::maybe_gunzip(packed) == plain);
    CHECK(ingest::maybe_gunzip(plain) == plain);
    CHECK(ingest::parse_feed(packed).records == ingest::parse_feed(plain).records);
}

TEST_CASE("format_feed round trips extensions") {
    auto records = ingest::parse_feed(ingest::read_file(data_dir() / "nvdcve-1.1-sample100.json")).records;
    for (std::size_t i = 0; i < records.size(); ++i) {
        auto& r = records[i];
        if (!r.v3 && r.v2) r.v3 = CvssV3Assessment::make(6.4, Provenance::Predicted);
        if (i % 4 == 0) {
            const Date edd = Date(r.published.sys_days() - std::chrono::days(i % 9));
            r.edd = DisclosureEstimate{edd, i % 9 ? DisclosureSource::ReferencePage : DisclosureSource::NvdPublished,
                                       i % 9 ? std::optional<std::string>("http://x.example/" + std::to_string(i))
                                             : std::nullopt,
                                       static_cast<std::int64_t>(i % 9)};
        }
    }
    const std::string text = ingest::format_feed(records);
    const auto back = ingest::parse_feed(text);
    CHECK(back.stats.records_skipped == 0);
    CHECK(back.records == records);
    CHECK(ingest::format_feed(back.records) == text);
}

TEST_CASE("cpe strings") {
    auto e = ingest::parse_cpe("cpe:2.3:a:avast\\!:antivirus:4.8:*:*:*:*:*:*:*");
    REQUIRE(e);
    CHECK(e->vendor == "avast!");
    CHECK(e->product == "antivirus");
    CHECK(e->version == "4.8");

    e = ingest::parse_cpe("cpe:/a:microsoft:internet_explorer:6.0");
    REQUIRE(e);
    CHECK(e->vendor == "microsoft");
    CHECK(e->product == "internet_explorer");

    e = ingest::parse_cpe("cpe:2.3:o:Cisco:IOS:*:*:*:*:*:*:*:*");
    REQUIRE(e);
    CHECK(e->vendor == "cisco");
    CHECK_FALSE(e->version);

    CHECK_FALSE(ingest::parse_cpe("cpe:2.3:a:*:*:*"));
    CHECK_FALSE(ingest::parse_cpe("cpe:/a:vendor"));
    CHECK_FALSE(ingest::parse_cpe("not a cpe"));
}

TEST_CASE("newest lastModified wins regardless of feed order") {
    const auto old_feed = ingest::parse_feed(feed_with(item("CVE-2017-0001", "2017-02-01T00:00Z", "old") + "," +
                                                       item("CVE-2017-0002", "2017-02-01T00:00Z", "only")));
    const auto new_feed = ingest::parse_feed(feed_with(item("CVE-2017-0001", "2018-05-20T00:00Z", "new")));
    for (const auto& order : {std::vector{old_feed, new_feed}, std::vector{new_feed, old_feed}}) {
        const auto merged = ingest::merge_feeds(order);
        CHECK(merged.duplicates == 1);
        CHECK(merged.corpus.size() == 2);
        CHECK(merged.corpus.find(CveId::parse("CVE-2017-0001"))->descriptions.front() == "new");
        CHECK(merged.stats.records_total == 3);
    }
}

TEST_CASE("fixture snapshot directory") {
    const auto load = ingest::load_snapshot_with_stats(testing::fixture_workspace() / "feeds");
    CHECK(load.files.size() == 17);
    CHECK(load.duplicates == 2);
    CHECK(load.stats.records_skipped == 1);
    CHECK(load.corpus.size() == 430);
    CHECK(load.corpus.find(CveId::parse("CVE-1999-0067")) != nullptr);
    const auto* r = load.corpus.find(CveId::parse("CVE-2011-0700"));
    REQUIRE(r);
    CHECK(r->published == Date(2011, 3, 14));
    CHECK_THROWS_AS(ingest::load_snapshot(testing::fixture_workspace() / "no-such-dir"), IoError);
}

TEST_CASE("external vendor list") {
    const auto names = ingest::load_external_vendor_list(data_dir() / "vendor_list_100.txt");
    CHECK(names.size() == 93);
    CHECK(names.front() == "bea");
    CHECK(std::count(names.begin(), names.end(), "microsoft") == 1);
    CHECK(ingest::parse_vendor_list("A\n\n a \nB\r\nb\n") == std::vector<std::string>{"a", "b"});
}
