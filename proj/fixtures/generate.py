#!/usr/bin/env python3
"""Builds the bundled fixture workspace and the small parser fixtures.

Output is a pure function of the seeds below; rerunning rewrites identical
bytes. decisions.tsv is reviewed by hand and is not touched here.

    python3 fixtures/generate.py
"""

import datetime as dt
import gzip
import hashlib
import json
import random
from pathlib import Path

HERE = Path(__file__).resolve().parent
WS = HERE / "workspace"
TESTDATA = HERE.parent / "tests" / "data"

AV = ["LOCAL", "ADJACENT_NETWORK", "NETWORK"]
AC = ["HIGH", "MEDIUM", "LOW"]
AU = ["MULTIPLE", "SINGLE", "NONE"]
IMP = ["NONE", "PARTIAL", "COMPLETE"]

CWES = ["CWE-79", "CWE-89", "CWE-119", "CWE-20", "CWE-200", "CWE-264", "CWE-22", "CWE-352",
        "CWE-399", "CWE-94", "CWE-125", "CWE-787", "CWE-416", "CWE-78", "CWE-190", "CWE-476",
        "CWE-287", "CWE-310", "CWE-434", "CWE-611"]
CWE_WEIGHTS = [14, 9, 12, 10, 7, 6, 5, 4, 4, 4, 3, 3, 3, 3, 2, 2, 2, 2, 2, 1]

CATALOG = [
    ("CWE-20", "Improper Input Validation"),
    ("CWE-22", "Improper Limitation of a Pathname to a Restricted Directory ('Path Traversal')"),
    ("CWE-59", "Improper Link Resolution Before File Access ('Link Following')"),
    ("CWE-78", "Improper Neutralization of Special Elements used in an OS Command ('OS Command Injection')"),
    ("CWE-79", "Improper Neutralization of Input During Web Page Generation ('Cross-site Scripting')"),
    ("CWE-89", "Improper Neutralization of Special Elements used in an SQL Command ('SQL Injection')"),
    ("CWE-94", "Improper Control of Generation of Code ('Code Injection')"),
    ("CWE-119", "Improper Restriction of Operations within the Bounds of a Memory Buffer"),
    ("CWE-125", "Out-of-bounds Read"),
    ("CWE-134", "Use of Externally-Controlled Format String"),
    ("CWE-189", "Numeric Errors"),
    ("CWE-190", "Integer Overflow or Wraparound"),
    ("CWE-200", "Exposure of Sensitive Information to an Unauthorized Actor"),
    ("CWE-264", "Permissions, Privileges, and Access Controls"),
    ("CWE-269", "Improper Privilege Management"),
    ("CWE-284", "Improper Access Control"),
    ("CWE-287", "Improper Authentication"),
    ("CWE-310", "Cryptographic Issues"),
    ("CWE-352", "Cross-Site Request Forgery (CSRF)"),
    ("CWE-362", "Concurrent Execution using Shared Resource with Improper Synchronization ('Race Condition')"),
    ("CWE-399", "Resource Management Errors"),
    ("CWE-400", "Uncontrolled Resource Consumption"),
    ("CWE-416", "Use After Free"),
    ("CWE-434", "Unrestricted Upload of File with Dangerous Type"),
    ("CWE-476", "NULL Pointer Dereference"),
    ("CWE-601", "URL Redirection to Untrusted Site ('Open Redirect')"),
    ("CWE-611", "Improper Restriction of XML External Entity Reference"),
    ("CWE-732", "Incorrect Permission Assignment for Critical Resource"),
    ("CWE-772", "Missing Release of Resource after Effective Lifetime"),
    ("CWE-787", "Out-of-bounds Write"),
    ("CWE-798", "Use of Hard-coded Credentials"),
    ("CWE-835", "Loop with Unreachable Exit Condition ('Infinite Loop')"),
    ("CWE-862", "Missing Authorization"),
]

# (vendor, product, records). The first block holds the name cases under study.
NAMED = [
    ("bea", "weblogic_server", 10),
    ("bea_systems", "weblogic_portal", 3),
    ("avast", "antivirus", 4),
    ("avast!", "antivirus", 1),
    ("microsoft", "windows", 8),
    ("microsoft", "internet_explorer", 4),
    ("microsoft", "internet-explorer", 2),
    ("microsoft", "ie", 1),
    ("microsoft", "office", 5),
    ("microsoft", "internet_information_services", 2),
    ("microsft", "windows", 2),
    ("windows", "windows", 1),
    ("lynx_project", "lynx", 3),
    ("lynx", "lynx", 1),
    ("lan_management_system", "lan_management_system", 2),
    ("lms", "lms", 1),
    ("nativesolutions", "the_banner_engine", 2),
    ("nativesolutions", "tbe_banner_engine", 1),
    ("cisco", "ucs-e160dp-m1_firmware", 2),
    ("cisco", "ucs-e140dp-m1_firmware", 2),
    ("cisco", "ios", 6),
    ("oracle", "database_server", 5),
    ("oracle", "weblogic_server", 2),
    ("oracle_corporation", "database_server", 2),
]

BACKGROUND = [
    ("apache", "http_server"), ("apache", "tomcat"), ("mozilla", "firefox"), ("mozilla", "thunderbird"),
    ("google", "chrome"), ("google", "android"), ("adobe", "flash_player"), ("adobe", "acrobat_reader"),
    ("linux", "linux_kernel"), ("php", "php"), ("wordpress", "wordpress"), ("redhat", "enterprise_linux"),
    ("ibm", "websphere_application_server"), ("apple", "mac_os_x"), ("apple", "safari"), ("debian", "debian_linux"),
]

CONFIG = """# Fixture workspace. Paths are relative to this file.
[paths]
feeds_dir = feeds
fixtures_dir = pages
decisions_file = decisions.tsv
output_dir = out
cwe_catalog = cwe_catalog.tsv
vendor_lists = securityfocus:vendor_lists/securityfocus.txt,securitytracker:vendor_lists/securitytracker.txt

[run]
seed = 1

[dates]
match_policy = first

[severity]
model = dnn
split_ratio = 0.8
split_stratify_on = v3
epochs = 100

[report]
top_n = 10
"""

BUGZILLA = {"mozilla": "bugzilla.mozilla.org", "redhat": "bugzilla.redhat.com", "linux": "bugzilla.kernel.org",
            "apache": "bz.apache.org"}


def iso(d):
    return d.isoformat()


def nvd_ts(d):
    return f"{d.isoformat()}T{12 + d.day % 8:02d}:{(d.day * 7) % 60:02d}Z"


def pick_v2(rng, severity_hint=None):
    av = rng.choices([0, 1, 2], [15, 5, 80])[0]
    ac = rng.choices([0, 1, 2], [8, 35, 57])[0]
    au = rng.choices([0, 1, 2], [1, 19, 80])[0]
    c, i, a = (rng.choices([0, 1, 2], [30, 50, 20])[0] for _ in range(3))
    if severity_hint == "high":
        c = i = a = 2
    # Shape of the v2 equation, not its exact constants.
    impact = 10.41 * (1 - (1 - [0, .275, .66][c]) * (1 - [0, .275, .66][i]) * (1 - [0, .275, .66][a]))
    exploit = 20 * [0.395, 0.646, 1.0][av] * [0.35, 0.61, 0.71][ac] * [0.45, 0.56, 0.704][au]
    f = 0 if impact == 0 else 1.176
    score = round(max(0.0, min(10.0, ((0.6 * impact) + (0.4 * exploit) - 1.5) * f)), 1)
    ui = rng.random() < 0.25
    flags = {
        "obtainAllPrivilege": rng.random() < 0.04,
        "obtainUserPrivilege": rng.random() < 0.06,
        "obtainOtherPrivilege": rng.random() < 0.05,
        "userInteractionRequired": ui,
    }
    return {"av": av, "ac": ac, "au": au, "c": c, "i": i, "a": a, "score": score, "flags": flags}


def v3_from_v2(rng, v2):
    s = 0.78 * v2["score"] + 2.1 + 0.35 * (v2["av"] == 2) - 0.5 * v2["flags"]["userInteractionRequired"]
    s += 0.25 * (v2["c"] == 2) + rng.gauss(0, 0.35)
    return round(max(1.0, min(10.0, s)), 1)


def v2_block(v2):
    return {
        "cvssV2": {
            "version": "2.0",
            "accessVector": AV[v2["av"]],
            "accessComplexity": AC[v2["ac"]],
            "authentication": AU[v2["au"]],
            "confidentialityImpact": IMP[v2["c"]],
            "integrityImpact": IMP[v2["i"]],
            "availabilityImpact": IMP[v2["a"]],
            "baseScore": v2["score"],
        },
        **v2["flags"],
    }


def item(rec):
    impact = {}
    if rec.get("v2"):
        impact["baseMetricV2"] = v2_block(rec["v2"])
    if rec.get("v3") is not None:
        impact["baseMetricV3"] = {"cvssV3": {"version": "3.0", "baseScore": rec["v3"]}}
    cpes = [{"vulnerable": True,
             "cpe23Uri": f"cpe:2.3:a:{esc(v)}:{esc(p)}:{ver}:*:*:*:*:*:*:*"} for v, p, ver in rec["cpes"]]
    return {
        "cve": {
            "data_type": "CVE",
            "data_format": "MITRE",
            "data_version": "4.0",
            "CVE_data_meta": {"ID": rec["id"], "ASSIGNER": "cve@mitre.org"},
            "problemtype": {"problemtype_data": [{"description": [
                {"lang": "en", "value": c} for c in rec["cwes"]]}]},
            "references": {"reference_data": [{"url": u, "name": u, "refsource": "MISC", "tags": []}
                                              for u in rec["refs"]]},
            "description": {"description_data": [{"lang": "en", "value": d} for d in rec["descriptions"]]},
        },
        "configurations": {"CVE_data_version": "4.0",
                           "nodes": [{"operator": "OR", "cpe_match": cpes}] if cpes else []},
        "impact": impact,
        "publishedDate": nvd_ts(rec["published"]),
        "lastModifiedDate": nvd_ts(rec["modified"]),
    }


def esc(s):
    return "".join("\\" + ch if not (ch.isalnum() or ch in "_-.") else ch for ch in s)


def feed(items):
    return {
        "CVE_data_type": "CVE",
        "CVE_data_format": "MITRE",
        "CVE_data_version": "4.0",
        "CVE_data_numberOfCVEs": str(len(items)),
        "CVE_data_timestamp": "2018-05-21T07:00Z",
        "CVE_Items": items,
    }


def dump(obj):
    return (json.dumps(obj, indent=1, ensure_ascii=False) + "\n").encode()


def page_html(kind, date, title):
    if kind == "securityfocus":
        return (f"<html><head><title>{title}</title></head><body><table>"
                f"<tr><td><span class=\"label\">Bugtraq ID:</span></td><td>{date.toordinal() % 90000}</td></tr>"
                f"<tr><td><span class=\"label\">Published:</span></td><td>{date.strftime('%b %d %Y')} 12:00AM</td></tr>"
                "</table></body></html>\n")
    if kind == "securitytracker":
        return (f"<html><body><h1>{title}</h1><b>SecurityTracker Alert ID:</b> {date.toordinal() % 100000}<br>"
                f"<b>Date:</b>  {date.strftime('%b')} {date.day} {date.year}<br></body></html>\n")
    if kind == "bugzilla":
        return (f"<html><body><table><tr><th>Bug</th><td>{title}</td></tr>"
                f"<tr><th>Reported:</th><td>{date.isoformat()} 10:11 PST by reporter</td></tr>"
                "</table></body></html>\n")
    if kind == "meta":
        return (f"<html><head><meta property=\"article:published_time\" content=\"{date.isoformat()}T09:00:00Z\">"
                f"<title>{title}</title></head><body><p>Advisory text.</p></body></html>\n")
    if kind == "prose":
        return (f"<html><body><h2>{title}</h2><p>Posted on {date.strftime('%B')} {date.day}, {date.year} "
                "by the security team.</p></body></html>\n")
    if kind == "mail":
        return (f"<html><body><pre>Date: {date.strftime('%a')}, {date.day} {date.strftime('%b')} {date.year} "
                f"10:00:00 +0000\nSubject: {title}\n</pre></body></html>\n")
    if kind == "undated":
        return f"<html><body><p>{title}</p><p>No date on this page.</p></body></html>\n"
    raise ValueError(kind)


def domain_of(url):
    host = url.split("//", 1)[1].split("/", 1)[0]
    parts = host.split(".")
    return ".".join(parts[-2:])


class Builder:
    def __init__(self, seed):
        self.rng = random.Random(seed)
        self.records = []
        self.pages = {}  # url -> html
        self.seq = {}

    def new_id(self, year):
        self.seq[year] = self.seq.get(year, 1000 + self.rng.randrange(0, 50)) + 1 + self.rng.randrange(0, 3)
        return f"CVE-{year}-{self.seq[year]:04d}"

    def date_in(self, year):
        start = dt.date(year, 1, 1)
        return start + dt.timedelta(days=self.rng.randrange(0, 365))

    def cwe_set(self):
        r = self.rng.random()
        if r < 0.08:
            return ["NVD-CWE-Other"]
        if r < 0.12:
            return ["NVD-CWE-noinfo"]
        if r < 0.14:
            return []
        return [self.rng.choices(CWES, CWE_WEIGHTS)[0]]

    def references(self, vendor, product, published, cve_id):
        """Reference URLs plus stored pages whose dates drive the lag."""
        rng = self.rng
        lag = rng.choices([0, rng.randrange(1, 7), rng.randrange(7, 60), rng.randrange(60, 400)],
                          [38, 32, 20, 10])[0]
        edd = published - dt.timedelta(days=lag)
        n = rng.choice([1, 2, 2, 3])
        refs = []
        for k in range(n):
            kind = rng.choices(["securityfocus", "securitytracker", "bugzilla", "meta", "prose", "mail", "xforce"],
                               [30, 15, 10, 12, 10, 10, 13])[0]
            num = rng.randrange(10000, 99999)
            if kind == "securityfocus":
                url = f"http://www.securityfocus.com/bid/{num}"
            elif kind == "securitytracker":
                url = f"http://www.securitytracker.com/id/{num}"
            elif kind == "bugzilla":
                host = BUGZILLA.get(vendor, "bugzilla.redhat.com")
                url = f"https://{host}/show_bug.cgi?id={num}"
            elif kind == "meta":
                url = f"https://blog.{vendor.strip('!').replace('_', '')}.example/{cve_id.lower()}"
            elif kind == "prose":
                url = f"https://jvn.jp/en/jp/JVN{num}/index.html"
            elif kind == "mail":
                url = f"http://www.openwall.com/lists/oss-security/{published.year}/{num % 12 + 1:02d}/{num % 28 + 1}"
            else:
                url = f"https://exchange.xforce.ibmcloud.com/vulnerabilities/{num}"
            refs.append(url)
            if kind == "xforce" or rng.random() < 0.15:
                continue  # no stored page
            if k == 0:
                d = edd
            else:
                # Later corroborating pages, occasionally a post-publication update.
                d = edd + dt.timedelta(days=rng.randrange(0, 5)) if rng.random() < 0.8 else \
                    published + dt.timedelta(days=rng.randrange(3, 90))
                if d > published and rng.random() < 0.5:
                    d = published
            self.pages[url] = page_html("undated" if rng.random() < 0.07 else
                                        ("securityfocus" if kind == "securityfocus" else kind), d,
                                        f"{vendor} {product} advisory")
        return refs

    def record(self, cve_id, vendor, product, published, scored, descriptions=None, cwes=None, v2_hint=None):
        rng = self.rng
        v2 = pick_v2(rng, v2_hint) if scored != "none" else None
        v3 = v3_from_v2(rng, v2) if scored == "dual" else None
        rec = {
            "id": cve_id,
            "published": published,
            "modified": published + dt.timedelta(days=rng.randrange(0, 400)),
            "descriptions": descriptions or [
                f"{rng.choice(['Multiple', 'Unspecified', 'A'])} vulnerability in {product.replace('_', ' ')} "
                f"allows {rng.choice(['remote', 'local', 'remote authenticated'])} attackers to "
                f"{rng.choice(['execute arbitrary code', 'cause a denial of service', 'obtain sensitive information', 'inject arbitrary web script'])}."],
            "cwes": self.cwe_set() if cwes is None else cwes,
            "cpes": [(vendor, product, f"{rng.randrange(1, 12)}.{rng.randrange(0, 10)}")],
            "refs": self.references(vendor, product, published, cve_id),
            "v2": v2,
            "v3": v3,
        }
        self.records.append(rec)
        return rec


def scored_for(year, rng):
    if year >= 2016:
        return "dual" if rng.random() < 0.93 else "none"
    return "v2"


def build_workspace():
    b = Builder(20180521)
    rng = b.rng

    # Worked examples.
    b.record("CVE-2011-0700", "wordpress", "wordpress", dt.date(2011, 3, 14), "v2",
             descriptions=["Multiple cross-site scripting (XSS) vulnerabilities in WordPress before 3.0.5 allow "
                           "remote authenticated users to inject arbitrary web script or HTML."],
             cwes=["CWE-79"])
    rec = b.records[-1]
    rec["refs"] = ["http://www.securityfocus.com/bid/46249", "http://wordpress.org/news/2011/02/wordpress-3-0-5/"]
    b.pages["http://www.securityfocus.com/bid/46249"] = page_html("securityfocus", dt.date(2011, 2, 7),
                                                                  "WordPress Multiple Cross Site Scripting Vulnerabilities")

    b.record("CVE-2007-0838", "microsoft", "office", dt.date(2007, 2, 9), "v2",
             descriptions=["Microsoft Word allows user-assisted remote attackers to cause a denial of service via a "
                           "crafted document.",
                           "CWE-835: Loop with Unreachable Exit Condition ('Infinite Loop')"],
             cwes=["NVD-CWE-Other"])
    for cid, day in (("CVE-2008-4019", 14), ("CVE-2008-3471", 14)):
        b.record(cid, "microsft", "windows", dt.date(2008, 10, day), "v2", v2_hint="high", cwes=["CWE-94"])

    # More placeholder records recoverable from their descriptions, one
    # quarantined id and one record that gains a second concrete id.
    extra = [
        (["NVD-CWE-Other"], "Buffer overflow in the parser. CWE-119: Improper Restriction of Operations within the "
                            "Bounds of a Memory Buffer"),
        (["NVD-CWE-Other"], "SQL injection in the login form (cwe-89)."),
        (["NVD-CWE-noinfo"], "Use-after-free in the renderer; see CWE-416."),
        ([], "Path traversal via crafted filename, CWE-22."),
        (["NVD-CWE-Other"], "Issue tracked as CWE-9999 by the reporter."),
        (["CWE-20"], "Improper validation leads to CWE-125 out-of-bounds read."),
    ]
    for k, (cwes, text) in enumerate(extra):
        year = 2010 + k
        v, p = BACKGROUND[k]
        b.record(b.new_id(year), v, p, b.date_in(year), "v2", descriptions=[text], cwes=cwes)

    # Named vendor and product cases.
    for vendor, product, n in NAMED:
        if (vendor, product) in (("microsft", "windows"),):
            continue  # the two worked-example ids above
        for _ in range(n if vendor != "microsoft" or product != "office" else n - 1):
            year = rng.randrange(2004, 2019)
            b.record(b.new_id(year), vendor, product, b.date_in(year), scored_for(year, rng))

    # Year-end bulk publication, as seen at the end of 2004.
    for _ in range(14):
        v, p = rng.choice(BACKGROUND)
        b.record(b.new_id(2004), v, p, dt.date(2004, 12, 31), "v2")
    for _ in range(6):
        v, p = rng.choice(BACKGROUND)
        b.record(b.new_id(2005), v, p, dt.date(2005, 5, 2), "v2")

    # Background population, weighted toward the dual-scored years.
    for _ in range(330):
        year = rng.choices(range(2004, 2019), [3, 3, 4, 4, 4, 4, 4, 4, 4, 5, 5, 6, 22, 26, 20])[0]
        v, p = rng.choice(BACKGROUND)
        b.record(b.new_id(year), v, p, b.date_in(year), scored_for(year, rng))

    # Legacy identifier carried in an early feed.
    b.record("CVE-1999-0067", "apache", "http_server", dt.date(1999, 12, 30), "v2")

    return b


def write_workspace(b):
    feeds = WS / "feeds"
    pages = WS / "pages"
    for d in (feeds, pages):
        d.mkdir(parents=True, exist_ok=True)
        for f in sorted(d.rglob("*"), reverse=True):
            f.unlink() if f.is_file() else f.rmdir()

    by_year = {}
    for rec in b.records:
        year = int(rec["id"].split("-")[1])
        by_year.setdefault(max(year, 2002), []).append(rec)
    for year, recs in sorted(by_year.items()):
        recs.sort(key=lambda r: (int(r["id"].split("-")[1]), int(r["id"].split("-")[2])))
        items = [item(r) for r in recs]
        if year == 2009:
            broken = item(recs[0])
            broken["cve"]["CVE_data_meta"]["ID"] = "CVE-2009-0001"
            broken["cve"]["description"]["description_data"] = []
            items.append(broken)
        data = dump(feed(items))
        if year == 2005:
            (feeds / f"nvdcve-1.1-{year}.json.gz").write_bytes(gzip.compress(data, mtime=0))
        else:
            (feeds / f"nvdcve-1.1-{year}.json").write_bytes(data)

    # A later "modified" feed re-publishes two records with fresh edits.
    modified = []
    for rec in (b.records[10], b.records[40]):
        newer = dict(rec)
        newer["modified"] = dt.date(2018, 5, 20)
        newer["descriptions"] = rec["descriptions"] + ["Updated analysis."]
        modified.append(item(newer))
    (feeds / "nvdcve-1.1-modified.json").write_bytes(dump(feed(modified)))

    for url, html in sorted(b.pages.items()):
        sha = hashlib.sha256(url.encode()).hexdigest()
        d = pages / domain_of(url)
        d.mkdir(parents=True, exist_ok=True)
        (d / f"{sha}.html").write_text(html)
        (d / f"{sha}.url").write_text(url + "\n")

    (WS / "cwe_catalog.tsv").write_text("# id\tname\n" + "".join(f"{i}\t{n}\n" for i, n in CATALOG))

    (WS / "vulncure.conf").write_text(CONFIG)

    lists = WS / "vendor_lists"
    lists.mkdir(exist_ok=True)
    (lists / "securityfocus.txt").write_text((TESTDATA / "vendor_list_100.txt").read_text())
    (lists / "securitytracker.txt").write_text(
        "\n".join(["Microsoft", "microsft", "Cisco", "Oracle", "oracle_corporation", "Apache", "lynx", "Google",
                   "Mozilla", "IBM", "Apple", "Adobe"]) + "\n")


def vendor_list_100():
    rng = random.Random(93)
    names = ["bea", "bea_systems", "avast!", "microsft", "lms", "lynx", "windows", "oracle_corporation",
             "microsoft", "oracle", "cisco", "apache", "mozilla", "google", "adobe", "linux", "php", "wordpress",
             "redhat", "ibm", "apple", "debian", "nativesolutions"]
    while len(names) < 93:
        n = "".join(rng.choice("abcdefghijklmnopqrstuvwxyz") for _ in range(rng.randrange(4, 10)))
        if n not in names:
            names.append(n + rng.choice(["", "_inc", "_software", "_project", " labs"]))
    dups = ["Microsoft", "BEA", "Oracle", "CISCO", "Apache", "Google", "Bea_Systems"]
    lines = names[:50] + dups[:4] + names[50:] + dups[4:]
    assert len(lines) == 100
    return "\n".join(lines) + "\n"


def build_sample100():
    b = Builder(100)
    rng = b.rng
    for k in range(100):
        year = 2014 + k % 5
        v, p = BACKGROUND[k % len(BACKGROUND)]
        b.record(b.new_id(year), v, p, b.date_in(year), "dual" if k % 3 else ("v2" if k % 2 else "none"))
    recs = sorted(b.records, key=lambda r: (int(r["id"].split("-")[1]), int(r["id"].split("-")[2])))
    return dump(feed([item(r) for r in recs]))


def build_malformed():
    b = Builder(7)
    good = [b.record(b.new_id(2017), "php", "php", dt.date(2017, 3, 1), "dual") for _ in range(3)]
    items = [item(r) for r in good]
    no_desc = item(good[0]); no_desc["cve"]["CVE_data_meta"]["ID"] = "CVE-2017-9001"
    no_desc["cve"]["description"]["description_data"] = [{"lang": "en", "value": ""}]
    bad_id = item(good[1]); bad_id["cve"]["CVE_data_meta"]["ID"] = "CAN-2017-9002"
    bad_date = item(good[2]); bad_date["cve"]["CVE_data_meta"]["ID"] = "CVE-2017-9003"
    bad_date["publishedDate"] = "2017-13-45T00:00Z"
    bad_cvss = item(good[0]); bad_cvss["cve"]["CVE_data_meta"]["ID"] = "CVE-2017-9004"
    bad_cvss["impact"]["baseMetricV2"]["cvssV2"]["baseScore"] = 11.5
    bad_struct = {"not_cve": True}
    return dump(feed(items + [no_desc, bad_id, bad_date, bad_cvss, bad_struct]))


def main():
    TESTDATA.mkdir(parents=True, exist_ok=True)
    (TESTDATA / "vendor_list_100.txt").write_text(vendor_list_100())
    (TESTDATA / "nvdcve-1.1-sample100.json").write_bytes(build_sample100())
    (TESTDATA / "nvdcve-1.1-malformed.json").write_bytes(build_malformed())
    b = build_workspace()
    write_workspace(b)
    print(f"workspace records: {len(b.records)}, pages: {len(b.pages)}")


if __name__ == "__main__":
    main()
