#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "vulncure/cwe.hpp"
#include "vulncure/dates.hpp"
#include "vulncure/names.hpp"
#include "vulncure/severity.hpp"
#include "vulncure/workspace.hpp"

namespace py = pybind11;
using namespace vulncure;

namespace {

CvssVersion version_of(const std::string& v) {
    if (v == "v2") return CvssVersion::V2;
    if (v == "v3") return CvssVersion::V3;
    throw FormatError("version must be v2 or v3");
}

py::dict stage_dict(const workspace::StageResult& r) {
    py::dict counts;
    for (const auto& [k, v] : r.counts) counts[py::str(k)] = v;
    py::dict out;
    out["stage"] = r.stage;
    out["counts"] = counts;
    out["outputs"] = r.outputs;
    out["warnings"] = r.warnings;
    return out;
}

py::dict disclosure(const std::string& published, const std::vector<std::pair<std::string, std::string>>& pages) {
    CveRecord r;
    r.id = CveId(1999, 1);
    r.published = Date::parse(published);
    r.last_modified = r.published;
    std::vector<std::pair<std::string, Date>> dated;
    for (const auto& [url, d] : pages) dated.emplace_back(url, Date::parse(d));
    const auto est = dates::estimate_disclosure(r, dated);
    py::dict out;
    out["edd"] = est.edd.iso();
    out["lag_days"] = est.lag_days;
    out["source_url"] = est.source_url;
    return out;
}

class PyWorkspace {
public:
    PyWorkspace(const std::filesystem::path& config, std::optional<std::uint64_t> seed)
        : ws_(load(config, seed)) {}

    py::dict ingest() { return stage_dict(ws_.ingest()); }
    py::dict estimate_dates() { return stage_dict(ws_.estimate_dates()); }
    py::dict name_candidates() { return stage_dict(ws_.name_candidates()); }
    py::dict name_apply() { return stage_dict(ws_.name_apply()); }
    py::dict extract_cwe() { return stage_dict(ws_.extract_cwe()); }
    py::dict train_severity() { return stage_dict(ws_.train_severity()); }
    py::dict backfill_v3() { return stage_dict(ws_.backfill_v3()); }
    py::dict report(const std::string& corpus) { return stage_dict(ws_.report(analysis::corpus_tag_from_string(corpus))); }
    py::list pipeline() {
        py::list out;
        for (const auto& r : ws_.pipeline()) out.append(stage_dict(r));
        return out;
    }
    std::filesystem::path output_dir() const { return ws_.config().output_dir; }

private:
    static workspace::Workspace load(const std::filesystem::path& config, std::optional<std::uint64_t> seed) {
        auto c = workspace::Config::load(config);
        if (seed) c.set_seed(*seed);
        return workspace::Workspace(std::move(c));
    }
    workspace::Workspace ws_;
};

}  // namespace

PYBIND11_MODULE(_vulncure, m) {
    m.doc() = "NVD curation: disclosure dates, name consolidation, severity backfill, CWE recovery";
    m.attr("__version__") = VULNCURE_VERSION;

    auto base = py::register_exception<Error>(m, "VulncureError");
    py::register_exception<FormatError>(m, "FormatError", base.ptr());
    py::register_exception<RangeError>(m, "RangeError", base.ptr());
    py::register_exception<LookupError>(m, "LookupError", base.ptr());
    auto pre = py::register_exception<PreconditionError>(m, "PreconditionError", base.ptr());
    py::register_exception<workspace::MissingPrerequisite>(m, "MissingPrerequisite", pre.ptr());
    py::register_exception<names::UndecidedPairsError>(m, "UndecidedPairsError", base.ptr());
    py::register_exception<IoError>(m, "IoError", base.ptr());

    m.def(
        "score_to_label",
        [](double score, const std::string& version) {
            return std::string(to_string(score_to_label(score, version_of(version))));
        },
        py::arg("score"), py::arg("version"), "Severity label for a base score under v2 or v3 thresholds.");

    m.def("levenshtein", [](const std::string& a, const std::string& b) { return names::levenshtein(a, b); });
    m.def("longest_common_substring",
          [](const std::string& a, const std::string& b) { return names::longest_common_substring(a, b); });
    m.def("normalize_tokens", [](const std::string& s) { return names::normalize_tokens(s); });
    m.def("abbreviation", [](const std::string& s) { return names::abbreviation(s); });

    m.def("extract_cwe_ids", [](const std::string& s) { return cwe::extract_cwe_ids(s); });
    m.def("preprocess_description", [](const std::string& s) { return cwe::preprocess_description(s); });

    m.def("extract_domain", [](const std::string& url) { return dates::extract_domain(url); });
    m.def(
        "page_date",
        [](const std::string& domain, const std::string& html) -> std::optional<std::string> {
            static const auto registry = dates::ExtractorRegistry::with_defaults();
            const auto d = dates::extract_page_date(domain, html, registry);
            if (!d) return std::nullopt;
            return d->iso();
        },
        py::arg("domain"), py::arg("html"), "ISO date found on a reference page, or None.");
    m.def("estimate_disclosure", &disclosure, py::arg("published"), py::arg("page_dates"),
          "EDD and lag for an NVD publication date and (url, ISO date) pairs.");
    m.def("sha256_hex", [](const std::string& s) { return dates::sha256_hex(s); });

    py::class_<PyWorkspace>(m, "Workspace")
        .def(py::init<const std::filesystem::path&, std::optional<std::uint64_t>>(), py::arg("config"),
             py::arg("seed") = py::none())
        .def("ingest", &PyWorkspace::ingest)
        .def("estimate_dates", &PyWorkspace::estimate_dates)
        .def("name_candidates", &PyWorkspace::name_candidates)
        .def("name_apply", &PyWorkspace::name_apply)
        .def("extract_cwe", &PyWorkspace::extract_cwe)
        .def("train_severity", &PyWorkspace::train_severity)
        .def("backfill_v3", &PyWorkspace::backfill_v3)
        .def("report", &PyWorkspace::report, py::arg("corpus") = "corrected")
        .def("pipeline", &PyWorkspace::pipeline)
        .def_property_readonly("output_dir", &PyWorkspace::output_dir);
}
