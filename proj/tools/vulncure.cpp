// vulncure: NVD curation pipeline over a workspace directory.
//
// Exit codes: 0 success, 1 data error, 2 missing prerequisite or bad usage.

#include <CLI11.hpp>

#include <iostream>

#include "vulncure/names.hpp"
#include "vulncure/workspace.hpp"

namespace {

using namespace vulncure;

void print(const workspace::StageResult& r) {
    std::cout << "[" << r.stage << "]\n";
    for (const auto& [k, v] : r.counts) std::cout << "  " << k << ": " << v << "\n";
    for (const auto& w : r.warnings) std::cerr << "warning: " << r.stage << ": " << w << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Detect and repair NVD data inconsistencies"};
    app.require_subcommand(1);

    std::string config_path = "vulncure.conf";
    std::optional<std::uint64_t> seed;
    std::string corpus = "corrected";
    app.add_option("--config", config_path, "Workspace config file")->capture_default_str();
    app.add_option("--seed", seed, "Override run.seed");
    app.add_option("--corpus", corpus, "Corpus for report: raw or corrected")
        ->check(CLI::IsMember({"raw", "corrected"}))
        ->capture_default_str();

    struct Command {
        const char* name;
        const char* help;
    };
    const Command commands[] = {
        {"ingest", "Load feeds into corpus.raw.json and reset the corrected corpus"},
        {"estimate-dates", "Estimate disclosure dates from stored reference pages"},
        {"name-candidates", "Write the vendor/product review worksheet"},
        {"name-apply", "Build the name mapping from decisions and apply it"},
        {"train-severity", "Train and evaluate v2-to-v3 severity models"},
        {"backfill-v3", "Predict v3 scores for records that lack one"},
        {"extract-cwe", "Recover CWE ids from descriptions"},
        {"report", "Write case-study reports for --corpus"},
        {"pipeline", "Run every stage in order"},
    };
    for (const auto& c : commands) app.add_subcommand(c.name, c.help);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        auto config = workspace::Config::load(config_path);
        if (seed) config.set_seed(*seed);
        workspace::Workspace ws(std::move(config));
        const auto tag = analysis::corpus_tag_from_string(corpus);
        const std::string cmd = app.get_subcommands().front()->get_name();

        if (cmd == "pipeline") {
            for (const auto& r : ws.pipeline()) print(r);
        } else if (cmd == "ingest") {
            print(ws.ingest());
        } else if (cmd == "estimate-dates") {
            print(ws.estimate_dates());
        } else if (cmd == "name-candidates") {
            print(ws.name_candidates());
        } else if (cmd == "name-apply") {
            print(ws.name_apply());
        } else if (cmd == "train-severity") {
            print(ws.train_severity());
        } else if (cmd == "backfill-v3") {
            print(ws.backfill_v3());
        } else if (cmd == "extract-cwe") {
            print(ws.extract_cwe());
        } else if (cmd == "report") {
            print(ws.report(tag));
        }
        return 0;
    } catch (const PreconditionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const names::UndecidedPairsError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
