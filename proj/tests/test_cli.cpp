#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "chronoscale/cli.hpp"
#include "support/schema_check.hpp"

using namespace chronoscale;
namespace fs = std::filesystem;

namespace {

const fs::path kSource{CHRONOSCALE_SOURCE_DIR};
fs::path scenario(const std::string& name) { return kSource / "scenarios" / (name + ".json"); }
fs::path data(const std::string& name) { return kSource / "tests/data" / (name + ".json"); }

struct Run {
    int code;
    std::string out;
    std::string err;
};

template <typename Fn>
Run capture(Fn&& fn) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = fn(out, err);
    return {code, out.str(), err.str()};
}

Run solve(const fs::path& path, cli::Format format) {
    return capture([&](std::ostream& o, std::ostream& e) { return cli::cmd_solve({path, std::nullopt, format}, o, e); });
}

}  // namespace

TEST_CASE("format_number round-trips") {
    CHECK(cli::format_number(0.1) == "0.1");
    CHECK(cli::format_number(1024) == "1024");
    CHECK(std::stod(cli::format_number(1.0 / 3.0)) == 1.0 / 3.0);
    CHECK(cli::format_number(kInfinity) == "inf");
}

TEST_CASE("solve writes schema-valid CSV and JSON") {
    const auto csv_schema = testsupport::load_json(kSource / "schema/trajectory.csv.schema.json");
    const auto json_schema = testsupport::load_json(kSource / "schema/trajectory.schema.json");
    for (const char* name : {"population", "oscillator", "state_gap", "pab_exp"}) {
        CAPTURE(name);
        const Run csv = solve(scenario(name), cli::Format::Csv);
        REQUIRE(csv.code == 0);
        const std::size_t dim = std::string(name) == "oscillator" ? 2 : 1;
        CHECK(testsupport::validate_trajectory_csv(csv_schema, csv.out, dim).empty());

        const Run json = solve(scenario(name), cli::Format::Json);
        REQUIRE(json.code == 0);
        CHECK(testsupport::validate(json_schema, nlohmann::json::parse(json.out)).empty());
    }
}

TEST_CASE("solve output is deterministic") {
    CHECK(solve(scenario("population"), cli::Format::Csv).out == solve(scenario("population"), cli::Format::Csv).out);
    CHECK(solve(scenario("state_gap"), cli::Format::Json).out == solve(scenario("state_gap"), cli::Format::Json).out);
}

TEST_CASE("exit codes") {
    const Run bad = solve(data("overlapping_pieces"), cli::Format::Csv);
    CHECK(bad.code == cli::kExitSchema);
    CHECK(bad.err.find("overlaps") != std::string::npos);
    CHECK(solve(kSource / "no_such_file.json", cli::Format::Csv).code == cli::kExitSchema);

    const Run lipschitz = capture([](std::ostream& o, std::ostream& e) { return cli::cmd_verify(data("understated_lipschitz"), o, e); });
    CHECK(lipschitz.code == cli::kExitFailure);
    CHECK(lipschitz.err.find("L") != std::string::npos);

    cli::CompareArgs args;
    args.scenario = scenario("integers_exp");
    args.oracle = "closed-form:nope";
    CHECK(capture([&](std::ostream& o, std::ostream& e) { return cli::cmd_compare(args, o, e); }).code == cli::kExitFailure);
}

TEST_CASE("classify") {
    cli::ClassifyArgs args;
    args.scenario = data("p11_window");
    args.window = std::pair{0.0, 4.0};
    args.json = true;
    const Run r = capture([&](std::ostream& o, std::ostream& e) { return cli::cmd_classify(args, o, e); });
    REQUIRE(r.code == 0);
    const auto doc = nlohmann::json::parse(r.out);
    REQUIRE(doc["scattered_points"].size() == 2);
    CHECK(doc["scattered_points"][0]["t"] == 1.0);
    CHECK(doc["scattered_points"][1]["t"] == 3.0);
    CHECK(doc["scattered_points"][1]["mu"] == 1.0);

    args.json = false;
    const Run text = capture([&](std::ostream& o, std::ostream& e) { return cli::cmd_classify(args, o, e); });
    CHECK(text.out.find("scattered points") != std::string::npos);
}

TEST_CASE("verify reports match the schema") {
    const auto schema = testsupport::load_json(kSource / "schema/theorem_report.schema.json");
    for (const char* name : {"verify_exp", "verify_integers", "verify_zero"}) {
        CAPTURE(name);
        const Run r = capture([&](std::ostream& o, std::ostream& e) { return cli::cmd_verify(scenario(name), o, e); });
        REQUIRE(r.code == 0);
        const auto doc = nlohmann::json::parse(r.out);
        CHECK(testsupport::validate(schema, doc).empty());
        CHECK(doc["status"] == "converged");
    }
    const Run half = capture([](std::ostream& o, std::ostream& e) { return cli::cmd_verify(data("alpha_half"), o, e); });
    CHECK(nlohmann::json::parse(half.out)["alpha"] == 0.5);
}

TEST_CASE("compare against each oracle") {
    const auto run = [](const std::string& name, const std::string& oracle) {
        cli::CompareArgs args;
        args.scenario = scenario(name);
        args.oracle = oracle;
        return capture([&](std::ostream& o, std::ostream& e) { return cli::cmd_compare(args, o, e); });
    };
    CHECK(run("integers_exp", "recursion").code == 0);
    CHECK(run("integers_exp", "closed-form:hz-exp").code == 0);
    CHECK(run("unit_interval_exp", "reference").code == 0);
    CHECK(run("unit_interval_exp", "closed-form:exp").code == 0);
    CHECK(run("pab_exp", "closed-form:pab-exp").code == 0);
    // The recursion cannot cross dense runs.
    CHECK(run("pab_exp", "recursion").code == cli::kExitFailure);
}

TEST_CASE("batch solve writes one file per scenario in name order") {
    const fs::path out_dir = fs::temp_directory_path() / "chronoscale_batch_test";
    fs::remove_all(out_dir);
    std::ostringstream err;
    const int code = cli::cmd_solve_batch({kSource / "scenarios", out_dir, cli::Format::Json, 3}, err);
    CHECK(code == 0);
    for (const auto& entry : fs::directory_iterator(kSource / "scenarios")) {
        const fs::path written = out_dir / (entry.path().stem().string() + ".json");
        CAPTURE(written.string());
        REQUIRE(fs::exists(written));
        CHECK(testsupport::read_text(written) == solve(entry.path(), cli::Format::Json).out);
    }
    fs::remove_all(out_dir);
}
