#include "ifcaudit/benchkit.hpp"
#include "ifcaudit/census.hpp"
#include "ifcaudit/geomcheck.hpp"
#include "ifcaudit/geomgen.hpp"
#include "ifcaudit/georef.hpp"
#include "ifcaudit/schema.hpp"
#include "ifcaudit/spf.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace ifcaudit;

namespace {

enum Exit { kOk = 0, kFindings = 1, kUsage = 2 };

// Failure to read, write or parse; reported with exit code 2.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Results go to --out when given, otherwise to standard output.
class Output {
public:
    explicit Output(const std::string& path) {
        if (path.empty() || path == "-") return;
        file_.open(path, std::ios::binary);
        if (!file_) throw IoError("cannot write " + path);
    }
    std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

private:
    std::ofstream file_;
};

spf::InstanceGraph load(const std::string& path) {
    try {
        return spf::read_spf_file(path);
    } catch (const spf::ParseError& e) {
        throw IoError(path + ":" + std::to_string(e.line()) + ": " + e.what());
    } catch (const std::runtime_error& e) {
        throw IoError(e.what());
    }
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

nlohmann::json load_json(const std::string& path) {
    try {
        return nlohmann::json::parse(slurp(path));
    } catch (const nlohmann::json::exception& e) {
        throw IoError(path + ": " + e.what());
    }
}

void report_diagnostics(const spf::InstanceGraph& g, const std::string& path) {
    for (const auto& d : g.diagnostics())
        std::cerr << path << ":" << d.line << ": " << spf::to_string(d.code) << ": " << d.message << "\n";
}

schema::SchemaVersion schema_or_default(const spf::InstanceGraph& g, const std::string& path) {
    if (auto v = schema::schema_of(g.header())) return *v;
    std::cerr << path << ": unrecognised FILE_SCHEMA, assuming IFC4\n";
    return schema::SchemaVersion::IFC4;
}

void write_json(std::ostream& out, const nlohmann::json& j) { out << j.dump(2) << "\n"; }

std::int64_t generation_timestamp() {
    if (const char* env = std::getenv("IFCAUDIT_TIMESTAMP")) {
        try {
            std::size_t used = 0;
            auto t = std::stoll(env, &used);
            if (used == std::string_view(env).size()) return t;
        } catch (const std::exception&) {
        }
        throw IoError("IFCAUDIT_TIMESTAMP must be an integer number of seconds");
    }
    return std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch())
        .count();
}

nlohmann::json census_json(const census::Census& c) {
    return {{"schema", c.schema ? nlohmann::json(schema::to_string(*c.schema)) : nlohmann::json(nullptr)},
            {"total", c.total},
            {"bytes", c.byte_size},
            {"counts", c.counts}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Audit IFC files: parse, census, diff, georeferencing, geometry suite and benchmark reports"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "ifcaudit 0.1.0");

    std::string out_path, format;

    // parse
    auto* parse_cmd = app.add_subcommand("parse", "Parse a STEP file and summarise it");
    std::string parse_file, rewrite_path;
    parse_cmd->add_option("file", parse_file, "Input file")->required();
    parse_cmd->add_option("--rewrite", rewrite_path, "Write the parsed graph back out to this path");
    parse_cmd->add_option("-o,--out", out_path, "Output file");

    // census
    auto* census_cmd = app.add_subcommand("census", "Count instances per entity type");
    std::string census_file;
    census_cmd->add_option("file", census_file, "Input file")->required();
    census_cmd->add_option("--format", format, "json, csv or markdown")->check(CLI::IsMember({"json", "csv", "markdown"}));
    census_cmd->add_option("-o,--out", out_path, "Output file");

    // diff
    auto* diff_cmd = app.add_subcommand("diff", "Compare the censuses of two files");
    std::string diff_ref, diff_exp;
    bool expect_unchanged = false;
    diff_cmd->add_option("reference", diff_ref, "Reference file")->required();
    diff_cmd->add_option("exported", diff_exp, "Exported file")->required();
    diff_cmd->add_option("--format", format, "json, csv or markdown")->check(CLI::IsMember({"json", "csv", "markdown"}));
    diff_cmd->add_flag("--expect-unchanged", expect_unchanged, "Exit 1 when the censuses differ");
    diff_cmd->add_option("-o,--out", out_path, "Output file");

    // georef
    auto* georef_cmd = app.add_subcommand("georef", "Detect levels of georeferencing");
    std::string georef_file, georef_schema;
    georef_cmd->add_option("file", georef_file, "Input file")->required();
    georef_cmd->add_option("--schema", georef_schema, "Override the schema read from the header");
    georef_cmd->add_option("-o,--out", out_path, "Output file");

    // generate
    auto* gen_cmd = app.add_subcommand("generate", "Write the geometry test suite");
    std::string gen_schema, manifest_out;
    geomgen::SuiteOptions gen_opt;
    gen_cmd->add_option("--schema", gen_schema, "ifc2x3 or ifc4")->required();
    gen_cmd->add_option("-o,--out", out_path, "Output IFC file")->required();
    gen_cmd->add_option("--spacing", gen_opt.spacing, "Grid spacing in metres")->check(CLI::PositiveNumber);
    gen_cmd->add_option("--precision", gen_opt.precision, "Context precision")->check(CLI::PositiveNumber);
    gen_cmd->add_option("--manifest", manifest_out, "Write the item manifest JSON here");
    gen_cmd->add_flag("--below-tolerance", gen_opt.include_below_tolerance, "Add an extrusion thinner than the precision");

    // check
    auto* check_cmd = app.add_subcommand("check", "Check validity and evaluate the geometry items of a file");
    std::string check_file, check_manifest, mesh_out;
    int segments = geomcheck::kDefaultSegments;
    bool expect_manifest = false;
    check_cmd->add_option("file", check_file, "Input file")->required();
    check_cmd->add_option("--manifest", check_manifest, "Manifest written by generate");
    check_cmd->add_option("--segments", segments, "Tessellation segments per full circle")->check(CLI::Range(3, 65536));
    check_cmd->add_option("--mesh-out", mesh_out, "Write all item meshes as an OBJ file");
    check_cmd->add_flag("--expect-manifest", expect_manifest, "Exit 1 when a verdict differs from the manifest");
    check_cmd->add_option("-o,--out", out_path, "Output file");

    // report
    auto* report_cmd = app.add_subcommand("report", "Round-trip and benchmark answer reports");
    report_cmd->require_subcommand(1);
    auto* rt_cmd = report_cmd->add_subcommand("roundtrip", "Compare a reference model with its re-export");
    std::string rt_ref, rt_exp;
    rt_cmd->add_option("reference", rt_ref, "Reference file")->required();
    rt_cmd->add_option("exported", rt_exp, "Exported file")->required();
    rt_cmd->add_option("--format", format, "json or markdown")->check(CLI::IsMember({"json", "markdown"}));
    rt_cmd->add_flag("--expect-unchanged", expect_unchanged, "Exit 1 unless the export is unchanged");
    rt_cmd->add_option("-o,--out", out_path, "Output file");
    auto* ans_cmd = report_cmd->add_subcommand("answers", "Aggregate benchmark answers");
    std::string answers_file, answers_dir;
    ans_cmd->add_option("records", answers_file, "Answer records (CSV or JSON lines)")->required();
    ans_cmd->add_option("-o,--out", answers_dir, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*parse_cmd) {
            auto g = load(parse_file);
            report_diagnostics(g, parse_file);
            std::map<std::string, std::size_t> types;
            for (auto inst : g) ++types[std::string(inst.type_name())];
            auto v = schema::schema_of(g.header());
            Output out(out_path);
            write_json(out.stream(), {{"file", parse_file},
                                      {"schema", g.header().file_schema},
                                      {"recognised_schema", v ? nlohmann::json(schema::to_string(*v)) : nlohmann::json(nullptr)},
                                      {"instances", g.size()},
                                      {"entity_types", types.size()},
                                      {"bytes", g.byte_size()},
                                      {"dangling_references", g.dangling_references().size()},
                                      {"diagnostics", g.diagnostics().size()}});
            if (!rewrite_path.empty()) {
                std::ofstream f(rewrite_path, std::ios::binary);
                if (!f) throw IoError("cannot write " + rewrite_path);
                spf::write_spf(g, f);
            }
            return kOk;
        }

        if (*census_cmd) {
            auto g = load(census_file);
            report_diagnostics(g, census_file);
            auto c = census::census(g);
            Output out(out_path);
            if (format == "csv") {
                census::write_census_csv(out.stream(), c);
            } else if (format == "markdown") {
                census::write_census_markdown(out.stream(), c);
            } else {
                write_json(out.stream(), census_json(c));
            }
            return kOk;
        }

        if (*diff_cmd) {
            auto ref = census::census(load(diff_ref));
            auto exp = census::census(load(diff_exp));
            auto d = census::diff(ref, exp);
            for (const auto& msg : d.diagnostics) std::cerr << msg << "\n";
            Output out(out_path);
            if (format == "csv" || format == "markdown") {
                auto rows = census::diff_rows(ref, exp);
                if (format == "csv") {
                    census::write_diff_csv(out.stream(), rows);
                } else {
                    census::write_diff_markdown(out.stream(), rows);
                }
            } else {
                nlohmann::json groups = nlohmann::json::object();
                for (const auto& [g, v] : d.grouped_deltas) groups[std::string(schema::to_string(g))] = v;
                write_json(out.stream(), {{"deltas", d.deltas},
                                          {"lost_types", d.lost_types},
                                          {"gained_types", d.gained_types},
                                          {"grouped_deltas", groups},
                                          {"size_delta_bytes", d.size_delta_bytes},
                                          {"unchanged", d.empty()},
                                          {"diagnostics", d.diagnostics}});
            }
            return expect_unchanged && !d.empty() ? kFindings : kOk;
        }

        if (*georef_cmd) {
            auto g = load(georef_file);
            auto v = schema_or_default(g, georef_file);
            if (!georef_schema.empty()) {
                auto o = schema::parse_schema_version(georef_schema);
                if (!o) throw IoError("unknown schema '" + georef_schema + "'");
                v = *o;
            }
            Output out(out_path);
            write_json(out.stream(), georef::to_json(georef::detect_georef(g, v)));
            return kOk;
        }

        if (*gen_cmd) {
            auto v = schema::parse_schema_version(gen_schema);
            if (!v) throw IoError("unknown schema '" + gen_schema + "'");
            gen_opt.timestamp = generation_timestamp();
            auto suite = geomgen::generate_geometry_suite(*v, gen_opt);
            {
                Output out(out_path);
                spf::write_spf(suite.graph, out.stream());
            }
            if (!manifest_out.empty()) {
                Output m(manifest_out);
                write_json(m.stream(), geomgen::manifest_to_json(suite.manifest));
            }
            return kOk;
        }

        if (*check_cmd) {
            auto g = load(check_file);
            geomcheck::CheckOptions opt;
            opt.segments = segments;
            if (!check_manifest.empty()) {
                try {
                    opt.manifest = geomgen::manifest_from_json(load_json(check_manifest));
                } catch (const std::invalid_argument& e) {
                    throw IoError(check_manifest + ": " + e.what());
                }
            }
            auto report = geomcheck::check_file(g, opt);
            for (const auto& d : report.diagnostics) std::cerr << check_file << ": " << d << "\n";
            Output out(out_path);
            write_json(out.stream(), geomcheck::to_json(report));
            if (!mesh_out.empty()) {
                Output m(mesh_out);
                geomcheck::write_meshes_obj(m.stream(), report);
            }
            return expect_manifest && !report.mismatches().empty() ? kFindings : kOk;
        }

        if (*rt_cmd) {
            auto r = benchkit::roundtrip_report(load(rt_ref), load(rt_exp));
            Output out(out_path);
            if (format == "markdown") {
                benchkit::write_markdown(out.stream(), r);
            } else {
                write_json(out.stream(), benchkit::to_json(r));
            }
            return expect_unchanged && !r.unchanged ? kFindings : kOk;
        }

        if (*ans_cmd) {
            auto records = benchkit::read_answers(slurp(answers_file));
            std::error_code ec;
            fs::create_directories(answers_dir, ec);
            if (ec) throw IoError("cannot create " + answers_dir + ": " + ec.message());
            auto m = benchkit::synthesis_matrix(records);
            for (const auto& d : m.diagnostics) std::cerr << d << "\n";
            {
                Output md((fs::path(answers_dir) / "synthesis.md").string());
                benchkit::write_synthesis_markdown(md.stream(), m);
            }
            {
                Output csv((fs::path(answers_dir) / "scores.csv").string());
                benchkit::write_scores_csv(csv.stream(), m);
            }
            {
                Output js((fs::path(answers_dir) / "answers.json").string());
                write_json(js.stream(), benchkit::answers_json(records));
            }
            std::cerr << benchkit::kConsistencyCaveat << "\n";
            return kOk;
        }
    } catch (const IoError& e) {
        std::cerr << "ifcaudit: " << e.what() << "\n";
        return kUsage;
    } catch (const benchkit::IngestError& e) {
        std::cerr << "ifcaudit: " << answers_file << ": " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "ifcaudit: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}
