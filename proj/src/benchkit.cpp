#include "ifcaudit/benchkit.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <ostream>
#include <set>
#include <sstream>

namespace ifcaudit::benchkit {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::string fmt(double v) {
    std::ostringstream o;
    o << v;
    return o.str();
}

constexpr TimingBucket kBuckets[] = {
    TimingBucket::Immediate,    TimingBucket::UnderMinute, TimingBucket::OneToFive,
    TimingBucket::FiveToTwenty, TimingBucket::TwentyToHour, TimingBucket::OverHour,
    TimingBucket::Crashed,      TimingBucket::NotPossible, TimingBucket::NoResult,
};

constexpr Category kCategories[] = {
    Category::Georeferencing, Category::Semantics,     Category::Geometry,      Category::Visualization,
    Category::Editing,        Category::Query,         Category::AnalysisType1, Category::AnalysisType2,
    Category::Export,         Category::Timing,        Category::GeometryItem,
};

}  // namespace

std::string_view to_string(SupportScore s) {
    switch (s) {
        case SupportScore::Full: return "Full";
        case SupportScore::Partial: return "Partial";
        case SupportScore::None: return "None";
        case SupportScore::NotApplicable: return "NotApplicable";
    }
    return "?";
}

std::optional<double> score_value(SupportScore s) {
    switch (s) {
        case SupportScore::Full: return 1.0;
        case SupportScore::Partial: return 0.5;
        case SupportScore::None: return 0.0;
        case SupportScore::NotApplicable: return std::nullopt;
    }
    return std::nullopt;
}

std::optional<SupportScore> parse_support_score(std::string_view s) {
    auto v = lower(trim(s));
    if (v == "1" || v == "1.0" || v == "full") return SupportScore::Full;
    if (v == "0.5" || v == ".5" || v == "partial") return SupportScore::Partial;
    if (v == "0" || v == "0.0" || v == "none") return SupportScore::None;
    if (v == "na" || v == "n/a" || v == "notapplicable" || v == "-") return SupportScore::NotApplicable;
    return std::nullopt;
}

std::string_view to_string(TimingBucket b) {
    switch (b) {
        case TimingBucket::Immediate: return "Immediate";
        case TimingBucket::UnderMinute: return "UnderMinute";
        case TimingBucket::OneToFive: return "OneToFive";
        case TimingBucket::FiveToTwenty: return "FiveToTwenty";
        case TimingBucket::TwentyToHour: return "TwentyToHour";
        case TimingBucket::OverHour: return "OverHour";
        case TimingBucket::Crashed: return "Crashed";
        case TimingBucket::NotPossible: return "NotPossible";
        case TimingBucket::NoResult: return "NoResult";
    }
    return "?";
}

std::optional<TimingBucket> parse_timing_bucket(std::string_view s) {
    auto v = lower(trim(s));
    for (auto b : kBuckets)
        if (lower(to_string(b)) == v) return b;
    return std::nullopt;
}

bool is_timed(TimingBucket b) {
    return b != TimingBucket::Crashed && b != TimingBucket::NotPossible && b != TimingBucket::NoResult;
}

std::string_view to_string(Category c) {
    switch (c) {
        case Category::Georeferencing: return "Georeferencing";
        case Category::Semantics: return "Semantics";
        case Category::Geometry: return "Geometry";
        case Category::Visualization: return "Visualization";
        case Category::Editing: return "Editing";
        case Category::Query: return "Query";
        case Category::AnalysisType1: return "AnalysisType1";
        case Category::AnalysisType2: return "AnalysisType2";
        case Category::Export: return "Export";
        case Category::Timing: return "Timing";
        case Category::GeometryItem: return "GeometryItem";
    }
    return "?";
}

std::optional<Category> parse_category(std::string_view s) {
    auto v = lower(trim(s));
    for (auto c : kCategories)
        if (lower(to_string(c)) == v) return c;
    return std::nullopt;
}

IngestError::IngestError(const std::string& message, std::size_t line)
    : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

namespace {

// RFC 4180 records. Quoted fields may contain commas, doubled quotes and
// newlines. Returns each record with the line it starts on.
std::vector<std::pair<std::size_t, std::vector<std::string>>> split_csv(std::string_view text) {
    std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false, any = false;
    std::size_t line = 1, row_line = 1;
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                if (c == '\n') ++line;
                field += c;
            }
            continue;
        }
        if (c == '"') {
            quoted = true;
            any = true;
        } else if (c == ',') {
            row.push_back(std::move(field));
            field.clear();
            any = true;
        } else if (c == '\n' || c == '\r') {
            if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
            if (any || !field.empty()) {
                row.push_back(std::move(field));
                rows.emplace_back(row_line, std::move(row));
            }
            row.clear();
            field.clear();
            any = false;
            row_line = ++line;
        } else {
            field += c;
        }
    }
    if (quoted) throw IngestError("unterminated quoted field", row_line);
    if (any || !field.empty()) {
        row.push_back(std::move(field));
        rows.emplace_back(row_line, std::move(row));
    }
    return rows;
}

std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

// Builds and validates one record from named string fields.
AnswerRecord make_record(const std::map<std::string, std::string>& f, std::size_t line) {
    auto get = [&](const char* key, bool required) -> std::string {
        auto it = f.find(key);
        if (it == f.end() || trim(it->second).empty()) {
            if (required) throw IngestError(std::string("missing ") + key, line);
            return {};
        }
        return trim(it->second);
    };
    AnswerRecord r;
    r.software = get("software", true);
    r.version = get("version", false);
    r.dataset = get("dataset", false);
    r.question_id = get("question_id", true);
    r.respondent = get("respondent", false);

    auto expertise = get("tester_expertise", true);
    try {
        std::size_t used = 0;
        r.tester_expertise = std::stoi(expertise, &used);
        if (used != expertise.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
        throw IngestError("tester_expertise '" + expertise + "' is not an integer", line);
    }
    if (r.tester_expertise < 1 || r.tester_expertise > 4)
        throw IngestError("tester_expertise must be within 1..4", line);

    auto cat = parse_category(get("category", true));
    if (!cat) throw IngestError("unknown category '" + get("category", true) + "'", line);
    r.category = *cat;

    auto slot = get("item_slot", false);
    if (!slot.empty()) {
        auto s = geomgen::Slot::parse(slot);
        if (!s) throw IngestError("bad item_slot '" + slot + "'", line);
        r.item_slot = s;
    }
    if (r.category == Category::GeometryItem && !r.item_slot)
        throw IngestError("GeometryItem answers need an item_slot", line);

    auto value = get("value", false);
    if (r.category == Category::Timing) {
        auto b = parse_timing_bucket(value);
        if (!b) throw IngestError("unknown timing bucket '" + value + "'", line);
        r.value = *b;
    } else if (r.category == Category::GeometryItem) {
        r.value = lower(value);
    } else {
        auto s = parse_support_score(value);
        if (!s) throw IngestError("unknown support score '" + value + "'", line);
        r.value = *s;
    }
    return r;
}

std::string value_string(const AnswerValue& v) {
    if (auto s = std::get_if<std::string>(&v)) return *s;
    if (auto s = std::get_if<SupportScore>(&v)) return std::string(to_string(*s));
    return std::string(to_string(std::get<TimingBucket>(v)));
}

constexpr const char* kColumns[] = {"software", "version",  "tester_expertise", "dataset",   "question_id",
                                    "category", "value",    "item_slot",        "respondent"};

bool first_line_is(std::string_view text, std::string_view prefix) {
    auto nl = text.find('\n');
    return trim(text.substr(0, nl)).rfind(prefix, 0) == 0;
}

}  // namespace

std::vector<AnswerRecord> read_answers_csv(std::string_view text) {
    auto rows = split_csv(text);
    if (rows.empty() || rows[0].second.empty() || trim(rows[0].second[0]) != "# " + std::string(kAnswersFormat))
        throw IngestError("expected '# " + std::string(kAnswersFormat) + "' as the first line", 1);
    if (rows.size() < 2) throw IngestError("missing header row", 2);
    std::vector<std::string> header;
    for (auto& h : rows[1].second) header.push_back(lower(trim(h)));
    for (const char* required : {"software", "tester_expertise", "question_id", "category", "value"})
        if (std::find(header.begin(), header.end(), required) == header.end())
            throw IngestError(std::string("header lacks column ") + required, rows[1].first);

    std::vector<AnswerRecord> out;
    for (std::size_t i = 2; i < rows.size(); ++i) {
        auto& [line, cells] = rows[i];
        if (cells.size() != header.size())
            throw IngestError("expected " + std::to_string(header.size()) + " fields, found " +
                                  std::to_string(cells.size()),
                              line);
        std::map<std::string, std::string> f;
        for (std::size_t c = 0; c < header.size(); ++c) f[header[c]] = cells[c];
        out.push_back(make_record(f, line));
    }
    return out;
}

std::vector<AnswerRecord> read_answers_jsonl(std::string_view text) {
    std::vector<AnswerRecord> out;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t n = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++n;
        if (trim(line).empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw IngestError(std::string("invalid JSON: ") + e.what(), n);
        }
        if (!j.is_object()) throw IngestError("expected a JSON object", n);
        if (!header) {
            if (j.value("format", "") != kAnswersFormat)
                throw IngestError("expected {\"format\": \"" + std::string(kAnswersFormat) + "\"} first", n);
            header = true;
            continue;
        }
        std::map<std::string, std::string> f;
        for (auto& [k, v] : j.items()) {
            if (v.is_string()) {
                f[k] = v.get<std::string>();
            } else if (v.is_number_integer()) {
                f[k] = std::to_string(v.get<std::int64_t>());
            } else if (v.is_number()) {
                f[k] = fmt(v.get<double>());
            } else if (v.is_boolean()) {
                f[k] = v.get<bool>() ? "yes" : "no";
            } else if (!v.is_null()) {
                throw IngestError("field " + k + " must be a scalar", n);
            }
        }
        out.push_back(make_record(f, n));
    }
    if (!header) throw IngestError("empty answer file", 1);
    return out;
}

std::vector<AnswerRecord> read_answers(std::string_view text) {
    if (first_line_is(text, "{")) return read_answers_jsonl(text);
    return read_answers_csv(text);
}

void write_answers_csv(std::ostream& out, std::span<const AnswerRecord> records) {
    out << "# " << kAnswersFormat << '\n';
    for (std::size_t i = 0; i < std::size(kColumns); ++i) out << (i ? "," : "") << kColumns[i];
    out << '\n';
    for (const auto& r : records) {
        out << csv_field(r.software) << ',' << csv_field(r.version) << ',' << r.tester_expertise << ','
            << csv_field(r.dataset) << ',' << csv_field(r.question_id) << ',' << to_string(r.category) << ','
            << csv_field(value_string(r.value)) << ',' << (r.item_slot ? r.item_slot->name() : "") << ','
            << csv_field(r.respondent) << '\n';
    }
}

namespace {

std::optional<bool> yes_no(const AnswerValue& v) {
    auto s = std::get_if<std::string>(&v);
    if (!s) return std::nullopt;
    if (*s == "yes" || *s == "y" || *s == "true" || *s == "1") return true;
    if (*s == "no" || *s == "n" || *s == "false" || *s == "0") return false;
    return std::nullopt;
}

bool is_item_answer(const AnswerRecord& r, const geomgen::Slot& slot, std::string_view q) {
    return r.category == Category::GeometryItem && r.item_slot == slot && r.question_id == q;
}

}  // namespace

double visibility_ratio(std::span<const AnswerRecord> answers, const geomgen::Slot& slot) {
    std::size_t yes = 0, total = 0;
    for (const auto& r : answers) {
        if (!is_item_answer(r, slot, question::kDisplayed)) continue;
        auto b = yes_no(r.value);
        if (!b) continue;
        ++total;
        yes += *b ? 1 : 0;
    }
    if (total == 0) throw NoAnswers("no displayed answers for " + slot.name());
    return static_cast<double>(yes) / static_cast<double>(total);
}

double pairwise_agreement(std::span<const std::string> answers) {
    const std::size_t n = answers.size();
    if (n < 2) throw TooFewRespondents("pairwise agreement needs two answers");
    std::map<std::string_view, std::size_t> freq;
    for (const auto& a : answers) ++freq[a];
    std::size_t equal = 0;
    for (auto& [a, c] : freq) equal += c * (c - 1) / 2;
    return static_cast<double>(equal) / static_cast<double>(n * (n - 1) / 2);
}

double consistency(std::span<const AnswerRecord> answers, const geomgen::Slot& slot) {
    std::set<std::string> hidden, seen;
    for (const auto& r : answers) {
        if (r.category != Category::GeometryItem || r.item_slot != slot) continue;
        seen.insert(r.respondent_key());
        if (r.question_id == question::kDisplayed && yes_no(r.value) == false) hidden.insert(r.respondent_key());
    }
    if (seen.size() - hidden.size() < 2)
        throw TooFewRespondents("fewer than two respondents saw " + slot.name());

    double sum = 0;
    int used = 0;
    for (auto q : {question::kPosition, question::kShading, question::kShape}) {
        // Last answer per respondent counts.
        std::map<std::string, std::string> by_respondent;
        for (const auto& r : answers)
            if (is_item_answer(r, slot, q) && !hidden.count(r.respondent_key()))
                by_respondent[r.respondent_key()] = std::get<std::string>(r.value);
        if (by_respondent.size() < 2) continue;
        std::vector<std::string> values;
        for (auto& [k, v] : by_respondent) values.push_back(v);
        sum += pairwise_agreement(values);
        ++used;
    }
    if (used == 0) throw TooFewRespondents("no follow-up question for " + slot.name() + " has two answers");
    return sum / used;
}

Cell reduce_scores(std::span<const SupportScore> scores) {
    Cell c;
    for (auto s : scores)
        if (auto v = score_value(s)) c.inputs.push_back(*v);
    if (c.inputs.empty()) return c;
    double sum = 0;
    for (double v : c.inputs) sum += v;
    double mean = sum / static_cast<double>(c.inputs.size());
    // Nearest half step, ties down.
    double halves = std::ceil(mean * 2 - 0.5 - 1e-12);
    c.score = halves >= 2 ? SupportScore::Full : halves >= 1 ? SupportScore::Partial : SupportScore::None;
    auto [lo, hi] = std::minmax_element(c.inputs.begin(), c.inputs.end());
    c.conflict = *hi - *lo > 0.5;
    return c;
}

const Cell* SynthesisMatrix::cell(const std::string& sw, Category c) const {
    auto it = cells.find({sw, c});
    return it == cells.end() ? nullptr : &it->second;
}

SynthesisMatrix synthesis_matrix(std::span<const AnswerRecord> answers) {
    SynthesisMatrix m;
    std::map<std::pair<std::string, Category>, std::vector<SupportScore>> inputs;
    std::set<std::string> software;
    std::set<Category> categories;
    for (const auto& r : answers) {
        if (r.category == Category::Timing) {
            auto& d = m.datasets[r.dataset];
            if (d.timing.empty())
                for (auto b : kBuckets) d.timing[b] = 0;
            auto b = std::get<TimingBucket>(r.value);
            ++d.timing[b];
            ++d.attempts;
            d.successes += is_timed(b) ? 1 : 0;
            continue;
        }
        auto s = std::get_if<SupportScore>(&r.value);
        if (!s) continue;
        software.insert(r.software);
        categories.insert(r.category);
        inputs[{r.software, r.category}].push_back(*s);
    }
    m.software.assign(software.begin(), software.end());
    m.categories.assign(categories.begin(), categories.end());
    for (auto& [key, scores] : inputs) {
        Cell c = reduce_scores(scores);
        if (c.conflict) {
            std::string list;
            for (double v : c.inputs) list += (list.empty() ? "" : ", ") + fmt(v);
            m.diagnostics.push_back("conflict for " + key.first + " / " + std::string(to_string(key.second)) +
                                    ": inputs " + list + " reduced to " + std::string(to_string(c.score)));
        }
        m.cells[key] = std::move(c);
    }
    return m;
}

namespace {

std::string cell_text(const Cell* c) {
    if (!c) return "";
    std::string s;
    switch (c->score) {
        case SupportScore::Full: s = "1"; break;
        case SupportScore::Partial: s = "0.5"; break;
        case SupportScore::None: s = "0"; break;
        case SupportScore::NotApplicable: s = "n/a"; break;
    }
    if (c->inputs.size() > 1) s += " (" + std::to_string(c->inputs.size()) + " tests)";
    if (c->conflict) s += " !";
    return s;
}

}  // namespace

void write_synthesis_markdown(std::ostream& out, const SynthesisMatrix& m) {
    out << "| Software |";
    for (auto c : m.categories) out << ' ' << to_string(c) << " |";
    out << "\n|---|";
    for (std::size_t i = 0; i < m.categories.size(); ++i) out << "---|";
    out << '\n';
    for (const auto& sw : m.software) {
        out << "| " << sw << " |";
        for (auto c : m.categories) out << ' ' << cell_text(m.cell(sw, c)) << " |";
        out << '\n';
    }
    out << "\nScores: 1 full support, 0.5 partial, 0 none. Several tests of one software are averaged and rounded "
           "to the nearest half step, ties down; \"!\" marks inputs more than 0.5 apart.\n";

    if (!m.datasets.empty()) {
        out << "\n| Dataset | Attempts | Success rate |";
        for (auto b : kBuckets) out << ' ' << to_string(b) << " |";
        out << "\n|---|---|---|";
        for (std::size_t i = 0; i < std::size(kBuckets); ++i) out << "---|";
        out << '\n';
        for (const auto& [name, d] : m.datasets) {
            out << "| " << name << " | " << d.attempts << " | " << fmt(d.success_rate()) << " |";
            for (auto b : kBuckets) out << ' ' << d.timing.at(b) << " |";
            out << '\n';
        }
    }
}

void write_scores_csv(std::ostream& out, const SynthesisMatrix& m) {
    out << "software,category,score,value,tests,conflict\n";
    for (const auto& [key, c] : m.cells) {
        auto v = score_value(c.score);
        out << csv_field(key.first) << ',' << to_string(key.second) << ',' << to_string(c.score) << ','
            << (v ? fmt(*v) : "") << ',' << c.inputs.size() << ',' << (c.conflict ? "true" : "false") << '\n';
    }
}

nlohmann::json answers_json(std::span<const AnswerRecord> answers) {
    std::set<geomgen::Slot> slots;
    for (const auto& r : answers)
        if (r.category == Category::GeometryItem && r.item_slot) slots.insert(*r.item_slot);
    nlohmann::json vis = nlohmann::json::object(), cons = nlohmann::json::object();
    nlohmann::json notes = nlohmann::json::array();
    for (const auto& s : slots) {
        try {
            vis[s.name()] = visibility_ratio(answers, s);
        } catch (const NoAnswers&) {
            vis[s.name()] = nullptr;
        }
        try {
            cons[s.name()] = consistency(answers, s);
        } catch (const TooFewRespondents& e) {
            cons[s.name()] = nullptr;
            notes.push_back(e.what());
        }
    }
    std::map<std::string, int> expertise;
    for (const auto& r : answers) expertise[r.respondent_key()] = r.tester_expertise;
    return {{"format", kAnswersFormat},
            {"records", answers.size()},
            {"visibility", vis},
            {"consistency", cons},
            {"consistency_notes", notes},
            {"respondent_expertise", expertise},
            {"caveat", kConsistencyCaveat}};
}

const std::map<std::string, std::set<std::string, std::less<>>>& interop_families() {
    static const std::map<std::string, std::set<std::string, std::less<>>> families = {
        {"wall", {"IFCWALL", "IFCWALLSTANDARDCASE", "IFCWALLELEMENTEDCASE", "IFCWALLTYPE"}},
        {"stair", {"IFCSTAIR", "IFCSTAIRFLIGHT", "IFCSTAIRFLIGHTTYPE"}},
        {"member", {"IFCMEMBER", "IFCMEMBERSTANDARDCASE", "IFCMEMBERTYPE"}},
    };
    return families;
}

InteropReport roundtrip_report(const spf::InstanceGraph& reference, const spf::InstanceGraph& exported,
                               const schema::TypeRegistry& registry) {
    InteropReport r;
    r.reference_census = census::census(reference);
    r.export_census = census::census(exported);
    r.diff = census::diff(r.reference_census, r.export_census, registry);
    for (const auto& [name, family] : interop_families()) r.family_balances[name] = census::family_balance(r.diff, family);

    auto georef = [&](const spf::InstanceGraph& g, const char* which) {
        auto v = schema::schema_of(g.header());
        if (!v) {
            r.diagnostics.push_back(std::string(which) + " file has no recognised schema; georeferencing read as IFC4");
            v = schema::SchemaVersion::IFC4;
        }
        return georef::detect_georef(g, *v);
    };
    r.georef_before = georef(reference, "reference");
    r.georef_after = georef(exported, "exported");
    for (auto l : r.georef_before.levels())
        if (!r.georef_after.has(l))
            r.diagnostics.push_back(std::string(georef::to_string(l)) + " lost in the exported file");
    for (auto l : r.georef_after.levels())
        if (!r.georef_before.has(l))
            r.diagnostics.push_back(std::string(georef::to_string(l)) + " gained in the exported file");

    if (r.reference_census.byte_size > 0) {
        r.size_ratio = static_cast<double>(r.export_census.byte_size) / static_cast<double>(r.reference_census.byte_size);
    } else {
        r.size_ratio = r.export_census.byte_size == 0 ? 1.0 : INFINITY;
    }
    bool same_types = r.diff.deltas.empty() && r.diff.lost_types.empty() && r.diff.gained_types.empty();
    r.unchanged = same_types && r.size_ratio >= kSizeRatioLow && r.size_ratio <= kSizeRatioHigh;
    for (const auto& d : r.diff.diagnostics) r.diagnostics.push_back(d);
    return r;
}

nlohmann::json to_json(const InteropReport& r) {
    nlohmann::json deltas = nlohmann::json::object(), groups = nlohmann::json::object();
    for (const auto& [t, d] : r.diff.deltas) deltas[t] = d;
    for (const auto& [g, d] : r.diff.grouped_deltas) groups[std::string(schema::to_string(g))] = d;
    return {{"unchanged", r.unchanged},
            {"size_ratio", r.size_ratio},
            {"size_band", {kSizeRatioLow, kSizeRatioHigh}},
            {"reference", {{"instances", r.reference_census.total}, {"bytes", r.reference_census.byte_size}}},
            {"exported", {{"instances", r.export_census.total}, {"bytes", r.export_census.byte_size}}},
            {"deltas", deltas},
            {"grouped_deltas", groups},
            {"lost_types", r.diff.lost_types},
            {"gained_types", r.diff.gained_types},
            {"family_balances", r.family_balances},
            {"georef_before", georef::to_json(r.georef_before)},
            {"georef_after", georef::to_json(r.georef_after)},
            {"diagnostics", r.diagnostics}};
}

void write_markdown(std::ostream& out, const InteropReport& r) {
    out << "# Round-trip report\n\n";
    out << "- Unchanged: " << (r.unchanged ? "yes" : "no") << '\n';
    out << "- Instances: " << r.reference_census.total << " -> " << r.export_census.total << '\n';
    out << "- Size ratio: " << fmt(r.size_ratio) << " (band " << kSizeRatioLow << " to " << kSizeRatioHigh << ")\n";
    out << "- Lost types: " << r.diff.lost_types.size() << ", gained types: " << r.diff.gained_types.size() << "\n\n";
    out << "## Family balances\n\n| Family | Balance |\n|---|---|\n";
    for (const auto& [f, b] : r.family_balances) out << "| " << f << " | " << b << " |\n";
    out << "\n## Georeferencing\n\n| Level | Reference | Exported |\n|---|---|---|\n";
    for (auto l : {georef::Level::L10, georef::Level::L20, georef::Level::L30, georef::Level::L40, georef::Level::L50})
        out << "| " << georef::to_string(l) << " | " << (r.georef_before.has(l) ? "yes" : "no") << " | "
            << (r.georef_after.has(l) ? "yes" : "no") << " |\n";
    std::vector<census::DiffRow> changed;
    for (auto& row : census::diff_rows(r.reference_census, r.export_census))
        if (row.delta != 0) changed.push_back(std::move(row));
    out << "\n## Type deltas\n\n";
    if (changed.empty()) {
        out << "No type counts changed.\n";
    } else {
        census::write_diff_markdown(out, changed);
    }
    if (!r.diagnostics.empty()) {
        out << "\n## Diagnostics\n\n";
        for (const auto& d : r.diagnostics) out << "- " << d << '\n';
    }
}

}  // namespace ifcaudit::benchkit
