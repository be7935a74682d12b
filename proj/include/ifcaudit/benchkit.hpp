// Benchmark answer aggregation and round-trip interoperability reports.

#pragma once

#include "ifcaudit/census.hpp"
#include "ifcaudit/geomgen.hpp"
#include "ifcaudit/georef.hpp"
#include "ifcaudit/schema.hpp"
#include "ifcaudit/spf.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace ifcaudit::benchkit {

enum class SupportScore { Full, Partial, None, NotApplicable };
std::string_view to_string(SupportScore s);
/// 1, 0.5, 0; nullopt for NotApplicable.
std::optional<double> score_value(SupportScore s);
/// Accepts "1", "0.5", "0", "full", "partial", "none", "na", "n/a" (any case).
std::optional<SupportScore> parse_support_score(std::string_view s);

enum class TimingBucket {
    Immediate,
    UnderMinute,
    OneToFive,
    FiveToTwenty,
    TwentyToHour,
    OverHour,
    Crashed,
    NotPossible,
    NoResult,
};
inline constexpr std::size_t kTimingBucketCount = 9;
std::string_view to_string(TimingBucket b);
std::optional<TimingBucket> parse_timing_bucket(std::string_view s);
/// False for Crashed, NotPossible and NoResult.
bool is_timed(TimingBucket b);

enum class Category {
    Georeferencing,
    Semantics,
    Geometry,
    Visualization,
    Editing,
    Query,
    AnalysisType1,
    AnalysisType2,
    Export,
    Timing,
    GeometryItem,
};
std::string_view to_string(Category c);
std::optional<Category> parse_category(std::string_view s);

/// Question ids used with Category::GeometryItem.
namespace question {
inline constexpr std::string_view kDisplayed = "displayed";
inline constexpr std::string_view kPosition = "position";
inline constexpr std::string_view kShading = "shading";
inline constexpr std::string_view kShape = "shape";
}  // namespace question

using AnswerValue = std::variant<std::string, SupportScore, TimingBucket>;

struct AnswerRecord {
    std::string software;
    std::string version;
    int tester_expertise = 1;  // 1..4, reported, never used as a weight
    std::string dataset;
    std::string question_id;
    Category category = Category::Geometry;
    AnswerValue value;
    std::optional<geomgen::Slot> item_slot;
    /// Explicit respondent id; defaults to "software version".
    std::string respondent;

    std::string respondent_key() const { return respondent.empty() ? software + " " + version : respondent; }
};

class IngestError : public std::runtime_error {
public:
    IngestError(const std::string& message, std::size_t line);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

inline constexpr std::string_view kAnswersFormat = "ifcaudit-answers/1";

/// CSV with a first line "# ifcaudit-answers/1", then a header row naming
/// software, version, tester_expertise, dataset, question_id, category,
/// value, item_slot and optionally respondent, in any order.
std::vector<AnswerRecord> read_answers_csv(std::string_view text);
/// JSON lines; the first line is {"format": "ifcaudit-answers/1"}.
std::vector<AnswerRecord> read_answers_jsonl(std::string_view text);
/// Picks the reader from the first line.
std::vector<AnswerRecord> read_answers(std::string_view text);

void write_answers_csv(std::ostream& out, std::span<const AnswerRecord> records);

class NoAnswers : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class TooFewRespondents : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Fraction of "displayed" answers for `slot` that say yes. Throws NoAnswers.
double visibility_ratio(std::span<const AnswerRecord> answers, const geomgen::Slot& slot);

/// Equal unordered pairs over all unordered pairs. Throws
/// TooFewRespondents for fewer than two answers.
double pairwise_agreement(std::span<const std::string> answers);

/// Mean pairwise agreement over position, shading and shape for `slot`,
/// among respondents that did not answer displayed = no. Questions with
/// fewer than two answers are left out of the mean.
double consistency(std::span<const AnswerRecord> answers, const geomgen::Slot& slot);

inline constexpr std::string_view kConsistencyCaveat =
    "Consistency is not corrected for questions with few possible answers; such questions agree by chance "
    "more often.";

struct Cell {
    /// Reduced score; NotApplicable when every input was.
    SupportScore score = SupportScore::NotApplicable;
    std::vector<double> inputs;
    bool conflict = false;
};

/// Mean of the applicable inputs rounded to the nearest of 0, 0.5, 1 with
/// ties going down; conflict when max - min exceeds 0.5.
Cell reduce_scores(std::span<const SupportScore> scores);

struct DatasetSummary {
    std::map<TimingBucket, std::size_t> timing;  // every bucket present, zero included
    std::size_t attempts = 0;
    std::size_t successes = 0;
    double success_rate() const { return attempts ? static_cast<double>(successes) / static_cast<double>(attempts) : 0.0; }
};

struct SynthesisMatrix {
    std::vector<std::string> software;
    std::vector<Category> categories;
    std::map<std::pair<std::string, Category>, Cell> cells;
    std::map<std::string, DatasetSummary> datasets;
    std::vector<std::string> diagnostics;

    const Cell* cell(const std::string& software, Category c) const;
};

/// Support-score records fill the software x category cells; Timing records
/// fill the per-dataset summaries.
SynthesisMatrix synthesis_matrix(std::span<const AnswerRecord> answers);

void write_synthesis_markdown(std::ostream& out, const SynthesisMatrix& m);
void write_scores_csv(std::ostream& out, const SynthesisMatrix& m);
/// {"visibility": {slot: ratio}, "consistency": {slot: value}, "caveat", ...}
nlohmann::json answers_json(std::span<const AnswerRecord> answers);

inline constexpr double kSizeRatioLow = 0.98;
inline constexpr double kSizeRatioHigh = 1.02;

/// Families whose members are alternative representations of one object.
const std::map<std::string, std::set<std::string, std::less<>>>& interop_families();

struct InteropReport {
    census::Census reference_census;
    census::Census export_census;
    census::CensusDiff diff;
    std::map<std::string, std::int64_t> family_balances;
    georef::LoGeoRefReport georef_before;
    georef::LoGeoRefReport georef_after;
    double size_ratio = 1.0;
    bool unchanged = false;
    std::vector<std::string> diagnostics;
};

/// `unchanged` holds when no type count changed and the size ratio lies in
/// [kSizeRatioLow, kSizeRatioHigh].
InteropReport roundtrip_report(const spf::InstanceGraph& reference, const spf::InstanceGraph& exported,
                               const schema::TypeRegistry& registry = schema::TypeRegistry::builtin());

nlohmann::json to_json(const InteropReport& r);
void write_markdown(std::ostream& out, const InteropReport& r);

}  // namespace ifcaudit::benchkit
