#include "interop_fixtures.hpp"
#include "ifcaudit/benchkit.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

using namespace ifcaudit;
using namespace ifcaudit::benchkit;
using geomgen::Slot;

namespace {

AnswerRecord item_answer(std::string respondent, Slot slot, std::string_view q, std::string value) {
    AnswerRecord r;
    r.software = respondent;
    r.version = "1";
    r.respondent = respondent;
    r.dataset = "suite";
    r.category = Category::GeometryItem;
    r.question_id = std::string(q);
    r.item_slot = slot;
    r.value = std::move(value);
    return r;
}

AnswerRecord score(std::string software, Category c, SupportScore s) {
    AnswerRecord r;
    r.software = std::move(software);
    r.version = "1";
    r.category = c;
    r.question_id = "q";
    r.value = s;
    return r;
}

AnswerRecord timing(std::string dataset, TimingBucket b) {
    AnswerRecord r;
    r.software = "X";
    r.category = Category::Timing;
    r.question_id = "load";
    r.dataset = std::move(dataset);
    r.value = b;
    return r;
}

// Brute force over index pairs i < j.
double brute_agreement(const std::vector<std::string>& v) {
    std::size_t equal = 0, pairs = 0;
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = i + 1; j < v.size(); ++j) {
            ++pairs;
            equal += v[i] == v[j] ? 1 : 0;
        }
    return static_cast<double>(equal) / static_cast<double>(pairs);
}

}  // namespace

TEST(Visibility, Ratios) {
    Slot a1{'A', 1};
    std::vector<AnswerRecord> v;
    for (int i = 0; i < 5; ++i) v.push_back(item_answer("r" + std::to_string(i), a1, question::kDisplayed, i < 4 ? "yes" : "no"));
    EXPECT_DOUBLE_EQ(visibility_ratio(v, a1), 0.8);
    v.back().value = std::string("yes");
    EXPECT_DOUBLE_EQ(visibility_ratio(v, a1), 1.0);
    EXPECT_THROW(visibility_ratio(v, Slot{'B', 1}), NoAnswers);
}

TEST(Visibility, MatchesTallyOverAllSlots) {
    std::mt19937 rng(7);
    std::vector<AnswerRecord> v;
    std::map<std::string, std::pair<int, int>> tally;  // yes, total
    for (const auto& item : geomgen::canonical_items()) {
        int n = 1 + static_cast<int>(rng() % 12);
        for (int i = 0; i < n; ++i) {
            bool yes = rng() % 3 != 0;
            v.push_back(item_answer("r" + std::to_string(i), item.slot, question::kDisplayed, yes ? "yes" : "no"));
            auto& t = tally[item.slot.name()];
            t.first += yes;
            t.second += 1;
        }
    }
    std::shuffle(v.begin(), v.end(), rng);
    for (const auto& item : geomgen::canonical_items()) {
        auto [yes, total] = tally[item.slot.name()];
        EXPECT_DOUBLE_EQ(visibility_ratio(v, item.slot), static_cast<double>(yes) / total) << item.slot.name();
    }
}

TEST(Visibility, AddingYesNeverDecreases) {
    Slot s{'C', 3};
    std::vector<AnswerRecord> v = {item_answer("a", s, question::kDisplayed, "no")};
    double prev = visibility_ratio(v, s);
    for (int i = 0; i < 10; ++i) {
        v.push_back(item_answer("y" + std::to_string(i), s, question::kDisplayed, "yes"));
        double now = visibility_ratio(v, s);
        EXPECT_GE(now, prev);
        prev = now;
    }
}

TEST(Consistency, PairwiseAgreementExhaustive) {
    const std::string alphabet[] = {"a", "b", "c"};
    for (int n = 2; n <= 6; ++n) {
        int combos = 1;
        for (int i = 0; i < n; ++i) combos *= 3;
        for (int code = 0; code < combos; ++code) {
            std::vector<std::string> v;
            for (int i = 0, c = code; i < n; ++i, c /= 3) v.push_back(alphabet[c % 3]);
            EXPECT_DOUBLE_EQ(pairwise_agreement(v), brute_agreement(v));
        }
    }
    EXPECT_THROW(pairwise_agreement(std::vector<std::string>{"a"}), TooFewRespondents);
}

TEST(Consistency, Examples) {
    Slot s{'D', 2};
    std::vector<AnswerRecord> v;
    const char* shape[] = {"a", "a", "b"};
    for (int i = 0; i < 3; ++i) {
        auto r = "r" + std::to_string(i);
        v.push_back(item_answer(r, s, question::kDisplayed, "yes"));
        v.push_back(item_answer(r, s, question::kShape, shape[i]));
    }
    EXPECT_NEAR(consistency(v, s), 1.0 / 3, 1e-15);

    std::vector<AnswerRecord> same, distinct;
    for (int i = 0; i < 4; ++i) {
        auto r = "r" + std::to_string(i);
        for (auto q : {question::kPosition, question::kShading, question::kShape}) {
            same.push_back(item_answer(r, s, q, "x"));
            distinct.push_back(item_answer(r, s, q, "x" + std::to_string(i)));
        }
    }
    EXPECT_DOUBLE_EQ(consistency(same, s), 1.0);
    EXPECT_DOUBLE_EQ(consistency(distinct, s), 0.0);
}

TEST(Consistency, ExcludesNotDisplayedRespondents) {
    Slot s{'E', 5};
    std::vector<AnswerRecord> v;
    for (int i = 0; i < 3; ++i) {
        auto r = "r" + std::to_string(i);
        v.push_back(item_answer(r, s, question::kDisplayed, i == 2 ? "no" : "yes"));
        v.push_back(item_answer(r, s, question::kPosition, i == 2 ? "below" : "above"));
    }
    EXPECT_DOUBLE_EQ(consistency(v, s), 1.0);
    v[0].value = std::string("no");
    EXPECT_THROW(consistency(v, s), TooFewRespondents);
}

TEST(Consistency, PermutationInvariant) {
    Slot s{'F', 1};
    std::mt19937 rng(3);
    std::vector<AnswerRecord> v;
    for (int i = 0; i < 6; ++i)
        for (auto q : {question::kPosition, question::kShading, question::kShape})
            v.push_back(item_answer("r" + std::to_string(i), s, q, std::string(1, static_cast<char>('a' + rng() % 3))));
    double base = consistency(v, s);
    for (int k = 0; k < 20; ++k) {
        std::shuffle(v.begin(), v.end(), rng);
        EXPECT_DOUBLE_EQ(consistency(v, s), base);
    }
}

TEST(Synthesis, Reduction) {
    using S = SupportScore;
    auto one = reduce_scores(std::vector<S>{S::Full});
    EXPECT_EQ(one.score, S::Full);
    EXPECT_FALSE(one.conflict);
    auto mixed = reduce_scores(std::vector<S>{S::Full, S::None});
    EXPECT_EQ(mixed.score, S::Partial);
    EXPECT_TRUE(mixed.conflict);
    // 0.25 and 0.75 are ties; they go down.
    EXPECT_EQ(reduce_scores(std::vector<S>{S::Partial, S::None}).score, S::None);
    EXPECT_EQ(reduce_scores(std::vector<S>{S::Full, S::Partial}).score, S::Partial);
    EXPECT_FALSE(reduce_scores(std::vector<S>{S::Full, S::Partial}).conflict);
    EXPECT_EQ(reduce_scores(std::vector<S>{S::Full, S::Full, S::Partial}).score, S::Full);
    EXPECT_EQ(reduce_scores(std::vector<S>{S::NotApplicable}).score, S::NotApplicable);
    EXPECT_EQ(reduce_scores(std::vector<S>{S::NotApplicable, S::None}).score, S::None);
}

TEST(Synthesis, OrderIndependent) {
    std::mt19937 rng(11);
    const SupportScore all[] = {SupportScore::Full, SupportScore::Partial, SupportScore::None, SupportScore::NotApplicable};
    std::vector<AnswerRecord> v;
    for (int i = 0; i < 200; ++i)
        v.push_back(score("S" + std::to_string(rng() % 4), static_cast<Category>(rng() % 9), all[rng() % 4]));
    auto base = synthesis_matrix(v);
    for (int k = 0; k < 10; ++k) {
        std::shuffle(v.begin(), v.end(), rng);
        auto m = synthesis_matrix(v);
        ASSERT_EQ(m.cells.size(), base.cells.size());
        for (auto& [key, c] : base.cells) {
            EXPECT_EQ(m.cells.at(key).score, c.score);
            EXPECT_EQ(m.cells.at(key).conflict, c.conflict);
        }
    }
}

TEST(Synthesis, ConflictDiagnostic) {
    std::vector<AnswerRecord> v = {score("X", Category::Georeferencing, SupportScore::Full),
                                   score("X", Category::Georeferencing, SupportScore::None)};
    auto m = synthesis_matrix(v);
    ASSERT_NE(m.cell("X", Category::Georeferencing), nullptr);
    EXPECT_EQ(m.cell("X", Category::Georeferencing)->score, SupportScore::Partial);
    ASSERT_EQ(m.diagnostics.size(), 1u);
}

TEST(Synthesis, TimingTally) {
    std::mt19937 rng(5);
    std::vector<AnswerRecord> v;
    std::map<std::string, std::map<TimingBucket, std::size_t>> tally;
    for (int i = 0; i < 300; ++i) {
        auto ds = "D" + std::to_string(rng() % 3);
        auto b = static_cast<TimingBucket>(rng() % kTimingBucketCount);
        v.push_back(timing(ds, b));
        ++tally[ds][b];
    }
    auto m = synthesis_matrix(v);
    ASSERT_EQ(m.datasets.size(), 3u);
    for (auto& [ds, counts] : tally) {
        const auto& d = m.datasets.at(ds);
        std::size_t total = 0, ok = 0;
        for (std::size_t b = 0; b < kTimingBucketCount; ++b) {
            auto bucket = static_cast<TimingBucket>(b);
            std::size_t want = counts.count(bucket) ? counts.at(bucket) : 0;
            EXPECT_EQ(d.timing.at(bucket), want);
            total += want;
            if (b < 6) ok += want;
        }
        EXPECT_EQ(d.attempts, total);
        EXPECT_EQ(d.successes, ok);
    }
}

TEST(Ingest, CsvRoundTrip) {
    std::vector<AnswerRecord> v = {score("Tool, with comma", Category::Query, SupportScore::Partial),
                                   item_answer("r1", Slot{'A', 2}, question::kShape, "cube"), timing("Myran", TimingBucket::OneToFive)};
    v[0].tester_expertise = 3;
    std::ostringstream out;
    write_answers_csv(out, v);
    auto back = read_answers(out.str());
    ASSERT_EQ(back.size(), 3u);
    EXPECT_EQ(back[0].software, "Tool, with comma");
    EXPECT_EQ(back[0].tester_expertise, 3);
    EXPECT_EQ(std::get<SupportScore>(back[0].value), SupportScore::Partial);
    EXPECT_EQ(back[1].item_slot, (Slot{'A', 2}));
    EXPECT_EQ(back[1].respondent, "r1");
    EXPECT_EQ(std::get<TimingBucket>(back[2].value), TimingBucket::OneToFive);
}

TEST(Ingest, JsonLines) {
    std::string text =
        "{\"format\": \"ifcaudit-answers/1\"}\n"
        "{\"software\": \"X\", \"version\": \"2\", \"tester_expertise\": 2, \"dataset\": \"suite\", "
        "\"question_id\": \"displayed\", \"category\": \"GeometryItem\", \"value\": true, \"item_slot\": \"B3\"}\n";
    auto v = read_answers(text);
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(std::get<std::string>(v[0].value), "yes");
    EXPECT_DOUBLE_EQ(visibility_ratio(v, Slot{'B', 3}), 1.0);
}

TEST(Ingest, Errors) {
    const std::string head = "# ifcaudit-answers/1\nsoftware,version,tester_expertise,dataset,question_id,category,value,item_slot\n";
    EXPECT_THROW(read_answers_csv("software,value\n"), IngestError);
    EXPECT_THROW(read_answers_csv(head + "X,1,5,d,q,Query,1,\n"), IngestError);
    EXPECT_THROW(read_answers_csv(head + "X,1,2,d,shape,GeometryItem,cube,\n"), IngestError);
    EXPECT_THROW(read_answers_csv(head + "X,1,2,d,q,Nonsense,1,\n"), IngestError);
    EXPECT_THROW(read_answers_csv(head + "X,1,2,d,q,Timing,soon,\n"), IngestError);
    try {
        read_answers_csv(head + "X,1,2,d,q,Query,1,\nX,1,2,d,q,Query,7,\n");
        FAIL();
    } catch (const IngestError& e) {
        EXPECT_EQ(e.line(), 4u);
    }
}

TEST(Roundtrip, SelfIsUnchanged) {
    auto g = spf::parse_spf(fixtures::reference_model());
    auto r = roundtrip_report(g, g);
    EXPECT_TRUE(r.unchanged);
    EXPECT_DOUBLE_EQ(r.size_ratio, 1.0);
    for (auto& [f, b] : r.family_balances) EXPECT_EQ(b, 0) << f;
}

TEST(Roundtrip, LostDerivedUnits) {
    auto text = fixtures::reference_model();
    auto stripped = fixtures::without_type(fixtures::without_type(text, "IFCDERIVEDUNIT"), "IFCDERIVEDUNITELEMENT");
    auto r = roundtrip_report(spf::parse_spf(text), spf::parse_spf(stripped));
    EXPECT_FALSE(r.unchanged);
    EXPECT_TRUE(r.diff.lost_types.count("IFCDERIVEDUNIT"));
    EXPECT_TRUE(r.diff.lost_types.count("IFCDERIVEDUNITELEMENT"));
}

TEST(Roundtrip, RetypedWallsBalance) {
    auto text = fixtures::reference_model();
    auto r = roundtrip_report(spf::parse_spf(text),
                              spf::parse_spf(fixtures::retype(text, "IFCWALLSTANDARDCASE", "IFCWALL")));
    EXPECT_EQ(r.family_balances.at("wall"), 0);
    EXPECT_EQ(r.diff.delta("IFCWALL"), 3);
    EXPECT_EQ(r.diff.delta("IFCWALLSTANDARDCASE"), -3);
    EXPECT_FALSE(r.unchanged);
    EXPECT_GE(r.size_ratio, kSizeRatioLow);
}

TEST(Roundtrip, GeorefChangesAreReported) {
    auto text = fixtures::reference_model();
    auto with_lat = fixtures::retype(text, "IFCSITE", "IFCSITE");
    auto pos = with_lat.find(".ELEMENT.,$,$,$,$,$);");
    with_lat.replace(pos, 22, ".ELEMENT.,(48,8,0),(11,34,0),$,$,$);");
    auto r = roundtrip_report(spf::parse_spf(with_lat), spf::parse_spf(text));
    EXPECT_TRUE(r.georef_before.has(georef::Level::L20));
    EXPECT_FALSE(r.georef_after.has(georef::Level::L20));
    EXPECT_TRUE(std::any_of(r.diagnostics.begin(), r.diagnostics.end(),
                            [](const std::string& d) { return d.find("LoGeoRef20 lost") != std::string::npos; }));
    auto j = to_json(r);
    EXPECT_TRUE(j.contains("family_balances"));
    std::ostringstream md;
    write_markdown(md, r);
    EXPECT_NE(md.str().find("| wall | 0 |"), std::string::npos);
}

TEST(Report, AnswersJsonEchoesCaveat) {
    Slot s{'A', 1};
    std::vector<AnswerRecord> v = {item_answer("a", s, question::kDisplayed, "yes"),
                                   item_answer("b", s, question::kDisplayed, "yes"),
                                   item_answer("a", s, question::kShape, "cube"),
                                   item_answer("b", s, question::kShape, "cube")};
    auto j = answers_json(v);
    EXPECT_EQ(j["caveat"], std::string(kConsistencyCaveat));
    EXPECT_DOUBLE_EQ(j["visibility"]["A1"].get<double>(), 1.0);
    EXPECT_DOUBLE_EQ(j["consistency"]["A1"].get<double>(), 1.0);
}
