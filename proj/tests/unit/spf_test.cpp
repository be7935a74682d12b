#include "ifcaudit/spf.hpp"

#include <gtest/gtest.h>

#include <random>
#include <regex>

using namespace ifcaudit::spf;

namespace {

std::string wrap_data(std::string_view data) {
    std::string s =
        "ISO-10303-21;\n"
        "HEADER;\n"
        "FILE_DESCRIPTION(('ViewDefinition [CoordinationView]'),'2;1');\n"
        "FILE_NAME('a.ifc','2020-01-01T00:00:00',('me'),('org'),'pp','sys','');\n"
        "FILE_SCHEMA(('IFC2X3'));\n"
        "ENDSEC;\n"
        "DATA;\n";
    s += data;
    s += "ENDSEC;\nEND-ISO-10303-21;\n";
    return s;
}

const std::string kMinimal = wrap_data("#1=IFCBUILDING($,$,'B',$,$,$,$,$,$,$,$,$);\n");

}  // namespace

TEST(SpfParse, MinimalFileHasOneBuilding) {
    auto g = parse_spf(kMinimal);
    ASSERT_EQ(g.size(), 1u);
    auto b = g.at(0);
    EXPECT_EQ(b.id(), 1u);
    EXPECT_EQ(b.type_name(), "IFCBUILDING");
    EXPECT_EQ(b.attribute_count(), 12u);
    EXPECT_EQ(b.attribute(2).as_text(), "B");
    EXPECT_TRUE(b.attribute(0).is_unset());
    EXPECT_TRUE(g.diagnostics().empty());
    EXPECT_EQ(g.header().file_schema, std::vector<std::string>{"IFC2X3"});
    EXPECT_EQ(g.header().file_name.timestamp, "2020-01-01T00:00:00");
    EXPECT_EQ(g.byte_size(), kMinimal.size());
}

TEST(SpfParse, ZeroPointIsListOfThreeReals) {
    auto g = parse_spf(wrap_data("#2=IFCCARTESIANPOINT((0.,0.,0.));\n"));
    auto p = resolve(g, 2);
    ASSERT_TRUE(p);
    ASSERT_EQ(p->attribute_count(), 1u);
    auto coords = p->attribute(0);
    ASSERT_EQ(coords.kind(), ValueKind::List);
    ASSERT_EQ(coords.size(), 3u);
    for (ValueRef c : coords) {
        EXPECT_EQ(c.kind(), ValueKind::Real);
        EXPECT_EQ(c.as_real(), 0.0);
        EXPECT_EQ(c.lexeme(), "0.");
    }
}

TEST(SpfParse, ResolveMissingIdIsNotFound) {
    auto g = parse_spf(kMinimal);
    EXPECT_TRUE(resolve(g, 1).has_value());
    EXPECT_EQ(resolve(g, 1)->type_name(), "IFCBUILDING");
    EXPECT_FALSE(resolve(g, 999).has_value());
}

TEST(SpfParse, AllValueKinds) {
    auto g = parse_spf(wrap_data(
        "#1=IFCX(12,-3,1.5E-3,'it''s',.T.,\"0FF\",#1,(1,(2,3)),IFCLABEL('x'),$,*,+7,2.);\n"));
    auto i = g.at(0);
    EXPECT_EQ(i.attribute(0).as_integer(), 12);
    EXPECT_EQ(i.attribute(1).as_integer(), -3);
    EXPECT_DOUBLE_EQ(i.attribute(2).as_real(), 1.5e-3);
    EXPECT_EQ(i.attribute(2).lexeme(), "1.5E-3");
    EXPECT_EQ(i.attribute(3).as_text(), "it's");
    EXPECT_EQ(i.attribute(3).raw_text(), "it''s");
    EXPECT_EQ(i.attribute(4).as_enum(), "T");
    EXPECT_EQ(i.attribute(5).as_binary(), "0FF");
    EXPECT_EQ(i.attribute(6).as_reference(), 1u);
    EXPECT_EQ(i.attribute(7)[1][1].as_integer(), 3);
    EXPECT_EQ(i.attribute(8).type_name(), "IFCLABEL");
    EXPECT_EQ(i.attribute(8).inner().as_text(), "x");
    EXPECT_EQ(i.attribute(9).kind(), ValueKind::Unset);
    EXPECT_EQ(i.attribute(10).kind(), ValueKind::Derived);
    EXPECT_EQ(i.attribute(11).as_integer(), 7);
    EXPECT_EQ(i.attribute(12).as_number(), 2.0);
    EXPECT_THROW(i.attribute(0).as_text(), std::logic_error);
    EXPECT_THROW(i.attribute(13), std::out_of_range);
}

TEST(SpfParse, CommentsAreDiscarded) {
    auto g = parse_spf(wrap_data("/* a */ #1 = /* b */ IFCWALL( /* c */ 'x' /* d */ );\n"));
    ASSERT_EQ(g.size(), 1u);
    EXPECT_EQ(g.at(0).attribute(0).as_text(), "x");
}

TEST(SpfParse, LowercaseTypeNamesAreNormalised) {
    auto g = parse_spf(wrap_data("#1=IfcWall($);\n"));
    EXPECT_EQ(g.at(0).type_name(), "IFCWALL");
}

TEST(SpfParse, StringEscapesDecoded) {
    auto g = parse_spf(wrap_data(
        "#1=IFCLABEL('caf\\X\\E9');\n"
        "#2=IFCLABEL('\\X2\\00E400F6\\X0\\');\n"
        "#3=IFCLABEL('\\S\\i');\n"
        "#4=IFCLABEL('a\\\\b');\n"
        "#5=IFCLABEL('\\X4\\0001F600\\X0\\');\n"
        "#6=IFCLABEL('\\X2\\D83DDE00\\X0\\');\n"));
    EXPECT_EQ(g.at(0).attribute(0).as_text(), "caf\xC3\xA9");
    EXPECT_EQ(g.at(0).attribute(0).raw_text(), "caf\\X\\E9");
    EXPECT_EQ(g.at(1).attribute(0).as_text(), "\xC3\xA4\xC3\xB6");
    EXPECT_EQ(g.at(2).attribute(0).as_text(), "\xC3\xA9");
    EXPECT_EQ(g.at(3).attribute(0).as_text(), "a\\b");
    EXPECT_EQ(g.at(4).attribute(0).as_text(), "\xF0\x9F\x98\x80");
    EXPECT_EQ(g.at(5).attribute(0).as_text(), "\xF0\x9F\x98\x80");
    EXPECT_TRUE(g.diagnostics().empty());
}

TEST(SpfParse, UnknownEscapePassesThroughWithDiagnostic) {
    auto g = parse_spf(wrap_data("#1=IFCLABEL('a\\Q\\b');\n"));
    EXPECT_EQ(g.at(0).attribute(0).as_text(), "a\\Q\\b");
    ASSERT_FALSE(g.diagnostics().empty());
    EXPECT_EQ(g.diagnostics()[0].code, Diagnostic::Code::UnknownEscape);
}

TEST(SpfParse, DuplicateIdKeepsLastDefinition) {
    auto g = parse_spf(wrap_data("#1=IFCWALL('first');\n#2=IFCBEAM($);\n#1=IFCSLAB('second');\n"));
    ASSERT_EQ(g.size(), 2u);
    EXPECT_EQ(resolve(g, 1)->type_name(), "IFCSLAB");
    EXPECT_EQ(resolve(g, 1)->attribute(0).as_text(), "second");
    ASSERT_EQ(g.diagnostics().size(), 1u);
    EXPECT_EQ(g.diagnostics()[0].code, Diagnostic::Code::DuplicateInstanceId);
    EXPECT_EQ(g.diagnostics()[0].line, 10u);
}

TEST(SpfParse, DanglingReferencesAreReported) {
    auto g = parse_spf(wrap_data("#1=IFCWALL(#5,(#1,#7));\n"));
    EXPECT_EQ(g.dangling_references(), (std::vector<EntityId>{5, 7}));
    ASSERT_EQ(g.diagnostics().size(), 2u);
    EXPECT_EQ(g.diagnostics()[0].code, Diagnostic::Code::DanglingReference);
}

TEST(SpfParse, FatalErrors) {
    EXPECT_THROW(parse_spf("HEADER;ENDSEC;DATA;ENDSEC;END-ISO-10303-21;"), ParseError);
    EXPECT_THROW(parse_spf(wrap_data("#1=IFCLABEL('open);\n")), ParseError);
    EXPECT_THROW(parse_spf("ISO-10303-21;HEADER;ENDSEC;DATA;#1=IFCWALL($);"), ParseError);
    EXPECT_THROW(parse_spf("ISO-10303-21;HEADER;ENDSEC;DATA;#1=IFCWALL($);ENDSEC;"), ParseError);
    EXPECT_THROW(parse_spf(wrap_data("#1=IFCWALL($)\n")), ParseError);
    EXPECT_THROW(parse_spf(wrap_data("#0=IFCWALL($);\n")), ParseError);
    EXPECT_THROW(parse_spf(wrap_data("#1=(IFCA($)IFCB($));\n")), ParseError);
    EXPECT_THROW(parse_spf(""), ParseError);
    try {
        parse_spf(wrap_data("#1=IFCLABEL('open);\n"));
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 8u);
    }
}

TEST(SpfParse, DeepNestingIsRejectedNotCrashed) {
    std::string deep(5000, '(');
    EXPECT_THROW(parse_spf(wrap_data("#1=IFCX(" + deep + ");\n")), ParseError);
}

TEST(SpfWrite, RoundTripOfMinimalFile) {
    auto g = parse_spf(kMinimal);
    auto text = write_spf(g);
    auto again = parse_spf(text);
    EXPECT_TRUE(structurally_equal(g, again));
    EXPECT_EQ(write_spf(again), text);
}

TEST(SpfWrite, RealLexemePreserved) {
    auto g = parse_spf(wrap_data("#1=IFCX(1.0E-5,1.,-0.50);\n"));
    auto text = write_spf(g);
    EXPECT_NE(text.find("#1=IFCX(1.0E-5,1.,-0.50);"), std::string::npos);
}

TEST(SpfWrite, BuiltGraphRoundTrips) {
    InstanceGraph g;
    g.header().file_schema = {"IFC4"};
    g.header().file_name.name = "caf\xC3\xA9 'quoted'";
    g.add(1, "IFCCARTESIANPOINT", {Value::list({Value::real(0.5), Value::real(1e-5), Value::real(-2.0)})});
    g.add(3, "IFCPROPERTYSINGLEVALUE",
          {Value::text("na\xC3\xAFve\\"), Value::unset(), Value::typed("IFCLENGTHMEASURE", Value::real(3.25)),
           Value::ref(1), Value::enumeration("T"), Value::integer(-4)});
    auto text = write_spf(g);
    EXPECT_NE(text.find("(0.5,1.E-05,-2.)"), std::string::npos);
    EXPECT_NE(text.find("'na\\X2\\00EF\\X0\\ve\\\\'"), std::string::npos);
    auto back = parse_spf(text);
    EXPECT_TRUE(structurally_equal(g, back));
    EXPECT_EQ(back.header().file_name.name, g.header().file_name.name);
    EXPECT_EQ(write_spf(back), text);
    EXPECT_TRUE(back.diagnostics().empty());
}

TEST(SpfGraph, AddRejectsBadInput) {
    InstanceGraph g;
    g.add(2, "IFCWALL", {});
    EXPECT_THROW(g.add(2, "IFCWALL", {}), std::invalid_argument);
    EXPECT_THROW(g.add(0, "IFCWALL", {}), std::invalid_argument);
    EXPECT_THROW(g.add(3, "ifcwall", {}), std::invalid_argument);
    EXPECT_THROW(g.add(3, "1WALL", {}), std::invalid_argument);
    g.add(1, "IFCBEAM", {});
    EXPECT_EQ(g.max_id(), 2u);
    EXPECT_EQ(resolve(g, 1)->type_name(), "IFCBEAM");
    EXPECT_EQ(g.at(0).id(), 2u);
}

TEST(SpfGraph, DetachRebuildIsEqual) {
    auto g = parse_spf(wrap_data("#1=IFCX((1,(2.5,'a')),IFCREAL(1.E3),$);\n#2=IFCY(#1);\n"));
    InstanceGraph h;
    h.header() = g.header();
    for (auto inst : g) h.add(inst.id(), inst.type_name(), inst.detach_attributes());
    EXPECT_TRUE(structurally_equal(g, h));
    EXPECT_EQ(write_spf(g), write_spf(h));
}

TEST(SpfText, FormatReal) {
    EXPECT_EQ(format_real(2.0), "2.");
    EXPECT_EQ(format_real(-2.0), "-2.");
    EXPECT_EQ(format_real(0.0), "0.");
    EXPECT_EQ(format_real(0.5), "0.5");
    EXPECT_EQ(format_real(1e-5), "1.E-05");
    EXPECT_EQ(format_real(6.283185307179586), "6.283185307179586");
    EXPECT_THROW(format_real(std::numeric_limits<double>::infinity()), std::invalid_argument);
}

TEST(SpfText, EncodeDecodeInverse) {
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> pick(0, 6);
    const char* pieces[] = {"a", "'", "\\", "\xC3\xA9", "\xE2\x82\xAC", "\xF0\x9F\x98\x80", " "};
    for (int round = 0; round < 500; ++round) {
        std::string s;
        for (int k = 0; k < 12; ++k) s += pieces[pick(rng)];
        std::vector<std::string> unknown;
        EXPECT_EQ(decode_text(encode_text(s), &unknown), s);
        EXPECT_TRUE(unknown.empty());
    }
}

// Count conservation: instance count equals the "#<n>=" records in DATA.
TEST(SpfParse, InstanceCountMatchesTextScan) {
    std::string data;
    for (int i = 1; i <= 200; ++i) {
        data += "#" + std::to_string(i) + "=IFCCARTESIANPOINT((" + std::to_string(i) + ".,0.,0.));\n";
    }
    auto text = wrap_data(data);
    std::regex record(R"(^#\d+=)", std::regex::multiline);
    auto n = std::distance(std::sregex_iterator(text.begin(), text.end(), record), std::sregex_iterator());
    EXPECT_EQ(parse_spf(text).size(), static_cast<std::size_t>(n));
}

// Parser totality: arbitrary bytes and mutated files either parse or throw
// ParseError; nothing else escapes.
TEST(SpfParse, FuzzTotality) {
    std::mt19937 rng(12345);
    const std::string seed = wrap_data(
        "#1=IFCX(12,-3,1.5E-3,'it''s',.T.,\"0FF\",#1,(1,(2,3)),IFCLABEL('x\\X2\\00E9\\X0\\'),$,*);\n"
        "#2=IFCCARTESIANPOINT((0.,1.,2.));\n");
    const std::string alphabet = "#=();,'.$*\"\\/ EXIFC0123456789-+\n";
    auto attempt = [](const std::string& s) {
        try {
            auto g = parse_spf(s);
            auto again = parse_spf(write_spf(g));
            EXPECT_TRUE(structurally_equal(g, again));
        } catch (const ParseError&) {
        }
    };
    for (int round = 0; round < 3000; ++round) {
        std::string s = seed;
        int edits = 1 + static_cast<int>(rng() % 4);
        for (int e = 0; e < edits; ++e) {
            std::size_t at = rng() % s.size();
            switch (rng() % 3) {
                case 0: s[at] = alphabet[rng() % alphabet.size()]; break;
                case 1: s.erase(at, 1 + rng() % 3); break;
                default: s.insert(at, 1, alphabet[rng() % alphabet.size()]); break;
            }
            if (s.empty()) s = "x";
        }
        attempt(s);
    }
    for (int round = 0; round < 500; ++round) {
        std::string s(rng() % 200, '\0');
        for (char& c : s) c = static_cast<char>(rng() % 256);
        attempt(s);
        attempt("ISO-10303-21;HEADER;ENDSEC;DATA;" + s);
    }
}
