#include "ifcaudit/spf.hpp"

#include <algorithm>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

namespace ifcaudit::spf {

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src) {}

    InstanceGraph run();

private:
    using Node = InstanceGraph::Node;
    static constexpr std::size_t kMaxDepth = 256;

    [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, line_at(pos_)); }

    std::size_t line_at(std::size_t offset) const {
        offset = std::min(offset, src_.size());
        return 1 + static_cast<std::size_t>(std::count(src_.begin(), src_.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
    }

    bool at_end() const { return pos_ >= src_.size(); }
    char peek() const { return at_end() ? '\0' : src_[pos_]; }

    void skip_space() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == ' ' || c == '\n' || c == '\r' || c == '\t' || c == '\f' || c == '\v') {
                ++pos_;
            } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '*') {
                auto close = src_.find("*/", pos_ + 2);
                if (close == std::string_view::npos) fail("unterminated comment");
                pos_ = close + 2;
            } else {
                break;
            }
        }
    }

    void expect(char c) {
        skip_space();
        if (peek() != c) {
            if (at_end()) fail(std::string("unexpected end of file, expected '") + c + "'");
            fail(std::string("expected '") + c + "', found '" + peek() + "'");
        }
        ++pos_;
    }

    static bool keyword_char(char c) {
        return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' ||
               c == '-';
    }

    // Reads a keyword (letters, digits, underscores; '-' allowed for the
    // ISO-10303-21 sentinels). Returns an empty view when none is present.
    std::string_view keyword() {
        skip_space();
        std::size_t start = pos_;
        if (at_end() || !((src_[pos_] >= 'A' && src_[pos_] <= 'Z') || (src_[pos_] >= 'a' && src_[pos_] <= 'z'))) {
            return {};
        }
        while (pos_ < src_.size() && keyword_char(src_[pos_])) ++pos_;
        return src_.substr(start, pos_ - start);
    }

    void expect_keyword(std::string_view want, const char* missing) {
        std::size_t before = pos_;
        auto kw = keyword();
        if (kw != want) {
            pos_ = before;
            skip_space();
            fail(missing);
        }
    }

    std::uint32_t type_id(std::string_view name) {
        auto it = type_cache_.find(name);
        if (it != type_cache_.end()) return it->second;
        std::string upper(name);
        for (char& c : upper) {
            if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
        }
        if (!is_valid_type_name(upper)) fail("invalid entity type name '" + std::string(name) + "'");
        auto id = graph_.intern_type(upper);
        type_cache_.emplace(name, id);
        return id;
    }

    Node parse_value(std::size_t depth);
    Node parse_list(std::size_t depth);
    Node parse_number();
    Node parse_string();
    void parse_header();
    void parse_data();

    std::string_view src_;
    std::size_t pos_ = 0;
    InstanceGraph graph_;
    std::vector<std::vector<Node>> scratch_ = std::vector<std::vector<Node>>(kMaxDepth + 2);
    std::unordered_map<std::string_view, std::uint32_t> type_cache_;
};

Parser::Node Parser::parse_number() {
    std::size_t start = pos_;
    if (peek() == '+' || peek() == '-') ++pos_;
    std::size_t digits_start = pos_;
    while (pos_ < src_.size() && src_[pos_] >= '0' && src_[pos_] <= '9') ++pos_;
    if (pos_ == digits_start) fail("malformed number");
    bool is_real = false;
    if (peek() == '.') {
        is_real = true;
        ++pos_;
        while (pos_ < src_.size() && src_[pos_] >= '0' && src_[pos_] <= '9') ++pos_;
    }
    if (is_real && (peek() == 'E' || peek() == 'e')) {
        std::size_t mark = pos_;
        ++pos_;
        if (peek() == '+' || peek() == '-') ++pos_;
        std::size_t exp_start = pos_;
        while (pos_ < src_.size() && src_[pos_] >= '0' && src_[pos_] <= '9') ++pos_;
        if (pos_ == exp_start) {
            pos_ = mark;
            fail("malformed real exponent");
        }
    }
    std::string_view lexeme = src_.substr(start, pos_ - start);
    std::string_view digits = lexeme;
    if (digits.front() == '+') digits.remove_prefix(1);
    Node n;
    if (is_real) {
        double v = 0;
        auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
        if (ec == std::errc::result_out_of_range) {
            // Subnormal underflow or overflow: fall back to strtod semantics.
            v = std::strtod(std::string(digits).c_str(), nullptr);
        } else if (ec != std::errc() || p != digits.data() + digits.size()) {
            fail("malformed real '" + std::string(lexeme) + "'");
        }
        n.kind = ValueKind::Real;
        n.payload.real = v;
        n.a = graph_.store_string(lexeme);
        n.b = static_cast<std::uint32_t>(lexeme.size());
    } else {
        std::int64_t v = 0;
        auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
        if (ec != std::errc() || p != digits.data() + digits.size()) {
            fail("integer out of range '" + std::string(lexeme) + "'");
        }
        n.kind = ValueKind::Integer;
        n.payload.integer = v;
    }
    return n;
}

Parser::Node Parser::parse_string() {
    std::size_t start = ++pos_;
    std::size_t i = start;
    for (;;) {
        auto q = src_.find('\'', i);
        if (q == std::string_view::npos) {
            pos_ = start - 1;
            fail("unterminated string");
        }
        if (q + 1 < src_.size() && src_[q + 1] == '\'') {
            i = q + 2;
            continue;
        }
        pos_ = q + 1;
        std::string_view raw = src_.substr(start, q - start);
        Node n;
        n.kind = ValueKind::Text;
        n.a = graph_.store_string(raw);
        n.b = static_cast<std::uint32_t>(raw.size());
        std::uint32_t decoded_offset = n.a;
        std::size_t decoded_size = raw.size();
        if (raw.find_first_of("\\'") != std::string_view::npos) {
            std::vector<std::string> unknown;
            std::string decoded = decode_text(raw, &unknown);
            for (const auto& esc : unknown) {
                graph_.diagnostics_.push_back({Diagnostic::Code::UnknownEscape,
                                               "unknown string escape '" + esc + "' kept verbatim",
                                               line_at(start)});
            }
            decoded_size = decoded.size();
            if (decoded != raw) decoded_offset = graph_.store_string(decoded);
        }
        n.payload.bits = (std::uint64_t{decoded_offset} << 32) | decoded_size;
        return n;
    }
}

Parser::Node Parser::parse_list(std::size_t depth) {
    if (depth > kMaxDepth) fail("attribute nesting too deep");
    expect('(');
    auto& items = scratch_[depth];
    items.clear();
    skip_space();
    if (peek() == ')') {
        ++pos_;
    } else {
        for (;;) {
            Node child = parse_value(depth + 1);
            scratch_[depth].push_back(child);
            skip_space();
            char c = peek();
            if (c == ',') {
                ++pos_;
                continue;
            }
            if (c == ')') {
                ++pos_;
                break;
            }
            if (at_end()) fail("unexpected end of file inside a list");
            fail(std::string("expected ',' or ')', found '") + c + "'");
        }
    }
    const auto& done = scratch_[depth];
    Node n;
    n.kind = ValueKind::List;
    n.a = static_cast<std::uint32_t>(graph_.nodes_.size());
    n.b = static_cast<std::uint32_t>(done.size());
    graph_.nodes_.insert(graph_.nodes_.end(), done.begin(), done.end());
    return n;
}

Parser::Node Parser::parse_value(std::size_t depth) {
    skip_space();
    if (at_end()) fail("unexpected end of file, expected a value");
    char c = src_[pos_];
    Node n;
    switch (c) {
        case '$':
            ++pos_;
            n.kind = ValueKind::Unset;
            return n;
        case '*':
            ++pos_;
            n.kind = ValueKind::Derived;
            return n;
        case '#': {
            ++pos_;
            std::size_t start = pos_;
            while (pos_ < src_.size() && src_[pos_] >= '0' && src_[pos_] <= '9') ++pos_;
            EntityId id = 0;
            auto [p, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, id);
            if (start == pos_ || ec != std::errc() || id == 0) fail("malformed instance reference");
            n.kind = ValueKind::Reference;
            n.payload.bits = id;
            return n;
        }
        case '\'': return parse_string();
        case '"': {
            std::size_t start = ++pos_;
            auto close = src_.find('"', start);
            if (close == std::string_view::npos) fail("unterminated binary literal");
            std::string_view hex = src_.substr(start, close - start);
            for (char h : hex) {
                if (!((h >= '0' && h <= '9') || (h >= 'A' && h <= 'F'))) fail("malformed binary literal");
            }
            pos_ = close + 1;
            n.kind = ValueKind::Binary;
            n.a = graph_.store_string(hex);
            n.b = static_cast<std::uint32_t>(hex.size());
            return n;
        }
        case '.': {
            std::size_t start = ++pos_;
            while (pos_ < src_.size() && keyword_char(src_[pos_]) && src_[pos_] != '-') ++pos_;
            if (pos_ == start || peek() != '.') fail("malformed enumeration");
            std::string_view token = src_.substr(start, pos_ - start);
            ++pos_;
            n.kind = ValueKind::Enum;
            n.a = graph_.store_string(token);
            n.b = static_cast<std::uint32_t>(token.size());
            return n;
        }
        case '(': return parse_list(depth);
        default: break;
    }
    if (c == '+' || c == '-' || (c >= '0' && c <= '9')) return parse_number();
    auto kw = keyword();
    if (!kw.empty()) {
        if (depth > kMaxDepth) fail("attribute nesting too deep");
        auto type = type_id(kw);
        expect('(');
        Node inner = parse_value(depth + 1);
        expect(')');
        n.kind = ValueKind::Typed;
        n.a = type;
        n.payload.bits = graph_.nodes_.size();
        graph_.nodes_.push_back(inner);
        return n;
    }
    fail(std::string("unexpected character '") + c + "'");
}

namespace {

std::vector<std::string> text_list(ValueRef v) {
    std::vector<std::string> out;
    if (v.kind() != ValueKind::List) return out;
    for (ValueRef item : v) {
        if (item.kind() == ValueKind::Text) out.emplace_back(item.as_text());
    }
    return out;
}

std::string text_or_empty(ValueRef v) {
    return v.kind() == ValueKind::Text ? std::string(v.as_text()) : std::string();
}

}  // namespace

void Parser::parse_header() {
    expect_keyword("HEADER", "missing HEADER section");
    expect(';');
    for (;;) {
        std::size_t before = pos_;
        auto kw = keyword();
        if (kw.empty()) fail("expected a header entity or ENDSEC");
        if (kw == "ENDSEC") {
            expect(';');
            return;
        }
        Node params = parse_list(0);
        expect(';');
        graph_.nodes_.push_back(params);
        ValueRef list(&graph_, static_cast<std::uint32_t>(graph_.nodes_.size() - 1));
        auto arg = [&](std::size_t i) -> std::optional<ValueRef> {
            if (i >= list.size()) return std::nullopt;
            return list[i];
        };
        auto& h = graph_.header_;
        if (kw == "FILE_DESCRIPTION") {
            if (auto v = arg(0)) h.description = text_list(*v);
            if (auto v = arg(1)) h.implementation_level = text_or_empty(*v);
        } else if (kw == "FILE_NAME") {
            if (auto v = arg(0)) h.file_name.name = text_or_empty(*v);
            if (auto v = arg(1)) h.file_name.timestamp = text_or_empty(*v);
            if (auto v = arg(2)) h.file_name.authors = text_list(*v);
            if (auto v = arg(3)) h.file_name.organizations = text_list(*v);
            if (auto v = arg(4)) h.file_name.preprocessor_version = text_or_empty(*v);
            if (auto v = arg(5)) h.file_name.originating_system = text_or_empty(*v);
            if (auto v = arg(6)) h.file_name.authorization = text_or_empty(*v);
        } else if (kw == "FILE_SCHEMA") {
            if (auto v = arg(0)) h.file_schema = text_list(*v);
        } else {
            graph_.diagnostics_.push_back({Diagnostic::Code::UnknownHeaderEntity,
                                           "header entity " + std::string(kw) + " ignored", line_at(before)});
        }
        // Header values are converted; their nodes are not part of the graph.
        graph_.nodes_.clear();
        graph_.pool_.clear();
    }
}

void Parser::parse_data() {
    for (;;) {
        skip_space();
        if (at_end()) fail("missing ENDSEC at the end of the DATA section");
        if (peek() != '#') {
            auto kw = keyword();
            if (kw == "ENDSEC") {
                expect(';');
                return;
            }
            fail("expected an entity instance or ENDSEC");
        }
        std::size_t record_start = pos_;
        ++pos_;
        std::size_t digits = pos_;
        while (pos_ < src_.size() && src_[pos_] >= '0' && src_[pos_] <= '9') ++pos_;
        EntityId id = 0;
        auto [p, ec] = std::from_chars(src_.data() + digits, src_.data() + pos_, id);
        if (digits == pos_ || ec != std::errc() || id == 0) fail("malformed instance id");
        expect('=');
        skip_space();
        if (peek() == '(') fail("complex entity instances are not supported");
        auto kw = keyword();
        if (kw.empty()) fail("expected an entity type name");
        auto type = type_id(kw);
        Node attrs = parse_list(0);
        expect(';');

        InstanceGraph::Record rec{id, type, attrs.a, attrs.b};
        auto existing = graph_.index_of(id);
        if (existing >= 0) {
            graph_.diagnostics_.push_back({Diagnostic::Code::DuplicateInstanceId,
                                           "instance #" + std::to_string(id) + " redefined; last definition kept",
                                           line_at(record_start)});
            graph_.instances_[static_cast<std::size_t>(existing)] = rec;
        } else {
            graph_.instances_.push_back(rec);
            graph_.insert_index(id, static_cast<std::uint32_t>(graph_.instances_.size() - 1));
        }
    }
}

InstanceGraph Parser::run() {
    // Upper bound on value nodes: every scalar is followed by ',' or ')',
    // every list opens with '('.
    std::size_t separators = 0;
    std::size_t records = 0;
    for (char c : src_) {
        separators += (c == ',') | (c == '(') | (c == ')');
        records += c == ';';
    }
    graph_.nodes_.reserve(separators);
    graph_.instances_.reserve(records);
    graph_.index_.reserve(records);

    skip_space();
    expect_keyword("ISO-10303-21", "missing ISO-10303-21 sentinel");
    expect(';');
    parse_header();

    expect_keyword("DATA", "missing DATA section");
    skip_space();
    if (peek() == '(') parse_list(0);
    expect(';');
    parse_data();

    std::size_t before = pos_;
    auto kw = keyword();
    if (kw == "DATA") fail("multiple DATA sections are not supported");
    if (kw != "END-ISO-10303-21") {
        pos_ = before;
        skip_space();
        fail("missing END-ISO-10303-21 sentinel");
    }
    expect(';');

    for (EntityId id : graph_.dangling_references()) {
        graph_.diagnostics_.push_back({Diagnostic::Code::DanglingReference,
                                       "reference to undefined instance #" + std::to_string(id), 0});
    }
    graph_.byte_size_ = src_.size();
    graph_.nodes_.shrink_to_fit();
    return std::move(graph_);
}

InstanceGraph parse_spf(std::string_view input) { return Parser(input).run(); }

InstanceGraph read_spf_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string content;
    in.seekg(0, std::ios::end);
    auto size = in.tellg();
    if (size > 0) {
        content.resize(static_cast<std::size_t>(size));
        in.seekg(0);
        in.read(content.data(), size);
    }
    if (!in) throw std::runtime_error("cannot read " + path.string());
    return parse_spf(content);
}

}  // namespace ifcaudit::spf
