#include "ifcaudit/spf.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

namespace ifcaudit::spf {

namespace {

[[noreturn]] void wrong_kind(ValueKind have, ValueKind want) {
    throw std::logic_error("attribute value is " + std::string(to_string(have)) + ", not " +
                           std::string(to_string(want)));
}

}  // namespace

ParseError::ParseError(const std::string& message, std::size_t line)
    : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

std::string_view to_string(ValueKind kind) {
    switch (kind) {
        case ValueKind::Unset: return "Unset";
        case ValueKind::Derived: return "Derived";
        case ValueKind::Integer: return "Integer";
        case ValueKind::Real: return "Real";
        case ValueKind::Text: return "Text";
        case ValueKind::Enum: return "Enum";
        case ValueKind::Binary: return "Binary";
        case ValueKind::Reference: return "Reference";
        case ValueKind::List: return "List";
        case ValueKind::Typed: return "Typed";
    }
    return "?";
}

std::string_view to_string(Diagnostic::Code code) {
    switch (code) {
        case Diagnostic::Code::DuplicateInstanceId: return "DuplicateInstanceId";
        case Diagnostic::Code::DanglingReference: return "DanglingReference";
        case Diagnostic::Code::UnknownEscape: return "UnknownEscape";
        case Diagnostic::Code::UnknownHeaderEntity: return "UnknownHeaderEntity";
    }
    return "?";
}

std::string format_real(double v) {
    if (!std::isfinite(v)) throw std::invalid_argument("STEP reals must be finite");
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    std::string s(buf, end);
    auto e = s.find('e');
    std::string mantissa = e == std::string::npos ? s : s.substr(0, e);
    std::string exponent = e == std::string::npos ? "" : s.substr(e + 1);
    if (mantissa.find('.') == std::string::npos) mantissa += '.';
    if (exponent.empty()) return mantissa;
    return mantissa + "E" + exponent;
}

Value Value::unset() { return Value{}; }

Value Value::derived() {
    Value v;
    v.kind_ = ValueKind::Derived;
    return v;
}

Value Value::integer(std::int64_t i) {
    Value v;
    v.kind_ = ValueKind::Integer;
    v.integer_ = i;
    return v;
}

Value Value::real(double d) { return real(d, format_real(d)); }

Value Value::real(double d, std::string lexeme) {
    Value v;
    v.kind_ = ValueKind::Real;
    v.real_ = d;
    v.str_ = std::move(lexeme);
    return v;
}

Value Value::text(std::string logical) {
    std::string raw = encode_text(logical);
    return text(std::move(logical), std::move(raw));
}

Value Value::text(std::string logical, std::string raw) {
    Value v;
    v.kind_ = ValueKind::Text;
    v.str_ = std::move(logical);
    v.raw_ = std::move(raw);
    return v;
}

Value Value::enumeration(std::string token) {
    Value v;
    v.kind_ = ValueKind::Enum;
    v.str_ = std::move(token);
    return v;
}

Value Value::binary(std::string hex) {
    Value v;
    v.kind_ = ValueKind::Binary;
    v.str_ = std::move(hex);
    return v;
}

Value Value::ref(EntityId id) {
    if (id == 0) throw std::invalid_argument("instance references must be positive");
    Value v;
    v.kind_ = ValueKind::Reference;
    v.integer_ = static_cast<std::int64_t>(id);
    return v;
}

Value Value::list(std::vector<Value> items) {
    Value v;
    v.kind_ = ValueKind::List;
    v.items_ = std::move(items);
    return v;
}

Value Value::typed(std::string type_name, Value inner) {
    if (!is_valid_type_name(type_name)) throw std::invalid_argument("bad type name: " + type_name);
    Value v;
    v.kind_ = ValueKind::Typed;
    v.str_ = std::move(type_name);
    v.items_.push_back(std::move(inner));
    return v;
}

std::int64_t Value::as_integer() const {
    if (kind_ != ValueKind::Integer) wrong_kind(kind_, ValueKind::Integer);
    return integer_;
}

double Value::as_real() const {
    if (kind_ != ValueKind::Real) wrong_kind(kind_, ValueKind::Real);
    return real_;
}

double Value::as_number() const {
    if (kind_ == ValueKind::Integer) return static_cast<double>(integer_);
    return as_real();
}

const std::string& Value::lexeme() const {
    if (kind_ != ValueKind::Real) wrong_kind(kind_, ValueKind::Real);
    return str_;
}

const std::string& Value::as_text() const {
    if (kind_ != ValueKind::Text) wrong_kind(kind_, ValueKind::Text);
    return str_;
}

const std::string& Value::raw_text() const {
    if (kind_ != ValueKind::Text) wrong_kind(kind_, ValueKind::Text);
    return raw_;
}

const std::string& Value::as_enum() const {
    if (kind_ != ValueKind::Enum) wrong_kind(kind_, ValueKind::Enum);
    return str_;
}

const std::string& Value::as_binary() const {
    if (kind_ != ValueKind::Binary) wrong_kind(kind_, ValueKind::Binary);
    return str_;
}

EntityId Value::as_reference() const {
    if (kind_ != ValueKind::Reference) wrong_kind(kind_, ValueKind::Reference);
    return static_cast<EntityId>(integer_);
}

const std::vector<Value>& Value::items() const {
    if (kind_ != ValueKind::List) wrong_kind(kind_, ValueKind::List);
    return items_;
}

std::vector<Value>& Value::items() {
    if (kind_ != ValueKind::List) wrong_kind(kind_, ValueKind::List);
    return items_;
}

const std::string& Value::type_name() const {
    if (kind_ != ValueKind::Typed) wrong_kind(kind_, ValueKind::Typed);
    return str_;
}

const Value& Value::inner() const {
    if (kind_ != ValueKind::Typed) wrong_kind(kind_, ValueKind::Typed);
    return items_.front();
}

bool operator==(const Value& a, const Value& b) {
    if (a.kind_ != b.kind_) return false;
    switch (a.kind_) {
        case ValueKind::Unset:
        case ValueKind::Derived: return true;
        case ValueKind::Integer:
        case ValueKind::Reference: return a.integer_ == b.integer_;
        case ValueKind::Real: return a.str_ == b.str_;
        case ValueKind::Text:
        case ValueKind::Enum:
        case ValueKind::Binary: return a.str_ == b.str_;
        case ValueKind::List: return a.items_ == b.items_;
        case ValueKind::Typed: return a.str_ == b.str_ && a.items_ == b.items_;
    }
    return false;
}

bool is_valid_type_name(std::string_view name) {
    if (name.empty()) return false;
    if (name.front() < 'A' || name.front() > 'Z') return false;
    for (char c : name) {
        bool ok = (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
        if (!ok) return false;
    }
    return true;
}

// ---- string escapes -------------------------------------------------------

namespace {

void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

int hex_digit(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    return -1;
}

std::optional<std::uint32_t> parse_hex(std::string_view s) {
    std::uint32_t v = 0;
    for (char c : s) {
        int d = hex_digit(c);
        if (d < 0) return std::nullopt;
        v = v * 16 + static_cast<std::uint32_t>(d);
    }
    return v;
}

// Decodes one \X2\ or \X4\ run starting right after the directive. Returns
// the number of characters consumed through the closing \X0\, or 0 when the
// run is malformed.
std::size_t decode_wide_run(std::string_view s, std::size_t width, std::string& out) {
    std::string decoded;
    std::size_t i = 0;
    char16_t pending_high = 0;
    while (i + 4 <= s.size()) {
        if (s.substr(i, 4) == "\\X0\\") {
            if (pending_high) return 0;
            out += decoded;
            return i + 4;
        }
        if (i + width > s.size()) return 0;
        auto unit = parse_hex(s.substr(i, width));
        if (!unit) return 0;
        char32_t cp = *unit;
        if (width == 4) {
            if (cp >= 0xD800 && cp <= 0xDBFF) {
                if (pending_high) return 0;
                pending_high = static_cast<char16_t>(cp);
                i += width;
                continue;
            }
            if (cp >= 0xDC00 && cp <= 0xDFFF) {
                if (!pending_high) return 0;
                cp = 0x10000 + ((pending_high - 0xD800) << 10) + (cp - 0xDC00);
                pending_high = 0;
            } else if (pending_high) {
                return 0;
            }
        }
        if (cp > 0x10FFFF) return 0;
        append_utf8(decoded, cp);
        i += width;
    }
    return 0;
}

}  // namespace

std::string decode_text(std::string_view raw, std::vector<std::string>* unknown_escapes) {
    std::string out;
    out.reserve(raw.size());
    std::size_t i = 0;
    auto unknown = [&](std::size_t len) {
        if (unknown_escapes) unknown_escapes->emplace_back(raw.substr(i, len));
        out.append(raw.substr(i, len));
        i += len;
    };
    while (i < raw.size()) {
        char c = raw[i];
        if (c == '\'') {
            out += '\'';
            i += (i + 1 < raw.size() && raw[i + 1] == '\'') ? 2 : 1;
            continue;
        }
        if (c != '\\') {
            out += c;
            ++i;
            continue;
        }
        std::string_view rest = raw.substr(i);
        if (rest.starts_with("\\\\")) {
            out += '\\';
            i += 2;
        } else if (rest.size() >= 4 && rest[1] == 'S' && rest[2] == '\\') {
            append_utf8(out, static_cast<unsigned char>(rest[3]) + 0x80u);
            i += 4;
        } else if (rest.size() >= 4 && rest[1] == 'P' && rest[3] == '\\') {
            if (rest[2] != 'A') {
                unknown(4);
            } else {
                i += 4;
            }
        } else if (rest.size() >= 5 && rest.starts_with("\\X\\") && parse_hex(rest.substr(3, 2))) {
            append_utf8(out, *parse_hex(rest.substr(3, 2)));
            i += 5;
        } else if (rest.starts_with("\\X2\\") || rest.starts_with("\\X4\\")) {
            std::size_t width = rest[2] == '2' ? 4 : 8;
            std::size_t used = decode_wide_run(rest.substr(4), width, out);
            if (used == 0) {
                unknown(4);
            } else {
                i += 4 + used;
            }
        } else {
            unknown(1);
        }
    }
    return out;
}

std::string encode_text(std::string_view logical) {
    static const char* digits = "0123456789ABCDEF";
    std::string out;
    out.reserve(logical.size());
    std::vector<char32_t> wide;
    auto flush_wide = [&] {
        if (wide.empty()) return;
        bool astral = false;
        for (char32_t cp : wide) astral |= cp > 0xFFFF;
        out += astral ? "\\X4\\" : "\\X2\\";
        std::size_t width = astral ? 8 : 4;
        for (char32_t cp : wide) {
            for (std::size_t k = width; k-- > 0;) out += digits[(cp >> (4 * k)) & 0xF];
        }
        out += "\\X0\\";
        wide.clear();
    };
    std::size_t i = 0;
    while (i < logical.size()) {
        auto c = static_cast<unsigned char>(logical[i]);
        if (c >= 0x20 && c < 0x7F) {
            flush_wide();
            if (c == '\'') out += "''";
            else if (c == '\\') out += "\\\\";
            else out += static_cast<char>(c);
            ++i;
            continue;
        }
        // Multi-byte UTF-8 sequence; an invalid lead byte is taken as Latin-1.
        std::size_t len = c < 0x80 ? 1 : (c >> 5) == 0x6 ? 2 : (c >> 4) == 0xE ? 3 : (c >> 3) == 0x1E ? 4 : 0;
        char32_t cp = 0;
        bool valid = len > 0 && i + len <= logical.size();
        if (valid) {
            cp = len == 1 ? c : c & (0x7F >> len);
            for (std::size_t k = 1; k < len; ++k) {
                auto cc = static_cast<unsigned char>(logical[i + k]);
                if ((cc & 0xC0) != 0x80) {
                    valid = false;
                    break;
                }
                cp = (cp << 6) | (cc & 0x3F);
            }
        }
        if (!valid) {
            cp = c;
            len = 1;
        }
        wide.push_back(cp);
        i += len;
    }
    flush_wide();
    return out;
}

}  // namespace ifcaudit::spf
