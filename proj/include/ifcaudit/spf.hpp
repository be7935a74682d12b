// STEP Physical File (ISO 10303-21) reading and writing.
//
// A parsed file is held as an InstanceGraph: the header records plus the
// numbered entity instances of the DATA section. Attribute values live in a
// flat node table owned by the graph and are accessed through the lightweight
// ValueRef / InstanceRef views. Graphs built in code use the owning Value tree.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ifcaudit::spf {

using EntityId = std::uint64_t;

/// Fatal parse failure. The file cannot be turned into a graph.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& message, std::size_t line);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

enum class ValueKind : std::uint8_t {
    Unset,      // $
    Derived,    // *
    Integer,
    Real,
    Text,
    Enum,       // .T., .UNSET.
    Binary,
    Reference,  // #12
    List,
    Typed,      // IFCLABEL('x')
};

std::string_view to_string(ValueKind kind);

struct Diagnostic {
    enum class Code {
        DuplicateInstanceId,
        DanglingReference,
        UnknownEscape,
        UnknownHeaderEntity,
    };
    Code code;
    std::string message;
    std::size_t line = 0;
};

std::string_view to_string(Diagnostic::Code code);

/// Owning attribute value, used to construct graphs and to detach values
/// from one.
class Value {
public:
    Value() = default;

    static Value unset();
    static Value derived();
    static Value integer(std::int64_t v);
    /// Real with a lexeme produced by format_real().
    static Value real(double v);
    /// Real keeping the given source lexeme.
    static Value real(double v, std::string lexeme);
    /// Text from its logical (UTF-8) content; the raw form is the encoded text.
    static Value text(std::string logical);
    static Value text(std::string logical, std::string raw);
    static Value enumeration(std::string token);
    static Value binary(std::string hex);
    static Value ref(EntityId id);
    static Value list(std::vector<Value> items);
    static Value typed(std::string type_name, Value inner);

    ValueKind kind() const noexcept { return kind_; }
    std::int64_t as_integer() const;
    double as_real() const;
    double as_number() const;
    const std::string& lexeme() const;
    const std::string& as_text() const;
    const std::string& raw_text() const;
    const std::string& as_enum() const;
    const std::string& as_binary() const;
    EntityId as_reference() const;
    const std::vector<Value>& items() const;
    std::vector<Value>& items();
    const std::string& type_name() const;
    const Value& inner() const;

    friend bool operator==(const Value& a, const Value& b);

private:
    ValueKind kind_ = ValueKind::Unset;
    std::int64_t integer_ = 0;
    double real_ = 0.0;
    std::string str_;   // lexeme, logical text, enum token, binary, type name
    std::string raw_;   // raw text form
    std::vector<Value> items_;  // list items, or the single inner value of Typed
};

/// Shortest round-trip STEP lexeme for a finite double ("2.", "0.5", "1.E-05").
std::string format_real(double v);

struct FileName {
    std::string name;
    std::string timestamp;
    std::vector<std::string> authors;
    std::vector<std::string> organizations;
    std::string preprocessor_version;
    std::string originating_system;
    std::string authorization;

    friend bool operator==(const FileName&, const FileName&) = default;
};

struct SpfHeader {
    std::vector<std::string> description;
    std::string implementation_level = "2;1";
    FileName file_name;
    std::vector<std::string> file_schema;

    friend bool operator==(const SpfHeader&, const SpfHeader&) = default;
};

class InstanceGraph;

/// View of one attribute value inside a graph. Cheap to copy; valid while the
/// graph is alive and unmodified.
class ValueRef {
public:
    ValueKind kind() const noexcept;
    bool is_unset() const noexcept { return kind() == ValueKind::Unset; }

    std::int64_t as_integer() const;
    double as_real() const;
    /// Integer or Real as double.
    double as_number() const;
    bool is_number() const noexcept;
    std::string_view lexeme() const;
    std::string_view as_text() const;
    std::string_view raw_text() const;
    std::string_view as_enum() const;
    std::string_view as_binary() const;
    EntityId as_reference() const;

    std::size_t size() const;
    ValueRef operator[](std::size_t i) const;

    std::string_view type_name() const;
    ValueRef inner() const;

    Value detach() const;

    class iterator {
    public:
        using value_type = ValueRef;
        using difference_type = std::ptrdiff_t;
        iterator() = default;
        iterator(const InstanceGraph* g, std::uint32_t node) : graph_(g), node_(node) {}
        ValueRef operator*() const { return ValueRef(graph_, node_); }
        iterator& operator++() { ++node_; return *this; }
        iterator operator++(int) { auto t = *this; ++node_; return t; }
        bool operator==(const iterator& o) const { return node_ == o.node_; }

    private:
        const InstanceGraph* graph_ = nullptr;
        std::uint32_t node_ = 0;
    };
    iterator begin() const;
    iterator end() const;

private:
    friend class InstanceGraph;
    friend class InstanceRef;
    friend class Parser;
    ValueRef(const InstanceGraph* g, std::uint32_t node) : graph_(g), node_(node) {}
    const InstanceGraph* graph_;
    std::uint32_t node_;
};

class InstanceRef {
public:
    EntityId id() const noexcept;
    std::string_view type_name() const noexcept;
    std::size_t attribute_count() const noexcept;
    /// Attribute by position; throws std::out_of_range past the end.
    ValueRef attribute(std::size_t i) const;
    /// Attribute by position, or nullopt when the instance has fewer.
    std::optional<ValueRef> attribute_if(std::size_t i) const;
    std::vector<Value> detach_attributes() const;

private:
    friend class InstanceGraph;
    InstanceRef(const InstanceGraph* g, std::uint32_t index) : graph_(g), index_(index) {}
    const InstanceGraph* graph_;
    std::uint32_t index_;
};

class InstanceGraph {
public:
    SpfHeader& header() noexcept { return header_; }
    const SpfHeader& header() const noexcept { return header_; }

    std::size_t size() const noexcept { return instances_.size(); }
    bool empty() const noexcept { return instances_.empty(); }
    /// Instance by position in file order.
    InstanceRef at(std::size_t index) const;
    std::optional<InstanceRef> find(EntityId id) const;
    bool contains(EntityId id) const { return find(id).has_value(); }
    EntityId max_id() const noexcept;

    /// Appends an instance. Throws std::invalid_argument for a zero or
    /// already used id or a malformed type name.
    void add(EntityId id, std::string_view type_name, std::span<const Value> attributes);
    void add(EntityId id, std::string_view type_name, std::initializer_list<Value> attributes) {
        add(id, type_name, std::span<const Value>(attributes.begin(), attributes.size()));
    }

    /// Ids referenced from some attribute but not defined in the graph.
    std::vector<EntityId> dangling_references() const;

    const std::vector<Diagnostic>& diagnostics() const noexcept { return diagnostics_; }
    std::size_t byte_size() const noexcept { return byte_size_; }
    void set_byte_size(std::size_t n) noexcept { byte_size_ = n; }

    class iterator {
    public:
        using value_type = InstanceRef;
        using difference_type = std::ptrdiff_t;
        iterator() = default;
        iterator(const InstanceGraph* g, std::uint32_t i) : graph_(g), index_(i) {}
        InstanceRef operator*() const { return InstanceRef(graph_, index_); }
        iterator& operator++() { ++index_; return *this; }
        iterator operator++(int) { auto t = *this; ++index_; return t; }
        bool operator==(const iterator& o) const { return index_ == o.index_; }

    private:
        const InstanceGraph* graph_ = nullptr;
        std::uint32_t index_ = 0;
    };
    iterator begin() const { return iterator(this, 0); }
    iterator end() const { return iterator(this, static_cast<std::uint32_t>(instances_.size())); }

private:
    friend class ValueRef;
    friend class InstanceRef;
    friend class Parser;

    struct Node {
        std::uint32_t a = 0;
        std::uint32_t b = 0;
        union {
            double real;
            std::int64_t integer;
            std::uint64_t bits;
        } payload{.bits = 0};
        ValueKind kind = ValueKind::Unset;
    };

    struct Record {
        EntityId id;
        std::uint32_t type;
        std::uint32_t first;
        std::uint32_t count;
    };

    std::uint32_t intern_type(std::string_view name);
    std::uint32_t store_string(std::string_view s);
    std::string_view pooled(std::uint32_t offset, std::uint32_t length) const {
        return std::string_view(pool_).substr(offset, length);
    }
    Node build_node(const Value& v);
    const Node& node(std::uint32_t i) const { return nodes_[i]; }
    std::int64_t index_of(EntityId id) const;
    void insert_index(EntityId id, std::uint32_t record);

    SpfHeader header_;
    std::vector<Record> instances_;
    std::vector<std::pair<EntityId, std::uint32_t>> index_;  // sorted by id
    std::vector<Node> nodes_;
    std::string pool_;
    std::vector<std::string> types_;
    std::unordered_map<std::string, std::uint32_t> type_ids_;
    std::vector<Diagnostic> diagnostics_;
    std::size_t byte_size_ = 0;
};

/// Parses ISO 10303-21 text. Throws ParseError for malformed input.
InstanceGraph parse_spf(std::string_view input);
InstanceGraph read_spf_file(const std::filesystem::path& path);

std::string write_spf(const InstanceGraph& graph);
void write_spf(const InstanceGraph& graph, std::ostream& out);

std::optional<InstanceRef> resolve(const InstanceGraph& graph, EntityId id);

/// Same header, same ids in the same order, same type names, same
/// attribute trees.
bool structurally_equal(const InstanceGraph& a, const InstanceGraph& b);
bool structurally_equal(ValueRef a, ValueRef b);

/// Decodes the raw content of a STEP string (between the quotes) to UTF-8.
/// Unknown escapes are copied through and reported in `unknown_escapes`.
std::string decode_text(std::string_view raw, std::vector<std::string>* unknown_escapes = nullptr);
/// Encodes UTF-8 text as the raw content of a STEP string.
std::string encode_text(std::string_view logical);

/// True if `name` is an upper-case STEP keyword (letter, then letters,
/// digits or underscores).
bool is_valid_type_name(std::string_view name);

}  // namespace ifcaudit::spf
