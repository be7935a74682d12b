#include "ifcaudit/spf.hpp"

#include <algorithm>
#include <limits>

namespace ifcaudit::spf {

namespace {

[[noreturn]] void wrong_kind(ValueKind have, ValueKind want) {
    throw std::logic_error("attribute value is " + std::string(to_string(have)) + ", not " +
                           std::string(to_string(want)));
}

}  // namespace

// ---- ValueRef -------------------------------------------------------------

ValueKind ValueRef::kind() const noexcept { return graph_->node(node_).kind; }

std::int64_t ValueRef::as_integer() const {
    const auto& n = graph_->node(node_);
    if (n.kind != ValueKind::Integer) wrong_kind(n.kind, ValueKind::Integer);
    return n.payload.integer;
}

double ValueRef::as_real() const {
    const auto& n = graph_->node(node_);
    if (n.kind != ValueKind::Real) wrong_kind(n.kind, ValueKind::Real);
    return n.payload.real;
}

bool ValueRef::is_number() const noexcept {
    auto k = kind();
    return k == ValueKind::Integer || k == ValueKind::Real;
}

double ValueRef::as_number() const {
    const auto& n = graph_->node(node_);
    if (n.kind == ValueKind::Integer) return static_cast<double>(n.payload.integer);
    return as_real();
}

std::string_view ValueRef::lexeme() const {
    const auto& n = graph_->node(node_);
    if (n.kind != ValueKind::Real) wrong_kind(n.kind, ValueKind::Real);
    return graph_->pooled(n.a, n.b);
}

std::string_view ValueRef::as_text() const {
    const auto& n = graph_->node(node_);
    if (n.kind != ValueKind::Text) wrong_kind(n.kind, ValueKind::Text);
    return graph_->pooled(static_cast<std::uint32_t>(n.payload.bits >> 32),
                          static_cast<std::uint32_t>(n.payload.bits & 0xFFFFFFFFu));
}

std::string_view ValueRef::raw_text() const {
    const auto& n = graph_->node(node_);
    if (n.kind != ValueKind::Text) wrong_kind(n.kind, ValueKind::Text);
    return graph_->pooled(n.a, n.b);
}

std::string_view ValueRef::as_enum() const {
    const auto& n = graph_->node(node_);
    if (n.kind != ValueKind::Enum) wrong_kind(n.kind, ValueKind::Enum);
    return graph_->pooled(n.a, n.b);
}

std::string_view ValueRef::as_binary() const {
    const auto& n = graph_->node(node_);
    if (n.kind != ValueKind::Binary) wrong_kind(n.kind, ValueKind::Binary);
    return graph_->pooled(n.a, n.b);
}

EntityId ValueRef::as_reference() const {
    const auto& n = graph_->node(node_);
    if (n.kind != ValueKind::Reference) wrong_kind(n.kind, ValueKind::Reference);
    return n.payload.bits;
}

std::size_t ValueRef::size() const {
    const auto& n = graph_->node(node_);
    if (n.kind != ValueKind::List) wrong_kind(n.kind, ValueKind::List);
    return n.b;
}

ValueRef ValueRef::operator[](std::size_t i) const {
    const auto& n = graph_->node(node_);
    if (n.kind != ValueKind::List) wrong_kind(n.kind, ValueKind::List);
    if (i >= n.b) throw std::out_of_range("list index out of range");
    return ValueRef(graph_, n.a + static_cast<std::uint32_t>(i));
}

ValueRef::iterator ValueRef::begin() const {
    const auto& n = graph_->node(node_);
    if (n.kind != ValueKind::List) wrong_kind(n.kind, ValueKind::List);
    return iterator(graph_, n.a);
}

ValueRef::iterator ValueRef::end() const {
    const auto& n = graph_->node(node_);
    if (n.kind != ValueKind::List) wrong_kind(n.kind, ValueKind::List);
    return iterator(graph_, n.a + n.b);
}

std::string_view ValueRef::type_name() const {
    const auto& n = graph_->node(node_);
    if (n.kind != ValueKind::Typed) wrong_kind(n.kind, ValueKind::Typed);
    return graph_->types_[n.a];
}

ValueRef ValueRef::inner() const {
    const auto& n = graph_->node(node_);
    if (n.kind != ValueKind::Typed) wrong_kind(n.kind, ValueKind::Typed);
    return ValueRef(graph_, static_cast<std::uint32_t>(n.payload.bits));
}

Value ValueRef::detach() const {
    switch (kind()) {
        case ValueKind::Unset: return Value::unset();
        case ValueKind::Derived: return Value::derived();
        case ValueKind::Integer: return Value::integer(as_integer());
        case ValueKind::Real: return Value::real(as_real(), std::string(lexeme()));
        case ValueKind::Text: return Value::text(std::string(as_text()), std::string(raw_text()));
        case ValueKind::Enum: return Value::enumeration(std::string(as_enum()));
        case ValueKind::Binary: return Value::binary(std::string(as_binary()));
        case ValueKind::Reference: return Value::ref(as_reference());
        case ValueKind::List: {
            std::vector<Value> items;
            items.reserve(size());
            for (ValueRef v : *this) items.push_back(v.detach());
            return Value::list(std::move(items));
        }
        case ValueKind::Typed: return Value::typed(std::string(type_name()), inner().detach());
    }
    return Value::unset();
}

// ---- InstanceRef ----------------------------------------------------------

EntityId InstanceRef::id() const noexcept { return graph_->instances_[index_].id; }

std::string_view InstanceRef::type_name() const noexcept {
    return graph_->types_[graph_->instances_[index_].type];
}

std::size_t InstanceRef::attribute_count() const noexcept { return graph_->instances_[index_].count; }

ValueRef InstanceRef::attribute(std::size_t i) const {
    const auto& r = graph_->instances_[index_];
    if (i >= r.count) {
        throw std::out_of_range("#" + std::to_string(r.id) + " has no attribute " + std::to_string(i));
    }
    return ValueRef(graph_, r.first + static_cast<std::uint32_t>(i));
}

std::optional<ValueRef> InstanceRef::attribute_if(std::size_t i) const {
    const auto& r = graph_->instances_[index_];
    if (i >= r.count) return std::nullopt;
    return ValueRef(graph_, r.first + static_cast<std::uint32_t>(i));
}

std::vector<Value> InstanceRef::detach_attributes() const {
    std::vector<Value> out;
    out.reserve(attribute_count());
    for (std::size_t i = 0; i < attribute_count(); ++i) out.push_back(attribute(i).detach());
    return out;
}

// ---- InstanceGraph --------------------------------------------------------

InstanceRef InstanceGraph::at(std::size_t index) const {
    if (index >= instances_.size()) throw std::out_of_range("instance index out of range");
    return InstanceRef(this, static_cast<std::uint32_t>(index));
}

std::int64_t InstanceGraph::index_of(EntityId id) const {
    auto it = std::lower_bound(index_.begin(), index_.end(), id,
                               [](const auto& entry, EntityId key) { return entry.first < key; });
    if (it == index_.end() || it->first != id) return -1;
    return it->second;
}

void InstanceGraph::insert_index(EntityId id, std::uint32_t record) {
    if (index_.empty() || index_.back().first < id) {
        index_.emplace_back(id, record);
        return;
    }
    auto it = std::lower_bound(index_.begin(), index_.end(), id,
                               [](const auto& entry, EntityId key) { return entry.first < key; });
    index_.insert(it, {id, record});
}

std::optional<InstanceRef> InstanceGraph::find(EntityId id) const {
    auto i = index_of(id);
    if (i < 0) return std::nullopt;
    return InstanceRef(this, static_cast<std::uint32_t>(i));
}

EntityId InstanceGraph::max_id() const noexcept { return index_.empty() ? 0 : index_.back().first; }

std::uint32_t InstanceGraph::intern_type(std::string_view name) {
    auto it = type_ids_.find(std::string(name));
    if (it != type_ids_.end()) return it->second;
    auto id = static_cast<std::uint32_t>(types_.size());
    types_.emplace_back(name);
    type_ids_.emplace(std::string(name), id);
    return id;
}

std::uint32_t InstanceGraph::store_string(std::string_view s) {
    if (pool_.size() + s.size() > std::numeric_limits<std::uint32_t>::max()) {
        throw std::length_error("string pool exceeds 4 GiB");
    }
    auto offset = static_cast<std::uint32_t>(pool_.size());
    pool_.append(s);
    return offset;
}

InstanceGraph::Node InstanceGraph::build_node(const Value& v) {
    Node n;
    n.kind = v.kind();
    switch (v.kind()) {
        case ValueKind::Unset:
        case ValueKind::Derived: break;
        case ValueKind::Integer: n.payload.integer = v.as_integer(); break;
        case ValueKind::Real:
            n.payload.real = v.as_real();
            n.a = store_string(v.lexeme());
            n.b = static_cast<std::uint32_t>(v.lexeme().size());
            break;
        case ValueKind::Text: {
            n.a = store_string(v.raw_text());
            n.b = static_cast<std::uint32_t>(v.raw_text().size());
            std::uint32_t offset = n.a;
            if (v.as_text() != v.raw_text()) offset = store_string(v.as_text());
            n.payload.bits = (std::uint64_t{offset} << 32) | v.as_text().size();
            break;
        }
        case ValueKind::Enum:
            n.a = store_string(v.as_enum());
            n.b = static_cast<std::uint32_t>(v.as_enum().size());
            break;
        case ValueKind::Binary:
            n.a = store_string(v.as_binary());
            n.b = static_cast<std::uint32_t>(v.as_binary().size());
            break;
        case ValueKind::Reference: n.payload.bits = v.as_reference(); break;
        case ValueKind::List: {
            std::vector<Node> children;
            children.reserve(v.items().size());
            for (const auto& item : v.items()) children.push_back(build_node(item));
            n.a = static_cast<std::uint32_t>(nodes_.size());
            n.b = static_cast<std::uint32_t>(children.size());
            nodes_.insert(nodes_.end(), children.begin(), children.end());
            break;
        }
        case ValueKind::Typed: {
            Node inner = build_node(v.inner());
            n.a = intern_type(v.type_name());
            n.payload.bits = nodes_.size();
            nodes_.push_back(inner);
            break;
        }
    }
    return n;
}

void InstanceGraph::add(EntityId id, std::string_view type_name, std::span<const Value> attributes) {
    if (id == 0) throw std::invalid_argument("instance ids must be positive");
    if (!is_valid_type_name(type_name)) {
        throw std::invalid_argument("bad type name: " + std::string(type_name));
    }
    if (index_of(id) >= 0) throw std::invalid_argument("duplicate instance id #" + std::to_string(id));
    std::vector<Node> top;
    top.reserve(attributes.size());
    for (const auto& a : attributes) top.push_back(build_node(a));
    Record r{id, intern_type(type_name), static_cast<std::uint32_t>(nodes_.size()),
             static_cast<std::uint32_t>(top.size())};
    nodes_.insert(nodes_.end(), top.begin(), top.end());
    instances_.push_back(r);
    insert_index(id, static_cast<std::uint32_t>(instances_.size() - 1));
}

std::vector<EntityId> InstanceGraph::dangling_references() const {
    std::vector<EntityId> missing;
    std::vector<std::uint32_t> stack;
    for (const auto& r : instances_) {
        for (std::uint32_t k = 0; k < r.count; ++k) stack.push_back(r.first + k);
        while (!stack.empty()) {
            const Node& n = nodes_[stack.back()];
            stack.pop_back();
            switch (n.kind) {
                case ValueKind::Reference:
                    if (index_of(n.payload.bits) < 0) missing.push_back(n.payload.bits);
                    break;
                case ValueKind::List:
                    for (std::uint32_t k = 0; k < n.b; ++k) stack.push_back(n.a + k);
                    break;
                case ValueKind::Typed: stack.push_back(static_cast<std::uint32_t>(n.payload.bits)); break;
                default: break;
            }
        }
    }
    std::sort(missing.begin(), missing.end());
    missing.erase(std::unique(missing.begin(), missing.end()), missing.end());
    return missing;
}

std::optional<InstanceRef> resolve(const InstanceGraph& graph, EntityId id) { return graph.find(id); }

bool structurally_equal(ValueRef a, ValueRef b) {
    if (a.kind() != b.kind()) return false;
    switch (a.kind()) {
        case ValueKind::Unset:
        case ValueKind::Derived: return true;
        case ValueKind::Integer: return a.as_integer() == b.as_integer();
        case ValueKind::Real: return a.lexeme() == b.lexeme() && a.as_real() == b.as_real();
        case ValueKind::Text: return a.as_text() == b.as_text();
        case ValueKind::Enum: return a.as_enum() == b.as_enum();
        case ValueKind::Binary: return a.as_binary() == b.as_binary();
        case ValueKind::Reference: return a.as_reference() == b.as_reference();
        case ValueKind::List: {
            if (a.size() != b.size()) return false;
            for (std::size_t i = 0; i < a.size(); ++i) {
                if (!structurally_equal(a[i], b[i])) return false;
            }
            return true;
        }
        case ValueKind::Typed: return a.type_name() == b.type_name() && structurally_equal(a.inner(), b.inner());
    }
    return false;
}

bool structurally_equal(const InstanceGraph& a, const InstanceGraph& b) {
    if (!(a.header() == b.header()) || a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        InstanceRef x = a.at(i);
        InstanceRef y = b.at(i);
        if (x.id() != y.id() || x.type_name() != y.type_name()) return false;
        if (x.attribute_count() != y.attribute_count()) return false;
        for (std::size_t k = 0; k < x.attribute_count(); ++k) {
            if (!structurally_equal(x.attribute(k), y.attribute(k))) return false;
        }
    }
    return true;
}

}  // namespace ifcaudit::spf
