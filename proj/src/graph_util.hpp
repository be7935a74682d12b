// Small read helpers over InstanceGraph shared by the analysis modules.

#pragma once

#include "ifcaudit/spf.hpp"

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ifcaudit::detail {

inline std::optional<spf::ValueRef> attr(spf::InstanceRef inst, std::size_t i) {
    auto v = inst.attribute_if(i);
    if (!v || v->is_unset() || v->kind() == spf::ValueKind::Derived) return std::nullopt;
    return v;
}

inline std::optional<spf::InstanceRef> deref(const spf::InstanceGraph& g, std::optional<spf::ValueRef> v) {
    if (!v || v->kind() != spf::ValueKind::Reference) return std::nullopt;
    return g.find(v->as_reference());
}

inline std::optional<spf::InstanceRef> deref_attr(const spf::InstanceGraph& g, spf::InstanceRef inst, std::size_t i) {
    return deref(g, attr(inst, i));
}

/// Integer or Real, also when wrapped in a typed value such as IFCREAL(1.).
inline std::optional<double> number(std::optional<spf::ValueRef> v) {
    while (v && v->kind() == spf::ValueKind::Typed) v = v->inner();
    if (!v || !v->is_number()) return std::nullopt;
    return v->as_number();
}

inline std::optional<double> number_attr(spf::InstanceRef inst, std::size_t i) { return number(attr(inst, i)); }

inline std::optional<std::string> text(std::optional<spf::ValueRef> v) {
    while (v && v->kind() == spf::ValueKind::Typed) v = v->inner();
    if (!v || v->kind() != spf::ValueKind::Text) return std::nullopt;
    return std::string(v->as_text());
}

inline std::optional<std::string> text_attr(spf::InstanceRef inst, std::size_t i) { return text(attr(inst, i)); }

inline std::optional<std::string> enum_attr(spf::InstanceRef inst, std::size_t i) {
    auto v = attr(inst, i);
    if (!v || v->kind() != spf::ValueKind::Enum) return std::nullopt;
    return std::string(v->as_enum());
}

/// Numeric list items; nullopt if the value is not a list of numbers.
inline std::optional<std::vector<double>> numbers(std::optional<spf::ValueRef> v) {
    if (!v || v->kind() != spf::ValueKind::List) return std::nullopt;
    std::vector<double> out;
    for (spf::ValueRef item : *v) {
        auto n = number(item);
        if (!n) return std::nullopt;
        out.push_back(*n);
    }
    return out;
}

inline std::vector<spf::InstanceRef> instances_of(const spf::InstanceGraph& g, std::string_view type) {
    std::vector<spf::InstanceRef> out;
    for (spf::InstanceRef inst : g)
        if (inst.type_name() == type) out.push_back(inst);
    return out;
}

/// Coordinates of an IFCCARTESIANPOINT padded to 3D.
inline std::optional<std::array<double, 3>> point3(std::optional<spf::InstanceRef> p) {
    if (!p || p->type_name() != "IFCCARTESIANPOINT") return std::nullopt;
    auto c = numbers(attr(*p, 0));
    if (!c || c->empty() || c->size() > 3) return std::nullopt;
    std::array<double, 3> out{0, 0, 0};
    for (std::size_t i = 0; i < c->size(); ++i) out[i] = (*c)[i];
    return out;
}

/// Direction ratios of an IFCDIRECTION padded to 3D, unnormalised.
inline std::optional<std::array<double, 3>> direction3(std::optional<spf::InstanceRef> d) {
    if (!d || d->type_name() != "IFCDIRECTION") return std::nullopt;
    auto c = numbers(attr(*d, 0));
    if (!c || c->empty() || c->size() > 3) return std::nullopt;
    std::array<double, 3> out{0, 0, 0};
    for (std::size_t i = 0; i < c->size(); ++i) out[i] = (*c)[i];
    return out;
}

}  // namespace ifcaudit::detail
