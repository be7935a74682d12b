#pragma once

#include <set>
#include <string_view>

namespace ifcaudit {

enum class ValidityReason { PositiveLength, ValidExtrusionDirection, ParamRange, BelowPrecision };

std::string_view to_string(ValidityReason r);

/// Invalid iff `reasons` is non-empty. BelowPrecision only ever appears in
/// `warnings`, it does not make an item invalid.
struct ValidityVerdict {
    std::set<ValidityReason> reasons;
    std::set<ValidityReason> warnings;

    bool valid() const noexcept { return reasons.empty(); }
    std::string_view status() const noexcept { return valid() ? "Valid" : "Invalid"; }

    friend bool operator==(const ValidityVerdict&, const ValidityVerdict&) = default;
};

}  // namespace ifcaudit
