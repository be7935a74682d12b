#include "ifcaudit/validity.hpp"

namespace ifcaudit {

std::string_view to_string(ValidityReason r) {
    switch (r) {
        case ValidityReason::PositiveLength: return "PositiveLength";
        case ValidityReason::ValidExtrusionDirection: return "ValidExtrusionDirection";
        case ValidityReason::ParamRange: return "ParamRange";
        case ValidityReason::BelowPrecision: return "BelowPrecision";
    }
    return "?";
}

}  // namespace ifcaudit
