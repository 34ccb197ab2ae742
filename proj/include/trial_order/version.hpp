#pragma once

namespace trial_order {

inline constexpr const char* version = "1.0.0";

} // namespace trial_order
