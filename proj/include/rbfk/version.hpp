#pragma once

namespace rbfk {

#ifdef RBFK_VERSION_STRING
inline constexpr const char* version = RBFK_VERSION_STRING;
#else
inline constexpr const char* version = "0.1.0";
#endif

// Identifier of the counter-mode pseudo-random generator used for all
// sampling. Outputs are reproducible across implementations only when the
// same named generator is used.
inline constexpr const char* generator_id = "splitmix64-v1";

}  // namespace rbfk
