#pragma once

namespace hybran {

inline constexpr const char* kVersion = "0.1.0";

// Identifier of the pseudo-random generator used everywhere; recorded in
// output metadata so datasets stay reproducible across implementations.
inline constexpr const char* kPrngId = "xoshiro256**";

}  // namespace hybran
