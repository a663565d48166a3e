#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace qcomb {

/// 64-bit FNV-1a; stable across platforms, used for config fingerprints.
std::uint64_t fnv1a64(std::string_view bytes);

/// fnv1a64 as 16 lowercase hex digits.
std::string fingerprint(std::string_view bytes);

}  // namespace qcomb
