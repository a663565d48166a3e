#include "qcomb/hash.hpp"

#include <fmt/format.h>

namespace qcomb {

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string fingerprint(std::string_view bytes) { return fmt::format("{:016x}", fnv1a64(bytes)); }

}  // namespace qcomb
