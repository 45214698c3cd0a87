#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace pm {

// Shortest round-trip decimal form of v (printf %.17g tightened when fewer
// digits reproduce the same double). Used everywhere a double is serialized,
// so byte-identical output is a pure function of the values.
std::string format_double(double v);

// Write content to path via a temp file in the same directory plus an atomic
// rename, so readers never observe a partial file and interrupted runs leave
// no output at the target path.
void write_text_atomic(const std::string& path, std::string_view content);

std::string read_text(const std::string& path);

// FNV-1a, used for config and output digests.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

}  // namespace pm
