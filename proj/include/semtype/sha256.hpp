#pragma once

#include <string>

namespace semtype {

// FIPS 180-4 SHA-256 of a byte string, lowercase hex. Only used for corpus
// manifest verification.
std::string sha256_hex(const std::string& bytes);

}  // namespace semtype
