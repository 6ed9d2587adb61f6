#pragma once

#include <stdexcept>
#include <string>

namespace sprank1 {

/// Bad caller input: negative weights, out-of-range modes, malformed specs.
class validation_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Sizes that do not line up (vector lengths, reshape targets, shapes).
class dimension_error : public validation_error {
public:
    using validation_error::validation_error;
};

/// The numbers themselves make the request impossible (zero tensor,
/// vanishing contraction, exhausted regeneration budget).
class numeric_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// File could not be opened, read, written or parsed.
class io_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace sprank1
