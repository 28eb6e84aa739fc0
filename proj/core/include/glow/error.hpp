#pragma once

#include <stdexcept>
#include <string>

namespace glow {

/// Base of every error raised by the library. Callers that only need to
/// report a failure can catch this; the pipeline catches it per question.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace glow
