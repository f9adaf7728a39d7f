#pragma once
#include <stdexcept>

namespace iet {

/* Error taxonomy mirrors the CLI exit codes: config_error -> 2 (bad or
   inconsistent configuration, detected before results are produced),
   budget_error -> 3 (a configured resource cap was hit), anything else,
   including undecidable_error (exact-comparison precision ladder
   exhausted), -> 1. */

struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct budget_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct undecidable_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace iet
