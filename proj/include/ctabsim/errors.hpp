#pragma once

#include <stdexcept>
#include <string>

namespace ctab {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SchemaError : Error { using Error::Error; };
struct IngestError : Error { using Error::Error; };
struct BoundsError : Error { using Error::Error; };
struct PreconditionError : Error { using Error::Error; };
struct CorruptionError : Error { using Error::Error; };
struct ReferentialError : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };
struct PlanError : Error { using Error::Error; };
struct ExecError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

}  // namespace ctab
