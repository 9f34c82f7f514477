#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace udos {

enum class ErrorKind {
  kInvalidArgument,
  kDimensionMismatch,
  kFormat,
  kSchema,
  kIo,
  kNotFound,
  kUnknownImage,
  kUnsorted,
};

std::string_view error_kind_name(ErrorKind kind);

// Base of every error the library raises. kind() gives a stable,
// machine-readable class for CLI error records.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

#define UDOS_DEFINE_ERROR(Name, Kind)                        \
  class Name : public Error {                                \
   public:                                                   \
    explicit Name(const std::string& message)                \
        : Error(ErrorKind::Kind, message) {}                 \
  }

UDOS_DEFINE_ERROR(InvalidArgument, kInvalidArgument);
UDOS_DEFINE_ERROR(DimensionMismatch, kDimensionMismatch);
UDOS_DEFINE_ERROR(FormatError, kFormat);
UDOS_DEFINE_ERROR(SchemaError, kSchema);
UDOS_DEFINE_ERROR(IoError, kIo);
UDOS_DEFINE_ERROR(NotFoundError, kNotFound);
UDOS_DEFINE_ERROR(UnknownImageError, kUnknownImage);
UDOS_DEFINE_ERROR(UnsortedError, kUnsorted);

#undef UDOS_DEFINE_ERROR

}  // namespace udos
