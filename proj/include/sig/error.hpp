#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sig {

enum class ErrorKind {
    UnsupportedFormat,
    CorruptFile,
    UnsupportedDepth,
    IoError,
    OutOfBounds,
    InvalidParams,
    PayloadTooLarge,
    RowsExceedHeight,
    RequestExceedsCapacity,
    InvalidGrid,
    InvalidStem,
    MalformedName,
    CoverTooShort,
    EmptyCorpus,
    BuildFailed,
    SchemaMismatch,
    CorruptManifest,
    DimensionMismatch,
    ImagesIdentical,
};

std::string_view kind_name(ErrorKind kind) noexcept;

// Every failure raised by the library. what() is "<KindName>: <detail>".
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& detail)
        : std::runtime_error(std::string(kind_name(kind)) + ": " + detail), kind_(kind), detail_(detail) {}

    ErrorKind kind() const noexcept { return kind_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorKind kind_;
    std::string detail_;
};

}  // namespace sig
