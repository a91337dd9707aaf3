#include "sig/error.hpp"

namespace sig {

std::string_view kind_name(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::UnsupportedFormat: return "UnsupportedFormat";
        case ErrorKind::CorruptFile: return "CorruptFile";
        case ErrorKind::UnsupportedDepth: return "UnsupportedDepth";
        case ErrorKind::IoError: return "IoError";
        case ErrorKind::OutOfBounds: return "OutOfBounds";
        case ErrorKind::InvalidParams: return "InvalidParams";
        case ErrorKind::PayloadTooLarge: return "PayloadTooLarge";
        case ErrorKind::RowsExceedHeight: return "RowsExceedHeight";
        case ErrorKind::RequestExceedsCapacity: return "RequestExceedsCapacity";
        case ErrorKind::InvalidGrid: return "InvalidGrid";
        case ErrorKind::InvalidStem: return "InvalidStem";
        case ErrorKind::MalformedName: return "MalformedName";
        case ErrorKind::CoverTooShort: return "CoverTooShort";
        case ErrorKind::EmptyCorpus: return "EmptyCorpus";
        case ErrorKind::BuildFailed: return "BuildFailed";
        case ErrorKind::SchemaMismatch: return "SchemaMismatch";
        case ErrorKind::CorruptManifest: return "CorruptManifest";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::ImagesIdentical: return "ImagesIdentical";
    }
    return "Unknown";
}

}  // namespace sig
