#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cbordns {

enum class errc : std::uint8_t {
    // cbor
    truncated,
    reserved_indicator,
    malformed_indefinite,
    depth_exceeded,
    invalid_utf8,
    invalid_simple,
    // json
    syntax_error,
    missing_field,
    base64_error,
    size_mismatch,
    not_json,
    // metrics
    zero_original,
    // dns wire
    pointer_loop,
    label_overflow,
    name_overflow,
    bad_pointer_target,
    section_overflow,
    // dns+cbor
    multi_question,
    bad_reference,
    type_mismatch,
    missing_question_context,
    // packed
    already_packed,
    index_out_of_range,
    forward_reference,
    // analysis
    family_mismatch,
    hex_error,
    bad_magic,
    unsupported_link_type,
};

constexpr std::string_view to_string(errc e) noexcept
{
    switch (e) {
    case errc::truncated: return "Truncated";
    case errc::reserved_indicator: return "ReservedIndicator";
    case errc::malformed_indefinite: return "MalformedIndefinite";
    case errc::depth_exceeded: return "DepthExceeded";
    case errc::invalid_utf8: return "InvalidUtf8";
    case errc::invalid_simple: return "InvalidSimple";
    case errc::syntax_error: return "SyntaxError";
    case errc::missing_field: return "MissingField";
    case errc::base64_error: return "Base64Error";
    case errc::size_mismatch: return "SizeMismatch";
    case errc::not_json: return "NotJson";
    case errc::zero_original: return "ZeroOriginal";
    case errc::pointer_loop: return "PointerLoop";
    case errc::label_overflow: return "LabelOverflow";
    case errc::name_overflow: return "NameOverflow";
    case errc::bad_pointer_target: return "BadPointerTarget";
    case errc::section_overflow: return "SectionOverflow";
    case errc::multi_question: return "MultiQuestion";
    case errc::bad_reference: return "BadReference";
    case errc::type_mismatch: return "TypeMismatch";
    case errc::missing_question_context: return "MissingQuestionContext";
    case errc::already_packed: return "AlreadyPacked";
    case errc::index_out_of_range: return "IndexOutOfRange";
    case errc::forward_reference: return "ForwardReference";
    case errc::family_mismatch: return "FamilyMismatch";
    case errc::hex_error: return "HexError";
    case errc::bad_magic: return "BadMagic";
    case errc::unsupported_link_type: return "UnsupportedLinkType";
    }
    return "Unknown";
}

/// Single exception type for every codec in the library; `code()` tells
/// callers which contract was violated.
class codec_error : public std::runtime_error {
public:
    codec_error(errc code, const std::string& detail)
        : std::runtime_error(std::string(to_string(code)) + (detail.empty() ? "" : ": " + detail))
        , code_(code)
    {
    }

    explicit codec_error(errc code)
        : codec_error(code, {})
    {
    }

    errc code() const noexcept { return code_; }

private:
    errc code_;
};

} // namespace cbordns
