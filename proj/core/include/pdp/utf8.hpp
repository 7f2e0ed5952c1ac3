#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace pdp::utf8 {

/// Decodes UTF-8 into code points. Ill-formed sequences become U+FFFD.
std::u32string decode(std::string_view text);

std::string encode(std::u32string_view text);
std::string encode(char32_t cp);

/// Number of code points in `text`.
std::size_t length(std::string_view text);

}  // namespace pdp::utf8
