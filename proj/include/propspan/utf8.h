// Copyright 2026 The propspan Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PROPSPAN_UTF8_H_
#define PROPSPAN_UTF8_H_

#include <string>
#include <string_view>

namespace propspan {

// All character offsets in this project count Unicode scalar values, so
// article text is held decoded as UTF-32.

// Decodes UTF-8. Throws FormatError on malformed input (overlongs, surrogates
// and truncated sequences included); `what` names the source in the message.
std::u32string DecodeUtf8(std::string_view bytes, const std::string &what = "");

std::string EncodeUtf8(std::u32string_view text);

// Character classes used by tokenization, trimming and key normalization.
// ASCII follows the C locale. Outside ASCII, whitespace and the punctuation
// and symbol blocks are classified explicitly; every other scalar value is
// treated as alphanumeric (letters of non-Latin scripts, CJK, digits).
bool IsSpace(char32_t c);
bool IsAlnum(char32_t c);

// ASCII-only lowercase mapping; other scalar values pass through.
char32_t ToLowerAscii(char32_t c);
std::u32string ToLowerAscii(std::u32string_view text);

}  // namespace propspan

#endif  // PROPSPAN_UTF8_H_
