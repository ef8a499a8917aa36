#pragma once

#include <string>
#include <string_view>

namespace litrev {

// Extracts the text layer of a PDF in page order. Pages are separated by a
// newline, as are text lines within a page. Handles uncompressed, Flate,
// ASCIIHex and ASCII85 streams, object streams, ToUnicode CMaps and simple
// single-byte encodings. Encrypted files and image-only pages are not
// supported; both surface as ErrorKind::extraction.
std::string extract_pdf_text(std::string_view pdf_bytes);

bool looks_like_pdf(std::string_view bytes);

}  // namespace litrev
