#pragma once

#include <string_view>

// Contents of the files under data/, compiled in by cmake/embed_data.cmake.
namespace litrev::bundled {

std::string_view stopwords_english_v1();
std::string_view abbreviations_english_v1();
std::string_view literature_review_system_prompt_v1();

}  // namespace litrev::bundled
