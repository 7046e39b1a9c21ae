#pragma once

#include <string>
#include <unordered_set>

namespace trialrank {

// Fixed, versioned English stop-word list (318 words).
const std::unordered_set<std::string>& english_stopwords();

// Identifier recorded in artifact metadata so runs are comparable.
const char* stopword_list_version();

}  // namespace trialrank
