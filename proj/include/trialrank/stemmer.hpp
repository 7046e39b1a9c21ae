#pragma once

#include <string>

namespace trialrank {

// Porter's suffix-stripping algorithm (the original 1980 variant).
// Input is expected to be lowercase ASCII; other bytes pass through
// untouched. Words of length <= 2 are returned unchanged.
std::string porter_stem(const std::string& word);

}  // namespace trialrank
