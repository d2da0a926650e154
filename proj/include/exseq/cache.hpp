#pragma once

#include <string>
#include <vector>

#include "exseq/linalg.hpp"

namespace exseq {

// On-disk matrix cache under $EXSEQ_CACHE_DIR. Disabled when the variable is unset.
// Entries carry a version stamp; stale or unreadable entries count as misses.
inline constexpr unsigned cache_version = 3;

bool cache_enabled();
bool cache_load(const std::string& key, std::vector<Mat>& out);
void cache_store(const std::string& key, const std::vector<Mat>& mats);
// key fragment identifying a cell by its vertex coordinates
std::string cell_key(const Mat& vertices);

}  // namespace exseq
