#pragma once

#include <string_view>

namespace taeblp {

/// Project version with a git-describe suffix when built from a checkout.
std::string_view version() noexcept;

}  // namespace taeblp
