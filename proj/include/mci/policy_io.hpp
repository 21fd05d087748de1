// Policy container: magic "MCIPOLv1", u32 little-endian header length, a JSON
// header (kind, caps, hidden width, reward scale, training seed, parameter
// count), then the parameters as little-endian IEEE-754 float32.
#pragma once

#include "mci/policy.hpp"

#include <filesystem>
#include <string>

namespace mci {

std::string serialize_policy(const PolicySpec& spec);
/// Throws Error(PolicyLoad) on a malformed container.
PolicySpec parse_policy(const std::string& bytes);

void save_policy(const PolicySpec& spec, const std::filesystem::path& path);
PolicySpec load_policy(const std::filesystem::path& path);

/// "random", "greedy", or a path to a policy file.
Policy resolve_policy(const std::string& name_or_path);

}  // namespace mci
