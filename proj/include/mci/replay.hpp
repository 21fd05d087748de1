#pragma once

#include "mci/engine.hpp"

#include <memory>
#include <optional>
#include <vector>

namespace mci {

/// Rebuilds a session by re-applying the commander actions recorded in `log`
/// (assignments, cancellations, suggestion annotations, forced ends) at their
/// timestamps. The engine regenerates everything else. Steps to
/// `final_clock` (default: the last event time). Throws Error(MalformedLog)
/// when the log cannot be reproduced.
SimState replay(std::shared_ptr<const Scenario> scenario, const std::vector<Event>& log,
                std::optional<int> final_clock = std::nullopt);

/// True when replaying reproduces `log` byte for byte.
bool replay_matches(std::shared_ptr<const Scenario> scenario, const std::vector<Event>& log);

}  // namespace mci
