#pragma once

// Declarative strategy documents: states, prompts, grammars and transitions
// as JSON, so strategies can be edited without recompiling.

#include <filesystem>

#include <nlohmann/json.hpp>

#include "elvis/dialog.hpp"

namespace elvis {

inline constexpr const char* kStrategySchema = "elvis-strategy/1";

nlohmann::json machine_to_json(const StrategyMachine& machine);

/// Throws ConfigError (with a JSON path) for malformed documents and
/// MachineDefinitionError for documents that violate machine invariants.
StrategyMachine machine_from_json(const nlohmann::json& doc);

StrategyMachine load_machine(const std::filesystem::path& path);
void save_machine(const StrategyMachine& machine, const std::filesystem::path& path);

}  // namespace elvis
