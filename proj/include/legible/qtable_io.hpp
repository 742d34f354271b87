#pragma once

#include "legible/mdp.hpp"

#include <filesystem>
#include <string>

namespace legible {

/// JSON document: header fields (state_count, action_count, fingerprint)
/// plus one array of action values per state. Round-trips finite doubles
/// value-exactly.
std::string qtable_to_json(const QTable& q);
QTable qtable_from_json(const std::string& text);

void save_qtable(const QTable& q, const std::filesystem::path& file);
QTable load_qtable(const std::filesystem::path& file);

} // namespace legible
