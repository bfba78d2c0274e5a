#pragma once

// JSON mappings for configuration and audit documents.

#include <json.hpp>

#include "diarkit/script.hpp"

namespace diarkit {

void to_json(nlohmann::json& j, const VoiceSpec& v);
void from_json(const nlohmann::json& j, VoiceSpec& v);

void to_json(nlohmann::json& j, const Range& r);
void from_json(const nlohmann::json& j, Range& r);

// Missing keys keep the value already present in the target, so a partial
// document can be layered on top of ScriptConfig::defaults().
void to_json(nlohmann::json& j, const ScriptConfig& c);
void from_json(const nlohmann::json& j, ScriptConfig& c);

void to_json(nlohmann::json& j, const ConversationScript& s);
void from_json(const nlohmann::json& j, ConversationScript& s);

}  // namespace diarkit
