#pragma once

#include <string>

#include <json.hpp>

#include "asyncmed/cheaptalk.hpp"
#include "asyncmed/relations.hpp"

namespace asyncmed {

using Json = nlohmann::json;

std::string rational_text(const Rational& r);

Json to_json(const Caps& c);
Json to_json(const Witness& w);
Json to_json(const Verdict& v);
Json to_json(const PunishmentResult& r);
Json to_json(const RelationVerdict& v);
Json to_json(const CoterminationVerdict& v);
Json to_json(const OutcomeDistribution& d);
Json to_json(const CheapTalkProfile& ct);

// Keys sorted, two-space indent, trailing newline.
std::string render(const Json& j);

// One line per top-level key for a quick read.
std::string summary(const Json& j);

}  // namespace asyncmed
