#pragma once

// JSON encodings of systems, elements, quotient maps and certificates.

#include <string>

#include <json.hpp>

#include "xprod/classify.hpp"
#include "xprod/crossed.hpp"
#include "xprod/structure.hpp"

namespace xprod {

using Json = nlohmann::json;

Json to_json(const SampledSystem& system);
/// Throws MalformedInput on missing or mistyped fields.
SampledSystem system_from_json(const Json& j);

Json to_json(const CrossedElement& a);
CrossedElement element_from_json(SpacePtr space, const Json& j);

Json to_json(const QuotientMap& map);
/// Only "forward" is read; the flags are recomputed by the caller.
std::vector<ClassId> quotient_forward_from_json(const Json& j);

Json to_json(const IsoCertificate& cert);

/// Reads and parses a JSON file (MalformedInput on I/O or parse errors).
Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace xprod
