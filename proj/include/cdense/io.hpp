#pragma once

#include <string>

#include "json.hpp"

#include "cdense/corpus.hpp"
#include "cdense/densify.hpp"
#include "cdense/types.hpp"

namespace cdense::io {

using json = nlohmann::ordered_json;

/// Throws InputError on a missing or unparsable file.
json read_json(const std::string& path);
void write_text(const std::string& path, const std::string& text);

Rational rational_from_json(const json& j);
json rational_to_json(const Rational& r);

Signature signature_from_json(const json& j);
json signature_to_json(const Signature& sig);

/// Tables must be total and the metric fully listed (either orientation).
ContinuousStructure structure_from_json(const json& j);
json structure_to_json(const ContinuousStructure& M);

/// Extensional; every threshold bit must be listed.
DiscreteStructure discrete_from_json(const json& j);
json discrete_to_json(const DiscreteStructure& D);

json fragment_to_json(const Fragment& frag);
Fragment fragment_from_json(const json& j, const Signature& sig);

LevelFamily level_family_from_json(const json& j);
json level_family_to_json(const LevelFamily& fam);

ContinuousTypeFragment type_fragment_from_json(const json& j, const Signature& sig);
json type_fragment_to_json(const ContinuousTypeFragment& r);
SequenceType sequence_type_from_json(const json& j, const Signature& sig);
json sequence_type_to_json(const SequenceType& st);

json verdict_to_json(const SchemeVerdict& v);
json violation_to_json(const Violation& v);

}  // namespace cdense::io
