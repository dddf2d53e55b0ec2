#pragma once

// JSON emission with a stable field order and floating point written as
// 17-significant-digit decimals (round-trips bit-exactly), complex numbers
// as {"re": ..., "im": ...}.

#include "sclame/numerics.hpp"

#include <nlohmann/json.hpp>

#include <string>

namespace sclame {

using ordered_json = nlohmann::ordered_json;

ordered_json json_complex(cplx v);

// Serializer enforcing the wire contract for doubles.
std::string dump_report(const ordered_json& doc, int indent = 2);

void write_report_file(const ordered_json& doc, const std::string& path);

} // namespace sclame
