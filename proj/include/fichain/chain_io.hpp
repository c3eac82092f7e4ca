#pragma once

#include <cstddef>
#include <string>

#include <json.hpp>

#include "fichain/chain.hpp"
#include "fichain/models.hpp"

namespace fichain {

using Json = nlohmann::ordered_json;

/// Explicit chain description:
/// {"type":"explicit","states":[...],"rates":[[...]],"pi":[...]}
/// Rates are row-major; diagonal entries are ignored. "pi" is optional on
/// input and always present on output.
Json chain_to_json(const ReversibleChain& chain);
ReversibleChain chain_from_json(const Json& j);

/// Dispatches on "type": explicit | graph_walk | lamplighter | zrp | trivial.
/// Model specs:
///   {"type":"graph_walk","graph":"torus:4:2"}
///   {"type":"lamplighter","graph":"cycle:5"}
///   {"type":"zrp","n":3,"m":3,"G":"mean_field",
///    "rates":{"kind":"linear","slope":1.0}}
///   {"type":"trivial","pi":[0.2,0.8]}
/// A zrp "G" may also be an explicit matrix, and "rates" a per-site table
/// {"kind":"table","values":[[...]],"delta":d,"Delta":D}.
ReversibleChain chain_from_spec(const Json& j,
                                std::size_t state_cap = kDefaultStateCap);

Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

}  // namespace fichain
