// JSON forms of claim reports and game traces.

#pragma once

#include <json.hpp>

#include "krk/verify.hpp"

namespace krk {

nlohmann::json to_json(const Position& pos);
nlohmann::json to_json(const Move& mv);
nlohmann::json to_json(const GameTrace& trace);

// {claim_id, m, n, expected, observed, pass, hard, details, trace?}.
// `expected` is an integer for exact claims and a ">= k" string for bounds;
// `observed` is null when the line is drawn.
nlohmann::json to_json(const ClaimReport& report);
nlohmann::json to_json(const std::vector<ClaimReport>& reports);
nlohmann::json summary_json(const SuiteSummary& summary);

}  // namespace krk
