#pragma once

#include "regime_riccati/care.hpp"
#include "regime_riccati/model.hpp"
#include "regime_riccati/sim.hpp"
#include "regime_riccati/stability.hpp"
#include "regime_riccati/synthesis.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>

namespace regime_riccati {

using Json = nlohmann::json;

Json to_json(const Matrix& m);
/// Accepts an array of rows, or a flat array read as a column vector.
/// Empty arrays take the expected shape when one is given.
Matrix matrix_from_json(const Json& j, Index rows = -1, Index cols = -1);

Json to_json(const RegimeFamily& f);
RegimeFamily family_from_json(const Json& j, Index rows = -1, Index cols = -1);

/// Model document; cost2 absent means zero-sum. Throws Parse on malformed documents.
GameModel model_from_json(const Json& j);
Json model_to_json(const GameModel& model);

Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& j);
/// Throws Io when unreadable, Parse when malformed.
GameModel load_model(const std::filesystem::path& path);

Json to_json(const ValidationReport& r);
Json to_json(const ResidualReport& r);
Json to_json(const NonSymCareSolution& s);
Json to_json(const SymCareSolution& s);
Json to_json(const ZeroSumCareSolution& s);
Json to_json(const StrategyPair& s);
Json to_json(const EtaSolution& e);
Json to_json(const Decoupling& d);
Json to_json(const StabilityVerdict& v);
Json to_json(const StabilizerVerdict& v);
Json to_json(const ConvexityConcavity& c);
Json to_json(const SimReport& r);

StrategyPair strategy_from_json(const Json& j);
Decoupling decoupling_from_json(const Json& j);

}  // namespace regime_riccati
