#pragma once

#include "daggp/dag_gp.hpp"

#include <json.hpp>

namespace daggp {

inline constexpr const char* kSnapshotSchema = "daggp.snapshot.v1";

/// Training points, targets, Gram matrix, hyperparameters, seeds and the
/// fitted density. Measures are rebuilt from the density on restore.
nlohmann::json snapshot(const MultiTaskGP& model);

/// Rebuilds the model and checks the stored Gram matrix bit for bit.
/// Throws ArgumentError on schema or Gram mismatch.
MultiTaskGP restore(const nlohmann::json& snap, const CausalGraph& graph);

} // namespace daggp
