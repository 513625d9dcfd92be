#pragma once

// JSON adapters for the result records the CLI exposes. Every emitted
// document carries schema_version for downstream consumers.

#include <json.hpp>

#include "constell/box_norm.hpp"
#include "constell/constellations.hpp"
#include "constell/estimator.hpp"
#include "constell/lfc.hpp"
#include "constell/regularity.hpp"
#include "constell/simplex_forms.hpp"

namespace constell {

inline constexpr int kSchemaVersion = 1;

inline void to_json(nlohmann::json& j, const EstimatorResult& r) {
    j = {{"value", r.value},
         {"mode", r.mode},
         {"samples", r.samples},
         {"std_error", r.std_error},
         {"seed", r.seed}};
}

inline void to_json(nlohmann::json& j, const CountReport& r) {
    j = {{"n", r.n_cap},
         {"total_pairs", r.total_pairs},
         {"trivial_pairs", r.trivial_pairs},
         {"l_value", r.l_value},
         {"predicted_scale", r.predicted_scale},
         {"ratio", r.ratio},
         {"t_min", r.t_min},
         {"t_max", r.t_max},
         {"complete", r.complete}};
}

inline void to_json(nlohmann::json& j, const LfcCell& c) {
    j = {{"n", c.n},
         {"omega", c.omega},
         {"m", c.m},
         {"t", c.t},
         {"estimate", c.estimate},
         {"std_error", c.std_error},
         {"abs_dev", c.abs_dev},
         {"mode", c.mode}};
}

inline void to_json(nlohmann::json& j, const LinearForm& f) {
    j = {{"coefficients", f.c}, {"axis", f.axis}, {"support", f.supp}, {"edge", f.edge}};
}

inline void to_json(nlohmann::json& j, const BoxNormResult& r) {
    j = {{"raw_power", r.raw_power},
         {"norm", r.norm},
         {"clamped", r.clamped},
         {"estimator", r.estimator}};
}

inline void to_json(nlohmann::json& j, const KvnRecord& r) {
    j = {{"iter", r.iter},
         {"residual", r.residual},
         {"energy", r.energy_base},
         {"complexity", r.complexity},
         {"stepped", r.stepped},
         {"accepted", r.accepted},
         {"q", r.q},
         {"gamma", r.gamma},
         {"increment", r.increment}};
}

inline nlohmann::json with_schema(nlohmann::json j) {
    j["schema_version"] = kSchemaVersion;
    return j;
}

}  // namespace constell
