#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "etl/averaging.hpp"
#include "etl/density.hpp"
#include "etl/dynamics.hpp"
#include "etl/transfer.hpp"

namespace etl::config {

using json = nlohmann::json;

/// Malformed or inconsistent configuration (exit code 3).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The experiment config schema (JSON Schema subset).
const json& schema();

/// Checks `doc` against the schema subset: type, enum, required, properties,
/// additionalProperties, items, minItems, minimum, exclusiveMinimum and $ref.
/// Returns one message per violation.
std::vector<std::string> validate(const json& doc, const json& schema);

// Field readers. Missing optional fields are written back with their default
// so the object ends up holding every value actually used.
json& section(json& o, const char* key);
double number(json& o, const char* key, double def);
double number(json& o, const char* key);
std::int64_t integer(json& o, const char* key, std::int64_t def);
bool flag(json& o, const char* key, bool def);
std::string text(json& o, const char* key, const std::string& def);
std::string text(json& o, const char* key);
Vec numbers(json& o, const char* key, const Vec& def);
Vec numbers(json& o, const char* key);

Poly poly_from(json& j);
Gp gp_from(json& j);
DensitySet set_from(json& j);
PhaseFlow flow_from(json& j);
Observable observable_from(json& j);
VectorValue value_from(json& j, const NormSpec& norm = NormSpec::l2());

/// Builds a sampler from its declarative spec.
FnSampler sampler_from(json& j);
/// Orbit kinds only: torus_orbit, heisenberg_orbit.
Orbit orbit_from(json& j);
SeqSampler sequence_from(json& j);

ScaleSchedule schedule_from(json& j, std::size_t dim, std::uint64_t seed);
Scheme scheme_from(json& j, std::size_t dim);
QuadSpec quad_from(json& j, std::size_t dim);
TSampling tsampling_from(json& j, std::uint64_t seed);
FolnerSequence folner_from(json& j, std::size_t dim);

}  // namespace etl::config
