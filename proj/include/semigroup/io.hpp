// io.hpp — JSON artifacts (model, bundle, state, counting query) and CSV helpers.
// Matrices are nested arrays of [re, im] pairs, row-major. Layouts are in docs/formats.md.

#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "semigroup/fock.hpp"
#include "semigroup/generator.hpp"
#include "semigroup/unravel.hpp"

namespace semigroup {

using Json = nlohmann::json;

Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j, const std::string& path);
Json vector_to_json(const Vector& v);
Vector vector_from_json(const Json& j, const std::string& path);

struct ModelSpec {
    SystemModel model;
    std::optional<double> beta;
    std::optional<Matrix> rho_m;

    // Gibbs state when beta is given, otherwise the explicit rho_m.
    BathState bath() const;
};

// coupling_scale, when present, multiplies every B_fg.
ModelSpec parse_model(const Json& j);
Json model_to_json(const SystemModel& model, std::optional<double> beta, const std::optional<Matrix>& rho_m = {});

GeneratorBundle parse_bundle(const Json& j);
Json bundle_to_json(const GeneratorBundle& bundle);

struct StateSpec {
    Matrix rho;
    std::optional<Vector> ket;
};

// {"ket": [...]} or {"rho": [[...]]}; validated as a MicroState.
StateSpec parse_state(const Json& j);
Json state_to_json(const Matrix& rho);

// sigma may be "all" or a list of channel indices.
CountingQuery parse_count_query(const Json& j, std::size_t n_channels);

// Parse failures become SchemaError with path "$".
Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// Round-trip decimal rendering (%.17g).
std::string format_double(double x);

} // namespace semigroup
