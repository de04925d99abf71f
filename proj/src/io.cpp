// io.cpp — JSON schemas and file helpers

#include "semigroup/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "semigroup/errors.hpp"

namespace semigroup {

namespace {

const Json& require(const Json& j, const std::string& key, const std::string& path)
{
    if (!j.is_object()) throw SchemaError(path, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) throw SchemaError(path + "." + key, "required field is missing");
    return *it;
}

double number(const Json& j, const std::string& path)
{
    if (!j.is_number()) throw SchemaError(path, "expected a number");
    return j.get<double>();
}

std::int64_t integer(const Json& j, const std::string& path)
{
    if (!j.is_number_integer()) throw SchemaError(path, "expected an integer");
    return j.get<std::int64_t>();
}

cplx complex_entry(const Json& j, const std::string& path)
{
    if (!j.is_array() || j.size() != 2) throw SchemaError(path, "expected a [re, im] pair");
    return {number(j[0], path + "[0]"), number(j[1], path + "[1]")};
}

std::string at(const std::string& path, std::size_t i)
{
    return path + "[" + std::to_string(i) + "]";
}

} // namespace

Json matrix_to_json(const Matrix& m)
{
    Json rows = Json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const Json& j, const std::string& path)
{
    if (!j.is_array() || j.empty()) throw SchemaError(path, "expected a nonempty array of rows");
    const auto rows = static_cast<Index>(j.size());
    if (!j[0].is_array() || j[0].empty()) throw SchemaError(at(path, 0), "expected a nonempty row");
    const auto cols = static_cast<Index>(j[0].size());
    Matrix m(rows, cols);
    for (Index r = 0; r < rows; ++r) {
        const Json& row = j[static_cast<std::size_t>(r)];
        const std::string rp = at(path, static_cast<std::size_t>(r));
        if (!row.is_array() || static_cast<Index>(row.size()) != cols) throw SchemaError(rp, "ragged matrix row");
        for (Index c = 0; c < cols; ++c) {
            m(r, c) = complex_entry(row[static_cast<std::size_t>(c)], at(rp, static_cast<std::size_t>(c)));
        }
    }
    return m;
}

Json vector_to_json(const Vector& v)
{
    Json out = Json::array();
    for (Index i = 0; i < v.size(); ++i) out.push_back({v(i).real(), v(i).imag()});
    return out;
}

Vector vector_from_json(const Json& j, const std::string& path)
{
    if (!j.is_array() || j.empty()) throw SchemaError(path, "expected a nonempty array of [re, im] pairs");
    Vector v(static_cast<Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Index>(i)) = complex_entry(j[i], at(path, i));
    return v;
}

BathState ModelSpec::bath() const
{
    if (beta) return BathState::gibbs(model, *beta);
    return BathState::from_density(model, *rho_m);
}

ModelSpec parse_model(const Json& j)
{
    const std::string root = "$";
    if (!j.is_object()) throw SchemaError(root, "model must be an object");
    const std::int64_t d_s = integer(require(j, "d_s", root), "$.d_s");
    if (d_s <= 0) throw SchemaError("$.d_s", "must be positive");
    const Json& ej = require(j, "micro_energies", root);
    if (!ej.is_array() || static_cast<std::int64_t>(ej.size()) != d_s) {
        throw SchemaError("$.micro_energies", "expected d_s numbers");
    }
    std::vector<double> energies;
    for (std::size_t i = 0; i < ej.size(); ++i) energies.push_back(number(ej[i], at("$.micro_energies", i)));
    const Matrix h_m = matrix_from_json(require(j, "h_m", root), "$.h_m");
    if (h_m.rows() != h_m.cols()) throw SchemaError("$.h_m", "must be square");

    double scale = 1.0;
    if (j.contains("coupling_scale")) scale = number(j["coupling_scale"], "$.coupling_scale");
    std::vector<CouplingTerm> terms;
    const Json& tj = require(j, "coupling_terms", root);
    if (!tj.is_array()) throw SchemaError("$.coupling_terms", "expected an array");
    for (std::size_t i = 0; i < tj.size(); ++i) {
        const std::string tp = at("$.coupling_terms", i);
        CouplingTerm t;
        t.f = integer(require(tj[i], "f", tp), tp + ".f");
        t.g = integer(require(tj[i], "g", tp), tp + ".g");
        if (t.f < 0 || t.f >= d_s) throw SchemaError(tp + ".f", "mode index out of range");
        if (t.g < 0 || t.g >= d_s) throw SchemaError(tp + ".g", "mode index out of range");
        t.b = scale * matrix_from_json(require(tj[i], "b", tp), tp + ".b");
        if (t.b.rows() != h_m.rows() || t.b.cols() != h_m.cols()) throw SchemaError(tp + ".b", "must be d_b x d_b");
        terms.push_back(std::move(t));
    }

    ModelSpec spec{SystemModel(std::move(energies), h_m, std::move(terms)), std::nullopt, std::nullopt};
    const bool has_beta = j.contains("beta") && !j["beta"].is_null();
    const bool has_rho = j.contains("rho_m") && !j["rho_m"].is_null();
    if (has_beta == has_rho) throw SchemaError("$", "exactly one of 'beta' and 'rho_m' must be given");
    if (has_beta) spec.beta = number(j["beta"], "$.beta");
    if (has_rho) {
        spec.rho_m = matrix_from_json(j["rho_m"], "$.rho_m");
        if (spec.rho_m->rows() != h_m.rows() || spec.rho_m->cols() != h_m.cols()) {
            throw SchemaError("$.rho_m", "must be d_b x d_b");
        }
    }
    return spec;
}

Json model_to_json(const SystemModel& model, std::optional<double> beta, const std::optional<Matrix>& rho_m)
{
    Json j;
    j["d_s"] = model.d_s();
    j["micro_energies"] = model.micro_energies();
    j["h_m"] = matrix_to_json(model.h_m());
    Json terms = Json::array();
    for (const auto& t : model.coupling_terms()) terms.push_back({{"f", t.f}, {"g", t.g}, {"b", matrix_to_json(t.b)}});
    j["coupling_terms"] = terms;
    if (beta) j["beta"] = *beta;
    if (rho_m) j["rho_m"] = matrix_to_json(*rho_m);
    return j;
}

GeneratorBundle parse_bundle(const Json& j)
{
    const std::string root = "$";
    if (!j.is_object()) throw SchemaError(root, "bundle must be an object");
    GeneratorBundle b;
    const std::int64_t dim = integer(require(j, "dim", root), "$.dim");
    const Json& mj = require(j, "mode", root);
    if (!mj.is_string()) throw SchemaError("$.mode", "expected a string");
    try {
        b.mode = parse_mode(mj.get<std::string>());
    } catch (const DomainError& e) {
        throw SchemaError("$.mode", e.what());
    }
    if (j.contains("eta") && !j["eta"].is_null()) b.eta = number(j["eta"], "$.eta");
    b.h = matrix_from_json(require(j, "h", root), "$.h");
    b.loss = matrix_from_json(require(j, "loss", root), "$.loss");
    if (j.contains("q") && !j["q"].is_null()) b.q = matrix_from_json(j["q"], "$.q");
    if (b.h.rows() != dim) throw SchemaError("$.h", "dimension differs from $.dim");
    const Json& cj = require(j, "channels", root);
    if (!cj.is_array()) throw SchemaError("$.channels", "expected an array");
    for (std::size_t i = 0; i < cj.size(); ++i) {
        const std::string cp = at("$.channels", i);
        Channel c;
        c.weight = number(require(cj[i], "weight", cp), cp + ".weight");
        c.lambda = integer(require(cj[i], "lambda", cp), cp + ".lambda");
        c.xi = integer(require(cj[i], "xi", cp), cp + ".xi");
        c.op = matrix_from_json(require(cj[i], "op", cp), cp + ".op");
        b.channels.push_back(std::move(c));
    }
    try {
        b.validate();
    } catch (const InputError& e) {
        throw SchemaError("$", e.what());
    }
    return b;
}

Json bundle_to_json(const GeneratorBundle& bundle)
{
    Json j;
    j["format"] = "semigroup-lab.bundle";
    j["version"] = 1;
    j["dim"] = bundle.dim();
    j["mode"] = to_string(bundle.mode);
    j["eta"] = bundle.eta;
    j["h"] = matrix_to_json(bundle.h);
    j["loss"] = matrix_to_json(bundle.loss);
    j["q"] = bundle.q.size() == 0 ? Json(nullptr) : matrix_to_json(bundle.q);
    Json ch = Json::array();
    for (const auto& c : bundle.channels) {
        ch.push_back({{"weight", c.weight}, {"lambda", c.lambda}, {"xi", c.xi}, {"op", matrix_to_json(c.op)}});
    }
    j["channels"] = ch;
    return j;
}

StateSpec parse_state(const Json& j)
{
    if (!j.is_object()) throw SchemaError("$", "state must be an object");
    const bool has_ket = j.contains("ket");
    const bool has_rho = j.contains("rho");
    if (has_ket == has_rho) throw SchemaError("$", "exactly one of 'ket' and 'rho' must be given");
    StateSpec out;
    try {
        if (has_ket) {
            out.ket = vector_from_json(j["ket"], "$.ket");
            if (std::abs(out.ket->norm() - 1.0) > 1e-10) throw SchemaError("$.ket", "ket must be normalized");
            out.rho = MicroState::from_ket(*out.ket).rho;
        } else {
            out.rho = MicroState::from_matrix(matrix_from_json(j["rho"], "$.rho")).rho;
        }
    } catch (const SchemaError&) {
        throw;
    } catch (const InputError& e) {
        throw SchemaError(has_ket ? "$.ket" : "$.rho", e.what());
    }
    return out;
}

Json state_to_json(const Matrix& rho)
{
    return Json{{"rho", matrix_to_json(rho)}};
}

CountingQuery parse_count_query(const Json& j, std::size_t n_channels)
{
    const std::string root = "$";
    CountingQuery q;
    q.t1 = number(require(j, "t1", root), "$.t1");
    q.t2 = number(require(j, "t2", root), "$.t2");
    q.n_events = static_cast<int>(integer(require(j, "n_events", root), "$.n_events"));
    if (j.contains("n_max")) q.n_max = static_cast<int>(integer(j["n_max"], "$.n_max"));
    const Json& sj = require(j, "sigma", root);
    if (sj.is_string()) {
        if (sj.get<std::string>() != "all") throw SchemaError("$.sigma", "expected \"all\" or a list of indices");
        for (std::size_t c = 0; c < n_channels; ++c) q.sigma.push_back(c);
    } else if (sj.is_array()) {
        for (std::size_t i = 0; i < sj.size(); ++i) {
            const std::int64_t c = integer(sj[i], at("$.sigma", i));
            if (c < 0 || static_cast<std::size_t>(c) >= n_channels) {
                throw SchemaError(at("$.sigma", i), "channel index out of range");
            }
            q.sigma.push_back(static_cast<std::size_t>(c));
        }
    } else {
        throw SchemaError("$.sigma", "expected \"all\" or a list of indices");
    }
    if (!(q.t2 > q.t1)) throw SchemaError("$.t2", "must exceed t1");
    if (q.t1 < 0.0) throw SchemaError("$.t1", "must be nonnegative");
    if (q.n_events < 0) throw SchemaError("$.n_events", "must be nonnegative");
    return q;
}

Json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw SchemaError("$", "cannot open '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw SchemaError("$", std::string("malformed JSON in '") + path + "': " + e.what());
    }
}

void write_text_file(const std::string& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DomainError("cannot write '" + path + "'");
    out << content;
    if (!out) throw DomainError("write failed for '" + path + "'");
}

std::string format_double(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

} // namespace semigroup
