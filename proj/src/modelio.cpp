#include "hermlab/modelio.hpp"

#include <fstream>
#include <functional>

#include "hermlab/errors.hpp"
#include "hermlab/zoo.hpp"

namespace hermlab::modelio {

namespace {

using liegeom::LieHermitianModel;
using liegeom::Model;
using liegeom::PointwiseFrameModel;
using numlin::Complex;
using numlin::ComplexTensor;
using RealTensor = holsys::RealTensor;

// ---------------------------------------------------------------- dump side

json cx(const Complex& v) { return json::array({v.real(), v.imag()}); }

json tensor3(const ComplexTensor& t) {
    const auto& s = t.shape();
    json out = json::array();
    for (std::size_t i = 0; i < s[0]; ++i) {
        json plane = json::array();
        for (std::size_t j = 0; j < s[1]; ++j) {
            json row = json::array();
            for (std::size_t k = 0; k < s[2]; ++k) row.push_back(cx(t(i, j, k)));
            plane.push_back(std::move(row));
        }
        out.push_back(std::move(plane));
    }
    return out;
}

json real_matrix(const Eigen::MatrixXd& m) {
    json out = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        out.push_back(std::move(row));
    }
    return out;
}

json real_tensor(const RealTensor& t) {
    // recursive build over the (row-major) index tuple
    const auto& shape = t.shape();
    std::size_t flat = 0;
    std::function<json(std::size_t)> build = [&](std::size_t axis) -> json {
        json arr = json::array();
        if (axis + 1 == shape.size()) {
            for (std::size_t i = 0; i < shape[axis]; ++i) arr.push_back(t.data()[flat++]);
        } else {
            for (std::size_t i = 0; i < shape[axis]; ++i) arr.push_back(build(axis + 1));
        }
        return arr;
    };
    return shape.empty() ? json::array() : build(0);
}

// ---------------------------------------------------------------- load side

[[noreturn]] void malformed(const std::string& what) { throw Error("ParseError", what); }

const json& need(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) malformed(std::string("missing key '") + key + "'");
    return j.at(key);
}

int need_int(const json& j, const char* key) {
    const json& v = need(j, key);
    if (!v.is_number_integer()) malformed(std::string("key '") + key + "' must be an integer");
    return v.get<int>();
}

double as_double(const json& v, const char* where) {
    if (!v.is_number()) malformed(std::string(where) + " must be a number");
    return v.get<double>();
}

Complex as_cx(const json& v, const char* where) {
    if (!v.is_array() || v.size() != 2)
        malformed(std::string(where) + " must be a [re, im] pair");
    return {as_double(v[0], where), as_double(v[1], where)};
}

const json& need_array(const json& v, std::size_t len, const char* where) {
    if (!v.is_array() || v.size() != len)
        malformed(std::string(where) + " must be an array of length " + std::to_string(len));
    return v;
}

ComplexTensor as_tensor3(const json& v, int n, const char* where) {
    ComplexTensor t({static_cast<std::size_t>(n), static_cast<std::size_t>(n),
                     static_cast<std::size_t>(n)});
    need_array(v, static_cast<std::size_t>(n), where);
    for (int i = 0; i < n; ++i) {
        need_array(v[i], static_cast<std::size_t>(n), where);
        for (int j = 0; j < n; ++j) {
            need_array(v[i][j], static_cast<std::size_t>(n), where);
            for (int k = 0; k < n; ++k)
                t(static_cast<std::size_t>(i), static_cast<std::size_t>(j),
                  static_cast<std::size_t>(k)) = as_cx(v[i][j][k], where);
        }
    }
    return t;
}

Eigen::MatrixXd as_real_matrix(const json& v, int rows, int cols, const char* where) {
    Eigen::MatrixXd m(rows, cols);
    need_array(v, static_cast<std::size_t>(rows), where);
    for (int r = 0; r < rows; ++r) {
        need_array(v[r], static_cast<std::size_t>(cols), where);
        for (int c = 0; c < cols; ++c) m(r, c) = as_double(v[r][c], where);
    }
    return m;
}

RealTensor as_real_tensor(const json& v, const std::vector<std::size_t>& shape,
                          const char* where) {
    RealTensor t(shape);
    std::size_t flat = 0;
    std::function<void(const json&, std::size_t)> walk = [&](const json& node,
                                                             std::size_t axis) {
        need_array(node, shape[axis], where);
        if (axis + 1 == shape.size()) {
            for (std::size_t i = 0; i < shape[axis]; ++i)
                t.data()[flat++] = as_double(node[i], where);
        } else {
            for (std::size_t i = 0; i < shape[axis]; ++i) walk(node[i], axis + 1);
        }
    };
    walk(v, 0);
    return t;
}

std::string metadata_label(const json& j) {
    if (j.contains("metadata") && j.at("metadata").is_object() &&
        j.at("metadata").contains("label") && j.at("metadata").at("label").is_string())
        return j.at("metadata").at("label").get<std::string>();
    return {};
}

}  // namespace

json dump(const liegeom::Model& model) {
    json j;
    j["version"] = 1;
    if (const auto* lie = std::get_if<LieHermitianModel>(&model)) {
        j["kind"] = "lie";
        j["n"] = lie->n;
        j["C"] = tensor3(lie->C);
        j["D"] = tensor3(lie->D);
        j["metadata"] = {{"label", lie->label}};
        return j;
    }
    const auto& pw = std::get<PointwiseFrameModel>(model);
    const auto paren = pw.label.find('(');
    const std::string family = pw.label.substr(0, paren);
    if (family != "hopf")
        throw Error("InvalidModel",
                    "only named frame families serialize; unknown family in label '" +
                        pw.label + "'");
    j["kind"] = "pointwise";
    j["family"] = family;
    j["n"] = pw.n;
    json z = json::array();
    for (Eigen::Index i = 0; i < pw.z.size(); ++i) z.push_back(cx(pw.z(i)));
    j["parameters"] = {{"z", std::move(z)}};
    j["metadata"] = {{"label", pw.label}};
    return j;
}

json dump(const holsys::HolonomySystem& sys) {
    json j;
    j["version"] = 1;
    j["kind"] = "holonomy-system";
    j["n"] = sys.dim;
    j["H"] = real_matrix(sys.H);
    j["Rm"] = real_tensor(sys.Rm);
    if (sys.T) j["T"] = real_tensor(*sys.T);
    json basis = json::array();
    for (const auto& g : sys.g_basis) basis.push_back(real_matrix(g));
    j["g_basis"] = std::move(basis);
    if (sys.J) j["J"] = real_matrix(*sys.J);
    j["metadata"] = {{"label", sys.label}};
    return j;
}

json dump(const Object& obj) {
    if (const auto* model = std::get_if<liegeom::Model>(&obj)) return dump(*model);
    return dump(std::get<holsys::HolonomySystem>(obj));
}

Object load(const json& j) {
    if (!j.is_object()) malformed("top level must be a JSON object");
    if (need_int(j, "version") != 1) malformed("unsupported version (expected 1)");
    const json& kind_v = need(j, "kind");
    if (!kind_v.is_string()) malformed("key 'kind' must be a string");
    const std::string kind = kind_v.get<std::string>();
    const int n = need_int(j, "n");
    if (n <= 0) malformed("n must be positive");

    if (kind == "lie") {
        LieHermitianModel lie;
        lie.n = n;
        lie.C = as_tensor3(need(j, "C"), n, "C");
        lie.D = as_tensor3(need(j, "D"), n, "D");
        lie.label = metadata_label(j);
        return Model(std::move(lie));
    }
    if (kind == "pointwise") {
        const json& fam_v = need(j, "family");
        if (!fam_v.is_string()) malformed("key 'family' must be a string");
        const std::string family = fam_v.get<std::string>();
        if (family != "hopf") malformed("unsupported frame family '" + family + "'");
        const json& params = need(j, "parameters");
        const json& zj = need_array(need(params, "z"), static_cast<std::size_t>(n), "z");
        Eigen::VectorXcd z(n);
        for (int i = 0; i < n; ++i) z(i) = as_cx(zj[i], "z");
        return Model(zoo::hopf(n, z));
    }
    if (kind == "holonomy-system") {
        holsys::HolonomySystem sys;
        sys.dim = n;
        const auto un = static_cast<std::size_t>(n);
        sys.H = as_real_matrix(need(j, "H"), n, n, "H");
        sys.Rm = as_real_tensor(need(j, "Rm"), {un, un, un, un}, "Rm");
        if (j.contains("T")) sys.T = as_real_tensor(j.at("T"), {un, un, un}, "T");
        const json& basis = need(j, "g_basis");
        if (!basis.is_array()) malformed("key 'g_basis' must be an array");
        for (const auto& g : basis) sys.g_basis.push_back(as_real_matrix(g, n, n, "g_basis"));
        if (j.contains("J")) sys.J = as_real_matrix(j.at("J"), n, n, "J");
        sys.label = metadata_label(j);
        return sys;
    }
    malformed("unknown kind '" + kind + "'");
}

Object load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("ParseError", "cannot open '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error("ParseError", std::string("invalid JSON: ") + e.what());
    }
    return load(j);
}

void save_file(const Object& obj, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("ParseError", "cannot open '" + path + "' for writing");
    out << dump(obj).dump(2) << '\n';
}

}  // namespace hermlab::modelio
