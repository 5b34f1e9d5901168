#pragma once

#include <json.hpp>
#include <string>
#include <variant>

#include "hermlab/holsys.hpp"
#include "hermlab/liegeom.hpp"

namespace hermlab::modelio {

using Object = std::variant<liegeom::Model, holsys::HolonomySystem>;
using json = nlohmann::ordered_json;

/// Versioned JSON container (version 1).  Complex entries are explicit
/// [re, im] pairs and nested arrays follow tensor index order, so files are
/// language-neutral and diff-friendly.  Frame-function models are stored by
/// family name and base point rather than as closures; only named families
/// serialize (throws Error("InvalidModel") otherwise).
[[nodiscard]] json dump(const Object& obj);
[[nodiscard]] json dump(const liegeom::Model& model);
[[nodiscard]] json dump(const holsys::HolonomySystem& sys);

/// Inverse of dump.  Throws Error("ParseError") on structural problems:
/// wrong version, unknown kind, missing or mistyped keys, inconsistent
/// dimensions.  Numeric payloads round-trip bit-for-bit.
[[nodiscard]] Object load(const json& j);

/// Read and parse a file; throws Error("ParseError") when the file cannot
/// be opened or is not valid JSON.
[[nodiscard]] Object load_file(const std::string& path);

/// Write dump(obj) with two-space indentation and a trailing newline.
void save_file(const Object& obj, const std::string& path);

}  // namespace hermlab::modelio
