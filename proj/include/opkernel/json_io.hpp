#pragma once

#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "opkernel/cp_map.hpp"
#include "opkernel/kernels.hpp"

namespace opk::json_io {

using Json = nlohmann::json;

/// Interchange convention: a complex number is [re, im]; a matrix is a flat
/// row-major list of such pairs whose shape comes from sibling fields.

Json to_json(Complex z);
Json to_json(const CMatrix& m);
Json to_json(const CVector& v);
Json to_json(const RVector& v);

Complex complex_from(const Json& j, std::string_view what);
CMatrix matrix_from(const Json& j, Index rows, Index cols, std::string_view what);
CVector vector_from(const Json& j, std::string_view what);

/// Throws SchemaError when `obj` is not an object or carries keys outside `allowed`.
void require_keys(const Json& obj, std::initializer_list<std::string_view> allowed, std::string_view what);

const Json& field(const Json& obj, std::string_view key, std::string_view what);
double number_field(const Json& obj, std::string_view key, std::string_view what);
Index integer_field(const Json& obj, std::string_view key, std::string_view what);

/// {"d", "h", "choi"}.
CpMap cp_map_from(const Json& j);
Json to_json(const CpMap& psi);

/// {"type": "separable" | "explicit_factor" | "cp_induced", ...}.
OperatorKernelSpec kernel_from(const Json& j);

/// List of coordinate arrays.
std::vector<SamplePoint> points_from(const Json& j);

}  // namespace opk::json_io
