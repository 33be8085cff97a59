#include "opkernel/json_io.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "opkernel/cpmaps.hpp"
#include "opkernel/errors.hpp"

namespace opk::json_io {

namespace {

std::string str(std::string_view s) { return std::string(s); }

}  // namespace

Json to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Json to_json(const CMatrix& m) {
  Json out = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) out.push_back(to_json(m(i, j)));
  }
  return out;
}

Json to_json(const CVector& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(to_json(v(i)));
  return out;
}

Json to_json(const RVector& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Complex complex_from(const Json& j, std::string_view what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw SchemaError(str(what) + ": complex numbers are [re, im] pairs");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

CMatrix matrix_from(const Json& j, Index rows, Index cols, std::string_view what) {
  if (!j.is_array() || static_cast<Index>(j.size()) != rows * cols) {
    throw SchemaError(str(what) + ": expected " + std::to_string(rows * cols) + " [re, im] entries (" +
                      std::to_string(rows) + "x" + std::to_string(cols) + " row-major)");
  }
  CMatrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index k = 0; k < cols; ++k) m(i, k) = complex_from(j[static_cast<std::size_t>(i * cols + k)], what);
  }
  return m;
}

CVector vector_from(const Json& j, std::string_view what) {
  if (!j.is_array()) throw SchemaError(str(what) + ": expected a list of [re, im] pairs");
  CVector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Index>(i)) = complex_from(j[i], what);
  return v;
}

void require_keys(const Json& obj, std::initializer_list<std::string_view> allowed, std::string_view what) {
  if (!obj.is_object()) throw SchemaError(str(what) + ": expected an object");
  for (const auto& item : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
      throw SchemaError(str(what) + ": unknown field '" + item.key() + "'");
    }
  }
}

const Json& field(const Json& obj, std::string_view key, std::string_view what) {
  const auto it = obj.find(str(key));
  if (it == obj.end()) throw SchemaError(str(what) + ": missing field '" + str(key) + "'");
  return *it;
}

double number_field(const Json& obj, std::string_view key, std::string_view what) {
  const Json& j = field(obj, key, what);
  if (!j.is_number()) throw SchemaError(str(what) + ": field '" + str(key) + "' must be a number");
  return j.get<double>();
}

Index integer_field(const Json& obj, std::string_view key, std::string_view what) {
  const Json& j = field(obj, key, what);
  if (!j.is_number_integer()) throw SchemaError(str(what) + ": field '" + str(key) + "' must be an integer");
  return j.get<Index>();
}

CpMap cp_map_from(const Json& j) {
  require_keys(j, {"d", "h", "choi"}, "cp_map");
  const Index d = integer_field(j, "d", "cp_map");
  const Index h = integer_field(j, "h", "cp_map");
  if (d < 1 || h < 1) throw SchemaError("cp_map: d and h must be positive");
  return CpMap::from_choi(d, h, matrix_from(field(j, "choi", "cp_map"), d * h, d * h, "cp_map.choi"));
}

Json to_json(const CpMap& psi) {
  return Json{{"d", psi.d()}, {"h", psi.h()}, {"choi", to_json(psi.choi().matrix())}};
}

namespace {

ScalarKernelSpec scalar_from(const Json& term) {
  const Json& fam = field(term, "family", "kernel term");
  if (!fam.is_string()) throw SchemaError("kernel term: 'family' must be a string");
  const std::string family = fam.get<std::string>();
  if (family == "gaussian") {
    require_keys(term, {"family", "sigma", "coefficient"}, "gaussian term");
    return ScalarKernelSpec::gaussian(number_field(term, "sigma", "gaussian term"));
  }
  if (family == "laplacian") {
    require_keys(term, {"family", "gamma", "coefficient"}, "laplacian term");
    return ScalarKernelSpec::laplacian(number_field(term, "gamma", "laplacian term"));
  }
  if (family == "polynomial") {
    require_keys(term, {"family", "degree", "offset", "coefficient"}, "polynomial term");
    const double offset = term.contains("offset") ? number_field(term, "offset", "polynomial term") : 0.0;
    return ScalarKernelSpec::polynomial(static_cast<int>(integer_field(term, "degree", "polynomial term")), offset);
  }
  if (family == "linear") {
    require_keys(term, {"family", "coefficient"}, "linear term");
    return ScalarKernelSpec::linear();
  }
  throw SchemaError("kernel term: unknown family '" + family + "'");
}

}  // namespace

OperatorKernelSpec kernel_from(const Json& j) {
  if (!j.is_object()) throw SchemaError("kernel: expected an object");
  const Json& type_field = field(j, "type", "kernel");
  if (!type_field.is_string()) throw SchemaError("kernel: 'type' must be a string");
  const std::string type = type_field.get<std::string>();
  try {
    if (type == "separable") {
      require_keys(j, {"type", "h", "terms"}, "separable kernel");
      const Index h = integer_field(j, "h", "separable kernel");
      if (h < 1) throw SchemaError("separable kernel: h must be positive");
      const Json& terms = field(j, "terms", "separable kernel");
      if (!terms.is_array() || terms.empty()) throw SchemaError("separable kernel: 'terms' must be a nonempty list");
      std::vector<SeparableKernel::Term> parsed;
      for (const Json& term : terms) {
        if (!term.is_object()) throw SchemaError("kernel term: expected an object");
        parsed.push_back({scalar_from(term), matrix_from(field(term, "coefficient", "kernel term"), h, h,
                                                         "kernel term coefficient")});
      }
      return OperatorKernelSpec::separable(h, std::move(parsed));
    }
    if (type == "explicit_factor") {
      require_keys(j, {"type", "h", "r", "factors"}, "explicit_factor kernel");
      const Index h = integer_field(j, "h", "explicit_factor kernel");
      const Index r = integer_field(j, "r", "explicit_factor kernel");
      if (h < 1 || r < 0) throw SchemaError("explicit_factor kernel: h must be positive and r nonnegative");
      const Json& factors = field(j, "factors", "explicit_factor kernel");
      if (!factors.is_array() || factors.empty()) {
        throw SchemaError("explicit_factor kernel: 'factors' must be a nonempty list");
      }
      std::vector<CMatrix> parsed;
      for (const Json& f : factors) parsed.push_back(matrix_from(f, r, h, "explicit factor"));
      return OperatorKernelSpec::explicit_factor(std::move(parsed));
    }
    if (type == "cp_induced") {
      require_keys(j, {"type", "cp_map", "elements"}, "cp_induced kernel");
      CpMap psi = cp_map_from(field(j, "cp_map", "cp_induced kernel"));
      std::vector<CMatrix> elements;
      if (j.contains("elements")) {
        const Json& el = j.at("elements");
        if (!el.is_array() || el.empty()) throw SchemaError("cp_induced kernel: 'elements' must be a nonempty list");
        for (const Json& e : el) elements.push_back(matrix_from(e, psi.d(), psi.d(), "cp_induced element"));
      } else {
        elements = matrix_unit_basis(psi.d());
      }
      return OperatorKernelSpec::cp_induced(std::move(psi), std::move(elements));
    }
  } catch (const DimensionError& e) {
    throw SchemaError(std::string("kernel: ") + e.what());
  }
  throw SchemaError("kernel: unknown type '" + type + "'");
}

std::vector<SamplePoint> points_from(const Json& j) {
  if (!j.is_array() || j.empty()) throw SchemaError("points: expected a nonempty list of coordinate lists");
  std::vector<SamplePoint> points;
  for (const Json& p : j) {
    SamplePoint sp;
    if (p.is_number()) {
      sp = SamplePoint::scalar(p.get<double>());
    } else {
      if (!p.is_array() || p.empty()) throw SchemaError("points: each point is a nonempty list of numbers");
      sp.coordinates.resize(static_cast<Index>(p.size()));
      for (std::size_t k = 0; k < p.size(); ++k) {
        if (!p[k].is_number()) throw SchemaError("points: coordinates must be numbers");
        sp.coordinates(static_cast<Index>(k)) = p[k].get<double>();
      }
    }
    if (!sp.coordinates.allFinite()) throw SchemaError("points: coordinates must be finite");
    points.push_back(std::move(sp));
  }
  return points;
}

}  // namespace opk::json_io
