#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "magwell/errors.hpp"
#include "magwell/field.hpp"
#include "magwell/io.hpp"

namespace magwell {

using nlohmann::json;

namespace {

Poly3 parse_component(const json& comp, int which) {
  Poly3 p;
  if (!comp.is_array())
    throw ParseError("component A" + std::to_string(which + 1) +
                     " must be an array of monomial records");
  for (const auto& rec : comp) {
    if (!rec.is_object() || !rec.contains("exponents") || !rec.contains("coeff"))
      throw ParseError("monomial record must look like {\"exponents\":[i,j,k],\"coeff\":c}");
    const auto& e = rec["exponents"];
    if (!e.is_array() || e.size() != 3)
      throw ParseError("\"exponents\" must be a 3-element integer array");
    Idx3 idx;
    for (int a = 0; a < 3; ++a) {
      if (!e[a].is_number_integer() || e[a].get<long long>() < 0)
        throw ParseError("exponents must be non-negative integers");
      idx[a] = e[a].get<int>();
    }
    if (!rec["coeff"].is_number()) throw ParseError("\"coeff\" must be a number");
    double c = rec["coeff"].get<double>();
    if (idx[0] + idx[1] + idx[2] > Poly3::kInputDegreeCap)
      throw ParseError("monomial degree " + std::to_string(idx[0] + idx[1] + idx[2]) +
                       " exceeds the supported cap " + std::to_string(Poly3::kInputDegreeCap));
    p.add_term(idx, c);
  }
  return p;
}

}  // namespace

PolyVecField parse_field_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("field file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("A"))
    throw ParseError("field file must be an object with an \"A\" array");
  const auto& A = doc["A"];
  if (!A.is_array() || A.size() != 3)
    throw ParseError("\"A\" must list exactly three components");

  PolyVecField f;
  for (int c = 0; c < 3; ++c) f.A[c] = parse_component(A[c], c);
  if (doc.contains("name")) f.name = doc["name"].get<std::string>();
  if (doc.contains("domain")) {
    const auto& d = doc["domain"];
    if (!d.contains("min") || !d.contains("max") || d["min"].size() != 3 || d["max"].size() != 3)
      throw ParseError("\"domain\" must carry 3-element \"min\" and \"max\" arrays");
    for (int a = 0; a < 3; ++a) {
      f.domain.min[a] = d["min"][a].get<double>();
      f.domain.max[a] = d["max"][a].get<double>();
      if (!(f.domain.min[a] < f.domain.max[a]))
        throw ParseError("domain min must be strictly below max on every axis");
    }
  }
  return f;
}

PolyVecField parse_field_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open field file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_field_text(ss.str());
}

std::string field_to_json(const PolyVecField& f) {
  json doc;
  doc["name"] = f.name;
  doc["domain"]["min"] = {f.domain.min[0], f.domain.min[1], f.domain.min[2]};
  doc["domain"]["max"] = {f.domain.max[0], f.domain.max[1], f.domain.max[2]};
  json comps = json::array();
  for (int c = 0; c < 3; ++c) {
    json arr = json::array();
    for (const auto& [e, v] : f.A[c].terms()) {
      json rec;
      rec["exponents"] = {e[0], e[1], e[2]};
      rec["coeff"] = v;
      arr.push_back(rec);
    }
    comps.push_back(arr);
  }
  doc["A"] = comps;
  return doc.dump(2) + "\n";
}

std::string well_report_json(const PolyVecField& f, const WellAnalysis& w) {
  json doc;
  doc["field"] = f.name;
  doc["X0"] = {w.X0[0], w.X0[1], w.X0[2]};
  doc["b0"] = w.b0;
  json H = json::array();
  for (int i = 0; i < 3; ++i) H.push_back({w.hessB(i, 0), w.hessB(i, 1), w.hessB(i, 2)});
  doc["hess_absB"] = H;
  doc["det_hess"] = w.d;
  doc["axial_curvature"] = w.a;
  doc["boundary_margin"] = w.eps0_margin;
  doc["localization_box"]["min"] = {w.localization_box.min[0], w.localization_box.min[1],
                                    w.localization_box.min[2]};
  doc["localization_box"]["max"] = {w.localization_box.max[0], w.localization_box.max[1],
                                    w.localization_box.max[2]};
  return doc.dump(2) + "\n";
}

}  // namespace magwell
