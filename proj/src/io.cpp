#include "eknot/io.hpp"

#include "eknot/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace eknot {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::TooFewPoints: return "TooFewPoints";
    case Errc::DegenerateEdge: return "DegenerateEdge";
    case Errc::MismatchedSampleCount: return "MismatchedSampleCount";
    case Errc::NonUniformSampling: return "NonUniformSampling";
    case Errc::CoincidentPoints: return "CoincidentPoints";
    case Errc::SelfIntersection: return "SelfIntersection";
    case Errc::InvalidSpec: return "InvalidSpec";
    case Errc::KnotGuardViolation: return "KnotGuardViolation";
    case Errc::NonFiniteEnergy: return "NonFiniteEnergy";
    case Errc::DegenerateCurve: return "DegenerateCurve";
    case Errc::DegenerateDirection: return "DegenerateDirection";
    case Errc::StrandCountError: return "StrandCountError";
    case Errc::TransversalityError: return "TransversalityError";
    case Errc::AlignmentError: return "AlignmentError";
    case Errc::ParseError: return "ParseError";
    case Errc::IoError: return "IoError";
    case Errc::UsageError: return "UsageError";
  }
  return "Unknown";
}

Json number_json(double x) {
  if (std::isnan(x)) return nullptr;
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

Json curve_to_json(const Curve& c, const Json& provenance) {
  Json doc;
  doc["format"] = kCurveFormat;
  doc["n"] = c.size();
  doc["closed"] = true;
  Json verts = Json::array();
  for (const auto& v : c.vertices()) verts.push_back({v.x(), v.y(), v.z()});
  doc["vertices"] = std::move(verts);
  if (!provenance.is_null()) doc["provenance"] = provenance;
  return doc;
}

// Written by hand so every coordinate is the shortest round-trip decimal.
std::string curve_to_string(const Curve& c, const Json& provenance) {
  std::string out = std::string("{\"format\":\"") + kCurveFormat + "\",\"n\":" + std::to_string(c.size()) +
                    ",\"closed\":true,\"vertices\":[";
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i > 0) out += ',';
    out += '[' + format_double(c[i].x()) + ',' + format_double(c[i].y()) + ',' + format_double(c[i].z()) + ']';
  }
  out += ']';
  if (!provenance.is_null()) out += ",\"provenance\":" + provenance.dump();
  out += "}\n";
  return out;
}

Curve curve_from_json(const Json& doc) {
  auto fail = [](const std::string& msg) -> Curve { throw Error(Errc::ParseError, msg); };
  if (!doc.is_object()) return fail("curve document must be a JSON object");
  if (!doc.contains("format") || doc["format"] != kCurveFormat) {
    return fail(std::string("format must be \"") + kCurveFormat + "\"");
  }
  if (!doc.contains("closed") || doc["closed"] != true) return fail("only closed curves are supported");
  if (!doc.contains("n") || !doc["n"].is_number_integer()) return fail("missing integer \"n\"");
  if (!doc.contains("vertices") || !doc["vertices"].is_array()) return fail("missing \"vertices\" array");
  const auto& verts = doc["vertices"];
  if (doc["n"].get<long long>() != static_cast<long long>(verts.size())) {
    throw Error(Errc::MismatchedSampleCount, "\"n\" does not match the vertex count");
  }
  std::vector<Vec3> pts;
  pts.reserve(verts.size());
  for (const auto& v : verts) {
    if (!v.is_array() || v.size() != 3) return fail("each vertex must be [x, y, z]");
    Vec3 p;
    for (int d = 0; d < 3; ++d) {
      if (!v[d].is_number()) return fail("vertex coordinates must be numbers");
      p(d) = v[d].get<double>();
    }
    pts.push_back(p);
  }
  return make_polyline(std::move(pts));
}

Curve curve_from_string(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::ParseError, e.what());
  }
  return curve_from_json(doc);
}

namespace {

const char* method_name(ThicknessMethod m) { return m == ThicknessMethod::triples ? "triples" : "litherland"; }

}  // namespace

Json to_json(const ThicknessReport& r) {
  Json j;
  j["thickness"] = number_json(r.thickness);
  j["min_circumradius"] = number_json(r.min_circumradius);
  j["min_radius_of_curvature"] = number_json(r.min_radius_of_curvature);
  j["half_dcsd"] = number_json(r.half_dcsd);
  j["realizer"] = r.realizer;
  j["method"] = method_name(r.method);
  return j;
}

Json to_json(const EnergyReport& r) {
  Json j;
  j["bending"] = number_json(r.bending);
  j["total_curvature"] = number_json(r.total_curvature);
  j["ropelength"] = number_json(r.ropelength);
  j["moebius"] = r.moebius ? number_json(*r.moebius) : Json(nullptr);
  j["theta"] = number_json(r.theta);
  j["lambda"] = number_json(r.lambda);
  j["repulsion"] = r.repulsion == Repulsion::ropelength ? "ropelength" : "moebius";
  j["total"] = number_json(r.total);
  const Json t = to_json(r.thickness);
  for (auto it = t.begin(); it != t.end(); ++it) j[it.key()] = it.value();
  return j;
}

Json to_json(const CrookednessReport& r) {
  Json j;
  j["directions_sampled"] = r.directions_sampled;
  j["degenerate_resampled"] = r.degenerate_resampled;
  Json hist = Json::object();
  for (const auto& [mu, count] : r.mu_histogram) hist[std::to_string(mu)] = count;
  j["mu_histogram"] = std::move(hist);
  j["mu_min"] = r.mu_min;
  j["tc_estimate"] = number_json(r.tc_estimate);
  j["fraction_mu_ge_3"] = number_json(r.fraction_mu_ge_3);
  return j;
}

Json to_json(const FaryMilnorRecord& r) {
  Json j;
  j["tc"] = number_json(r.tc);
  j["passes"] = r.passes ? Json(*r.passes) : Json(nullptr);
  return j;
}

Json to_json(const TangentialPairFit& r) {
  return Json{{"phi", number_json(r.phi)}, {"c1_dist", number_json(r.c1_dist)}};
}

Json to_json(const CylinderDiagnostic& r) {
  Json j;
  j["zeta"] = number_json(r.zeta);
  j["eta"] = number_json(r.eta);
  j["phi_ref"] = number_json(r.phi_ref);
  Json samples = Json::array();
  for (const auto& [xi, beta] : r.beta_samples) samples.push_back({xi, beta});
  j["beta_samples"] = std::move(samples);
  j["delta_beta"] = number_json(r.delta_beta);
  j["b"] = r.b;
  j["strands_ok"] = r.strands_ok;
  j["c1_dist_to_ref"] = number_json(r.c1_dist_to_ref);
  j["c0_dist_to_ref"] = number_json(r.c0_dist_to_ref);
  j["alignment_bound"] = number_json(r.alignment_bound);
  return j;
}

Json to_json(const SphericityReport& r) {
  Json j;
  j["best_sphere_center"] = {r.best_sphere_center.x(), r.best_sphere_center.y(), r.best_sphere_center.z()};
  j["best_sphere_radius"] = number_json(r.best_sphere_radius);
  j["rms_residual"] = number_json(r.rms_residual);
  j["plane_normal"] = {r.plane_normal.x(), r.plane_normal.y(), r.plane_normal.z()};
  j["planar_rms_residual"] = number_json(r.planar_rms_residual);
  return j;
}

Json to_json(const std::vector<Crossing>& crossings) {
  Json arr = Json::array();
  for (const auto& x : crossings) {
    arr.push_back({{"edge_a", x.edge_a},
                   {"edge_b", x.edge_b},
                   {"s_a", x.s_a},
                   {"s_b", x.s_b},
                   {"over_edge", x.over_edge},
                   {"sign", x.sign}});
  }
  return arr;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "theta,bending,ropelength,total,total_curvature,phi_fit,c1_dist_to_fit,comparison_total\n";
  for (const auto& r : rows) {
    for (double x : {r.theta, r.bending, r.ropelength, r.total, r.total_curvature, r.phi_fit, r.c1_dist_to_fit}) {
      out += format_double(x);
      out += ',';
    }
    out += format_double(r.comparison_total);
    out += '\n';
  }
  return out;
}

std::string trace_csv(const std::vector<std::pair<std::size_t, double>>& trace) {
  std::string out = "step,total\n";
  for (const auto& [step, total] : trace) out += std::to_string(step) + "," + format_double(total) + "\n";
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& content, bool force) {
  if (!force && std::filesystem::exists(path)) {
    throw Error(Errc::IoError, path.string() + " exists (use --force to overwrite)");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
  out << content;
  if (!out) throw Error(Errc::IoError, "write failed for " + path.string());
}

}  // namespace eknot
