#pragma once

#include "eknot/curve.hpp"
#include "eknot/diagnostics.hpp"
#include "eknot/energy.hpp"
#include "eknot/optimize.hpp"

#include "json.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace eknot {

using Json = nlohmann::ordered_json;

inline constexpr const char* kCurveFormat = "eknot-curve-v1";
inline constexpr const char* kVersion = "0.1.0";

/// Finite numbers as-is, infinities as the strings "inf" / "-inf", NaN as null.
Json number_json(double x);

/// Canonical eknot-curve-v1 document. `provenance` is added under that key
/// when not null.
Json curve_to_json(const Curve& c, const Json& provenance = nullptr);
std::string curve_to_string(const Curve& c, const Json& provenance = nullptr);

/// Throws ParseError on malformed documents or a wrong format tag, and the
/// curve constructor's errors on invalid geometry.
Curve curve_from_json(const Json& doc);
Curve curve_from_string(const std::string& text);

Json to_json(const ThicknessReport& r);
Json to_json(const EnergyReport& r);
Json to_json(const CrookednessReport& r);
Json to_json(const FaryMilnorRecord& r);
Json to_json(const TangentialPairFit& r);
Json to_json(const CylinderDiagnostic& r);
Json to_json(const SphericityReport& r);
Json to_json(const std::vector<Crossing>& crossings);

std::string sweep_csv(const std::vector<SweepRow>& rows);
std::string trace_csv(const std::vector<std::pair<std::size_t, double>>& trace);

/// Shortest round-trip decimal, "inf" / "-inf" / "nan" otherwise.
std::string format_double(double x);

/// Throws IoError when the file cannot be read.
std::string read_file(const std::filesystem::path& path);
/// Throws IoError when the file exists and force is false, or on write failure.
void write_file(const std::filesystem::path& path, const std::string& content, bool force);

}  // namespace eknot
