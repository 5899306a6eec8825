#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "whitney/decomposition.hpp"
#include "whitney/extension.hpp"
#include "whitney/partition.hpp"
#include "whitney/paths.hpp"
#include "whitney/seminorm.hpp"
#include "whitney/test_functions.hpp"

namespace whitney {

using Json = nlohmann::json;

void to_json(Json& j, const Point& x);
void from_json(const Json& j, Point& x);
void to_json(Json& j, const MultiIndex& k);
void from_json(const Json& j, MultiIndex& k);
void to_json(Json& j, const DyadicCube& q);
void from_json(const Json& j, DyadicCube& q);
void to_json(Json& j, const Box& b);
void from_json(const Json& j, Box& b);
void to_json(Json& j, const Jet& jet);
Jet jet_from_json(const Json& j);

Json params_to_json(const SpaceParams& p);
SpaceParams params_from_json(const Json& j);

/// {"params", "sites", "domain_exp", "max_depth", "depth_cap", "cubes", "anchors", "fringe"}
Json decomposition_to_json(const WhitneyDecomposition& w);
WhitneyDecomposition decomposition_from_json(const Json& j);

/// {"params", "validated", "jets": [...]}; a bare array of jets is also accepted on input.
Json jets_to_json(const JetField& f);
JetField jets_from_json(const Json& j, const SpaceParams& params);

/// {"name": "gaussian", "center": [...], "width": w, "amplitude": a}, and likewise
/// "bump", "radial_power" (center, beta), "polynomial" (terms: [{index, coeff}]),
/// "constant" (value) and "sum" (parts: [{weight, function}]).
TestFunctionPtr function_from_json(const Json& j, int dim);
Json function_to_json(const TestFunction& f);

/// {"lo": [...], "hi": [...]} or {"boxes": [...]}
Region region_from_json(const Json& j);

Json to_json(const StructureReport& r);
Json to_json(const DerivativeBoundReport& r);
Json to_json(const SeminormEstimate& e);
Json to_json(const CubePath& p, const Grid& grid);
Json to_json(const PathCheck& c);
Json to_json(const PathDecayConstants& c);
Json to_json(const Lemma12Report& r);
Json to_json(const Lemma7ScaleReport& r);
Json to_json(const JetAgreementReport& r);

Json read_json_file(const std::string& path);
/// Two-space indented dump with a trailing newline.
void write_json_file(const std::string& path, const Json& j);
void write_text_file(const std::string& path, const std::string& text);

/// Query points, one per line, comma separated; a non-numeric first line is a header.
std::vector<Point> read_points_csv(const std::string& path, int dim);

/// n = 2 only: cubes as rectangles, sites as dots, arrows from cube centres to anchors.
std::string render_decomposition_svg(const WhitneyDecomposition& w, std::size_t max_arrows = 400);
/// n = 2 only: the segment [x, x_P] over its cube chain.
std::string render_path_svg(const WhitneyDecomposition& w, const CubePath& path);

} // namespace whitney
