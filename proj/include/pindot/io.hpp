#pragma once

#include <string>

#include "json.hpp"

#include "pindot/dimension.hpp"
#include "pindot/exceptional.hpp"
#include "pindot/geometry.hpp"
#include "pindot/pins.hpp"
#include "pindot/pointcloud.hpp"
#include "pindot/trees.hpp"

namespace pindot {

using json = nlohmann::json;

/// Pretty-printed with sorted keys and shortest round-trip numbers, newline-terminated.
std::string dump(const json& j);

json to_json(const PointCloud& a);
PointCloud cloud_from_json(const json& j);

json to_json(const ScalarSet& s);
ScalarSet scalar_from_json(const json& j);

/// Points are arrays of numbers or of rational strings such as "3/4".
ExactPoint point_from_json(const json& j);
json to_json(const ExactPoint& p);
json to_json(const Rational& q);

json to_json(const Window& w);
json to_json(const DimensionReport& r);
/// level,count rows.
std::string dimension_csv(const DimensionReport& r);
json to_json(const MeasureProxy& m);

json to_json(const ProjectionVerdict& v);
json scan_summary(const ExceptionalScan& scan, const BoundCheck& bc);
/// line,cap,theta...,slope,measure,run,exceptional rows.
std::string scan_csv(const ExceptionalScan& scan);

json to_json(const PinReport& r);
std::string pins_csv(const PinReport& r);
json to_json(const DispersionReport& r);
json to_json(const TranslationReport& r);
json to_json(const RestrictedReport& r);
json to_json(const KeyLemmaReport& r);

json to_json(const TreeSpec& t);
TreeSpec tree_from_json(const json& j);
json to_json(const TreeMeasureEstimate& e);
std::string tree_csv(const TreeMeasureEstimate& e);
json to_json(const PinnedTreeEstimate& e);
json to_json(const SlabWitness& w);

}  // namespace pindot
