#pragma once

#include "optdesign/criteria.hpp"
#include "optdesign/invariance.hpp"
#include "optdesign/model.hpp"
#include "optdesign/optimize.hpp"
#include "optdesign/transforms.hpp"

#include <json.hpp>

#include <string>

namespace optdesign {

using Json = nlohmann::json;

// model = {"dim_x":2,"basis":"linear","region":{"lower":[0,0],"upper":[1,1]},"kappa":1.0}
// finite regions use {"region":{"points":[[0,0],[1,0],...]}}.
ModelSpec model_from_json(const Json& j);
Json model_to_json(const ModelSpec& model);

// design = {"support":[[0.0],[1.0]],"weights":[0.5,0.5]}
Design design_from_json(const Json& j);
Json design_to_json(const Design& xi);

// {"kind":"discrete","points":[[0],[1]],"weights":[0.5,0.5]} or
// {"kind":"uniform"} (over the model region) or {"kind":"uniform","lower":[..],"upper":[..]}
WeightingMeasure measure_from_json(const Json& j, const ModelSpec& model);
Json measure_to_json(const WeightingMeasure& nu);

// {"kind":"D"} or {"kind":"IMSE","nu":{...},"quadrature_order":32}
Criterion criterion_from_json(const Json& j, const ModelSpec& model);
Json criterion_to_json(const Criterion& crit);

// {"a":[[-1]],"b":[1],"param_mode":"intercept_rescaled"}, {"name":"reflect:1",...}
// or a bare string "reflect:1".
TransformPair transform_from_json(const Json& j, const ModelSpec& model);
Json transform_to_json(const TransformPair& pair);

// {"generators":["reflect:1","swap:1,2"],"param_mode":"intercept_rescaled"}
std::vector<TransformPair> generators_from_json(const Json& j, const ModelSpec& model);
Json orbits_to_json(const OrbitPartition& partition);

Json certificate_to_json(const Certificate& cert);
Json result_to_json(const OptimizationResult& result);

Vector vector_from_json(const Json& j);
Json vector_to_json(const Vector& v);

/// "1,3,3", "1 -3/7 -3/7", "[1, 2]" or a JSON array. Fractions p/q allowed.
Parameter parse_beta(const std::string& text);

Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

/// Weight formatted to 3 decimals; weights below 5e-4 print as 0.000.
std::string format_weight(double w);

}  // namespace optdesign
