#pragma once

#include <json.hpp>

#include "vnlab/entanglement.hpp"

namespace vnlab::io {

using json = nlohmann::json;

// Non-finite doubles are written as the strings "+inf", "-inf" and "nan".
json num(double x);
double num_from(const json& j);

json mat_to_json(const Mat& m);
Mat mat_from_json(const json& j);
json vec_to_json(const Vec& v);
Vec vec_from_json(const json& j);

json algebra_to_json(const FdAlgebra& a);
FdAlgebra algebra_from_json(const json& j);
json functional_to_json(const Functional& f);
Functional functional_from_json(const json& j);

json ensemble_to_json(const ProductEnsemble& e);
ProductEnsemble ensemble_from_json(const json& j);

}  // namespace vnlab::io
