#pragma once

#include <string>

#include "vnlab/functional.hpp"

namespace vnlab {

// JSON text for the basic objects. Doubles are written in shortest round-trip
// form, so parse(dump(x)) reproduces every entry bit for bit.
std::string matrix_to_json(const Mat& m);
Mat matrix_from_json(const std::string& text);
std::string algebra_to_json(const FdAlgebra& a);
FdAlgebra algebra_from_json(const std::string& text);
std::string functional_to_json(const Functional& f);
Functional functional_from_json(const std::string& text);

}  // namespace vnlab
