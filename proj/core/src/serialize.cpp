#include "vnlab/serialize.hpp"

#include "json_io.hpp"
#include "vnlab/errors.hpp"

namespace vnlab {

namespace {

io::json parse(const std::string& text) {
  try {
    return io::json::parse(text);
  } catch (const io::json::exception& e) {
    throw Error(ErrorKind::Usage, std::string("malformed JSON: ") + e.what());
  }
}

template <class F>
auto guarded(F f) {
  try {
    return f();
  } catch (const io::json::exception& e) {
    throw Error(ErrorKind::Usage, std::string("unexpected JSON layout: ") + e.what());
  }
}

}  // namespace

std::string matrix_to_json(const Mat& m) { return io::mat_to_json(m).dump(); }
Mat matrix_from_json(const std::string& text) {
  return guarded([&] { return io::mat_from_json(parse(text)); });
}
std::string algebra_to_json(const FdAlgebra& a) { return io::algebra_to_json(a).dump(); }
FdAlgebra algebra_from_json(const std::string& text) {
  return guarded([&] { return io::algebra_from_json(parse(text)); });
}
std::string functional_to_json(const Functional& f) { return io::functional_to_json(f).dump(); }
Functional functional_from_json(const std::string& text) {
  return guarded([&] { return io::functional_from_json(parse(text)); });
}

}  // namespace vnlab
