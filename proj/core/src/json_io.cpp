#include "json_io.hpp"

#include <cmath>
#include <limits>

#include "vnlab/errors.hpp"

namespace vnlab::io {

json num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "+inf" : "-inf";
  return x;
}

double num_from(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "+inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw Error(ErrorKind::Usage, "expected a number, got " + j.dump());
}

json mat_to_json(const Mat& m) {
  json re = json::array(), im = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
      re.push_back(m(i, k).real());
      im.push_back(m(i, k).imag());
    }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"re", re}, {"im", im}};
}

Mat mat_from_json(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  if (rows < 0 || cols < 0 || re.size() != static_cast<std::size_t>(rows * cols) || im.size() != re.size())
    throw Error(ErrorKind::Shape, "matrix entry count does not match its shape");
  Mat m(rows, cols);
  std::size_t c = 0;
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index k = 0; k < cols; ++k, ++c) m(i, k) = cplx(re[c].get<double>(), im[c].get<double>());
  return m;
}

json vec_to_json(const Vec& v) { return mat_to_json(Mat(v)); }

Vec vec_from_json(const json& j) {
  const Mat m = mat_from_json(j);
  if (m.cols() != 1) throw Error(ErrorKind::Shape, "expected a column vector");
  return m.col(0);
}

json algebra_to_json(const FdAlgebra& a) {
  json blocks = json::array();
  for (const auto& b : a.blocks()) blocks.push_back({b.n, b.m});
  return {{"ambient", a.ambient_dim()}, {"blocks", blocks}, {"basis", mat_to_json(a.basis_unitary())}};
}

FdAlgebra algebra_from_json(const json& j) {
  std::vector<Block> blocks;
  for (const auto& b : j.at("blocks")) blocks.push_back(Block{b.at(0).get<int>(), b.at(1).get<int>()});
  return FdAlgebra(j.at("ambient").get<Eigen::Index>(), blocks, mat_from_json(j.at("basis")));
}

json functional_to_json(const Functional& f) {
  return {{"algebra", algebra_to_json(*f.algebra())}, {"density", mat_to_json(f.density())}};
}

Functional functional_from_json(const json& j) {
  return Functional(make_algebra(algebra_from_json(j.at("algebra"))), mat_from_json(j.at("density")));
}

json ensemble_to_json(const ProductEnsemble& e) {
  json terms = json::array();
  for (const auto& t : e.terms) terms.push_back({{"a", functional_to_json(t.a)}, {"b", functional_to_json(t.b)}});
  return {{"terms", terms}};
}

ProductEnsemble ensemble_from_json(const json& j) {
  ProductEnsemble e;
  for (const auto& t : j.at("terms"))
    e.terms.push_back(ProductTerm{functional_from_json(t.at("a")), functional_from_json(t.at("b"))});
  return e;
}

}  // namespace vnlab::io
