#include "fichain/chain_io.hpp"

#include <fstream>

namespace fichain {

namespace {

Vector vector_from_json(const Json& j) {
  if (!j.is_array()) throw SpecParseError("expected an array of numbers");
  Vector v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[Eigen::Index(i)] = j[i].get<double>();
  return v;
}

Matrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw SpecParseError("expected a matrix");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (static_cast<Eigen::Index>(j[r].size()) != cols)
      throw SpecParseError("ragged matrix rows");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json vector_to_json(const Vector& v) {
  Json arr = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

ReversibleChain zrp_from_json(const Json& j, std::size_t state_cap) {
  const int n = j.at("n").get<int>();
  const int m = j.at("m").get<int>();

  ZrpSpec spec;
  const Json& rates = j.at("rates");
  const std::string kind = rates.at("kind").get<std::string>();
  if (kind == "linear") {
    spec = ZrpSpec::mean_field(n, m, rates.value("slope", 1.0));
  } else if (kind == "table") {
    spec.sites = n;
    spec.particles = m;
    spec.G = Matrix::Constant(n, n, 1.0 / n);
    for (const Json& site : rates.at("values")) {
      std::vector<double> r;
      for (const Json& v : site) r.push_back(v.get<double>());
      spec.rate_table.push_back(std::move(r));
    }
    spec.delta = rates.at("delta").get<double>();
    spec.Delta = rates.at("Delta").get<double>();
  } else {
    throw SpecParseError("unknown zrp rate kind '" + kind + "'");
  }

  const Json& g = j.at("G");
  if (g.is_string()) {
    if (g.get<std::string>() != "mean_field")
      throw SpecParseError("unknown zrp geometry '" + g.get<std::string>() + "'");
    spec.G = Matrix::Constant(n, n, 1.0 / n);
  } else {
    spec.G = matrix_from_json(g);
  }
  return build_zrp(spec, state_cap);
}

}  // namespace

Json chain_to_json(const ReversibleChain& chain) {
  Json j;
  j["type"] = "explicit";
  j["states"] = chain.labels();
  j["rates"] = matrix_to_json(chain.rates());
  j["pi"] = vector_to_json(chain.pi());
  return j;
}

ReversibleChain chain_from_json(const Json& j) {
  if (j.value("type", "explicit") != "explicit")
    throw SpecParseError("expected an explicit chain");
  const Matrix rates = matrix_from_json(j.at("rates"));
  std::optional<Vector> pi;
  if (j.contains("pi") && !j["pi"].is_null()) pi = vector_from_json(j["pi"]);
  std::vector<std::string> labels;
  if (j.contains("states") && !j["states"].is_null())
    labels = j["states"].get<std::vector<std::string>>();
  return ReversibleChain::build(rates, pi, std::move(labels));
}

ReversibleChain chain_from_spec(const Json& j, std::size_t state_cap) {
  const std::string type = j.at("type").get<std::string>();
  try {
    if (type == "explicit") return chain_from_json(j);
    if (type == "graph_walk")
      return build_graph_walk(GraphSpec::parse(j.at("graph").get<std::string>()));
    if (type == "lamplighter")
      return build_lamplighter(GraphSpec::parse(j.at("graph").get<std::string>()),
                               state_cap);
    if (type == "zrp") return zrp_from_json(j, state_cap);
    if (type == "trivial") return build_trivial(vector_from_json(j.at("pi")));
  } catch (const Json::exception& e) {
    throw SpecParseError(std::string("malformed chain spec: ") + e.what());
  }
  throw SpecParseError("unknown chain spec type '" + type + "'");
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecParseError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw SpecParseError("JSON parse error in '" + path + "': " + e.what());
  }
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << j.dump(2) << "\n";
}

}  // namespace fichain
