#include "pareto/problem_io.hpp"

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace pareto {

using nlohmann::json;

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

json vecToJson(const VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json matToJson(const MatrixXd& m) {
  json a = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) a.push_back(vecToJson(m.row(r).transpose()));
  return a;
}

const json& field(const json& j, const std::string& name) {
  if (!j.contains(name)) throw ParseError(name, "missing required field");
  return j.at(name);
}

double readNumber(const json& j, const std::string& path) {
  if (!j.is_number()) throw ParseError(path, "expected a number");
  return j.get<double>();
}

int readInt(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ParseError(path, "expected an integer");
  return j.get<int>();
}

VectorXd readVector(const json& j, const std::string& path, Eigen::Index expected = -1) {
  if (!j.is_array()) throw ParseError(path, "expected an array");
  if (expected >= 0 && static_cast<Eigen::Index>(j.size()) != expected)
    throw ParseError(path, "dimension mismatch: expected length " + std::to_string(expected) +
                               ", got " + std::to_string(j.size()));
  VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v(static_cast<Eigen::Index>(i)) = readNumber(j[i], path + "[" + std::to_string(i) + "]");
  return v;
}

MatrixXd readMatrix(const json& j, const std::string& path, Eigen::Index rows = -1,
                    Eigen::Index cols = -1) {
  if (!j.is_array()) throw ParseError(path, "expected an array of rows");
  if (rows >= 0 && static_cast<Eigen::Index>(j.size()) != rows)
    throw ParseError(path, "dimension mismatch: expected " + std::to_string(rows) + " rows, got " +
                               std::to_string(j.size()));
  if (j.empty()) return MatrixXd(0, std::max<Eigen::Index>(cols, 0));
  const Eigen::Index c = cols >= 0 ? cols : static_cast<Eigen::Index>(j[0].is_array() ? j[0].size() : 0);
  MatrixXd m(static_cast<Eigen::Index>(j.size()), c);
  for (std::size_t r = 0; r < j.size(); ++r)
    m.row(static_cast<Eigen::Index>(r)) =
        readVector(j[r], path + "[" + std::to_string(r) + "]", c).transpose();
  return m;
}

}  // namespace

json problemToJson(const FamilySpec& spec) {
  const Dimensions d = dimensionsOf(spec);
  json j;
  j["family"] = familyName(spec);
  j["n"] = d.n;
  j["m"] = d.m;
  std::visit(Overloaded{
                 [&](const GenericQuadratic& q) {
                   json Q = json::array(), b = json::array();
                   for (const auto& qi : q.Q) Q.push_back(matToJson(qi));
                   for (const auto& bi : q.b) b.push_back(vecToJson(bi));
                   j["Q"] = Q;
                   j["b"] = b;
                   j["c"] = q.c;
                 },
                 [](const Example31&) {},
                 [&](const Example31Perturbed& s) { j["epsilon"] = s.epsilon; },
                 [](const Example32&) {},
                 [](const RemarkG&) {},
                 [&](const DistanceSquared& ds) {
                   json pts = json::array();
                   for (const auto& p : ds.points) pts.push_back(vecToJson(p));
                   j["points"] = pts;
                 },
                 [&](const Phenotypic& ph) {
                   json A = json::array(), pts = json::array();
                   for (const auto& a : ph.A) A.push_back(matToJson(a));
                   for (const auto& p : ph.points) pts.push_back(vecToJson(p));
                   j["A"] = A;
                   j["points"] = pts;
                 },
                 [&](const RidgePair& r) {
                   j["X"] = matToJson(r.X);
                   j["y"] = vecToJson(r.y);
                   j["mu"] = r.mu;
                 },
             },
             spec);
  return j;
}

std::string serializeProblem(const FamilySpec& spec, int indent) {
  return problemToJson(spec).dump(indent);
}

FamilySpec problemFromJson(const json& j) {
  if (!j.is_object()) throw ParseError("", "problem must be a JSON object");
  const json& famField = field(j, "family");
  if (!famField.is_string()) throw ParseError("family", "expected a string");
  const std::string fam = famField.get<std::string>();
  const int n = readInt(field(j, "n"), "n");
  const int m = readInt(field(j, "m"), "m");
  if (n < 1) throw ParseError("n", "must be positive");
  if (m < 1) throw ParseError("m", "must be positive");

  FamilySpec spec;
  if (fam == "generic_quadratic") {
    GenericQuadratic q;
    const json& Q = field(j, "Q");
    if (!Q.is_array() || static_cast<int>(Q.size()) != m)
      throw ParseError("Q", "dimension mismatch: expected " + std::to_string(m) + " matrices");
    for (int i = 0; i < m; ++i)
      q.Q.push_back(readMatrix(Q[static_cast<std::size_t>(i)], "Q[" + std::to_string(i) + "]", n, n));
    if (j.contains("b")) {
      const json& b = j.at("b");
      if (!b.is_array() || static_cast<int>(b.size()) != m)
        throw ParseError("b", "dimension mismatch: expected " + std::to_string(m) + " vectors");
      for (int i = 0; i < m; ++i)
        q.b.push_back(readVector(b[static_cast<std::size_t>(i)], "b[" + std::to_string(i) + "]", n));
    } else {
      q.b.assign(static_cast<std::size_t>(m), VectorXd::Zero(n));
    }
    if (j.contains("c")) {
      const VectorXd c = readVector(j.at("c"), "c", m);
      q.c.assign(c.data(), c.data() + c.size());
    } else {
      q.c.assign(static_cast<std::size_t>(m), 0.0);
    }
    spec = std::move(q);
  } else if (fam == "example31") {
    spec = Example31{};
  } else if (fam == "example31_perturbed") {
    spec = Example31Perturbed{readNumber(field(j, "epsilon"), "epsilon")};
  } else if (fam == "example32") {
    spec = Example32{};
  } else if (fam == "remark_g") {
    spec = RemarkG{};
  } else if (fam == "distance_squared") {
    DistanceSquared ds;
    const MatrixXd pts = readMatrix(field(j, "points"), "points", m, n);
    for (int i = 0; i < m; ++i) ds.points.push_back(pts.row(i).transpose());
    spec = std::move(ds);
  } else if (fam == "phenotypic") {
    Phenotypic ph;
    const json& A = field(j, "A");
    if (!A.is_array() || static_cast<int>(A.size()) != m)
      throw ParseError("A", "dimension mismatch: expected " + std::to_string(m) + " matrices");
    for (int i = 0; i < m; ++i)
      ph.A.push_back(readMatrix(A[static_cast<std::size_t>(i)], "A[" + std::to_string(i) + "]", n, n));
    const MatrixXd pts = readMatrix(field(j, "points"), "points", m, n);
    for (int i = 0; i < m; ++i) ph.points.push_back(pts.row(i).transpose());
    spec = std::move(ph);
  } else if (fam == "ridge_pair") {
    RidgePair r;
    r.X = readMatrix(field(j, "X"), "X", -1, n);
    r.y = readVector(field(j, "y"), "y", r.X.rows());
    r.mu = readNumber(field(j, "mu"), "mu");
    if (!(r.mu > 0.0)) throw ParseError("mu", "μ must be positive");
    spec = std::move(r);
  } else {
    throw ParseError("family", "unknown family '" + fam + "'");
  }

  const Dimensions d = dimensionsOf(spec);
  if (d.n != n) throw ParseError("n", "dimension mismatch: family implies n = " + std::to_string(d.n));
  if (d.m != m) throw ParseError("m", "dimension mismatch: family implies m = " + std::to_string(d.m));
  validateSpec(spec);
  return spec;
}

FamilySpec parseProblem(std::string_view text) {
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // nlohmann messages carry "at line L, column C".
    throw ParseError("", std::string("invalid JSON: ") + e.what());
  }
  return problemFromJson(j);
}

FamilySpec loadProblemFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("", "cannot open problem file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parseProblem(buf.str());
}

RidgePair readRidgeCsv(std::istream& in, double mu) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("csv", "empty input (header row expected)");
  std::vector<std::vector<double>> rows;
  std::size_t width = 0;
  int lineNo = 1;
  while (std::getline(in, line)) {
    ++lineNo;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw ParseError("csv line " + std::to_string(lineNo), "non-numeric cell '" + cell + "'");
      }
    }
    if (width == 0) width = row.size();
    if (row.size() != width || width < 2)
      throw ParseError("csv line " + std::to_string(lineNo), "dimension mismatch: inconsistent column count");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("csv", "no data rows");
  RidgePair r;
  r.mu = mu;
  const auto nr = static_cast<Eigen::Index>(rows.size());
  const auto p = static_cast<Eigen::Index>(width - 1);
  r.X.resize(nr, p);
  r.y.resize(nr);
  for (Eigen::Index i = 0; i < nr; ++i) {
    for (Eigen::Index c = 0; c < p; ++c) r.X(i, c) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)];
    r.y(i) = rows[static_cast<std::size_t>(i)].back();
  }
  validateSpec(r);
  return r;
}

RidgePair loadRidgeCsv(const std::filesystem::path& path, double mu) {
  std::ifstream in(path);
  if (!in) throw ParseError("", "cannot open CSV file " + path.string());
  return readRidgeCsv(in, mu);
}

std::string problemDigest(const FamilySpec& spec) {
  const std::string text = problemToJson(spec).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

}  // namespace pareto
