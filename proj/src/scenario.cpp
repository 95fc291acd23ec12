#include "fomas/scenario.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fomas {
namespace scenario {

using nlohmann::json;
using linalg::FromRows;

namespace {

using Kind = plant::FragilityAtom::Kind;

const json& Require(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) {
    throw ScenarioError(where + ": missing field '" + key + "'");
  }
  return j.at(key);
}

Matrix ParseMatrix(const json& j, const std::string& where) {
  if (j.is_number()) return Matrix::Constant(1, 1, j.get<double>());
  if (!j.is_array()) throw ScenarioError(where + ": expected a 2-D array");
  if (j.empty()) return Matrix(0, 0);
  const size_t rows = j.size();
  if (!j[0].is_array()) throw ScenarioError(where + ": expected a 2-D array");
  const size_t cols = j[0].size();
  Matrix out(rows, cols);
  for (size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) throw ScenarioError(where + ": ragged rows");
    for (size_t c = 0; c < cols; ++c) {
      if (!j[r][c].is_number()) throw ScenarioError(where + ": non-numeric entry");
      out(r, c) = j[r][c].get<double>();
    }
  }
  return out;
}

json MatrixJson(const Matrix& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(row);
  }
  return out;
}

std::vector<Matrix> ParseMatrixList(const json& j, const std::string& where) {
  if (!j.is_array()) throw ScenarioError(where + ": expected a list of matrices");
  std::vector<Matrix> out;
  for (size_t i = 0; i < j.size(); ++i) {
    out.push_back(ParseMatrix(j[i], where + "[" + std::to_string(i) + "]"));
  }
  return out;
}

json MatrixListJson(const std::vector<Matrix>& list) {
  json out = json::array();
  for (const auto& m : list) out.push_back(MatrixJson(m));
  return out;
}

// Zero-size controller blocks serialize as [] and lose their shape.
std::vector<Matrix> Reshape(std::vector<Matrix> list, int rows, int cols) {
  for (auto& m : list) {
    if (m.size() == 0) m.resize(rows, cols);
  }
  return list;
}

plant::FragilityAtom ParseAtom(const json& j, const std::string& where) {
  plant::FragilityAtom a;
  if (j.is_number()) {
    a.kind = j.get<double>() == 0.0 ? Kind::kZero : Kind::kConst;
    a.gain = j.get<double>();
    return a;
  }
  const std::string fn = Require(j, "fn", where).get<std::string>();
  if (fn == "sin") {
    a.kind = Kind::kSin;
  } else if (fn == "cos") {
    a.kind = Kind::kCos;
  } else if (fn == "const") {
    a.kind = Kind::kConst;
  } else if (fn == "zero") {
    a.kind = Kind::kZero;
  } else {
    throw ScenarioError(where + ": unknown fragility function '" + fn + "'");
  }
  a.gain = j.value("gain", 1.0);
  a.freq = j.value("freq", 1.0);
  a.phase = j.value("phase", 0.0);
  return a;
}

json AtomJson(const plant::FragilityAtom& a) {
  switch (a.kind) {
    case Kind::kZero:
      return 0.0;
    case Kind::kConst:
      return a.gain;
    case Kind::kSin:
    case Kind::kCos:
      return json{{"fn", a.kind == Kind::kSin ? "sin" : "cos"},
                  {"gain", a.gain},
                  {"freq", a.freq},
                  {"phase", a.phase}};
  }
  return 0.0;
}

std::vector<plant::Perturbation> ParsePerturbations(const json& j, const std::string& where) {
  std::vector<plant::Perturbation> out;
  if (!j.is_array()) throw ScenarioError(where + ": expected one entry per agent");
  for (size_t i = 0; i < j.size(); ++i) {
    const std::string w = where + "[" + std::to_string(i) + "]";
    plant::Perturbation p;
    p.D = ParseMatrix(Require(j[i], "D", w), w + ".D");
    p.E = ParseMatrix(Require(j[i], "E", w), w + ".E");
    const json& F = Require(j[i], "F", w);
    if (!F.is_array()) throw ScenarioError(w + ".F: expected a 2-D array of atoms");
    for (const auto& row : F) {
      if (!row.is_array()) throw ScenarioError(w + ".F: expected a 2-D array of atoms");
      std::vector<plant::FragilityAtom> atoms;
      for (const auto& a : row) atoms.push_back(ParseAtom(a, w + ".F"));
      p.F.push_back(std::move(atoms));
    }
    out.push_back(std::move(p));
  }
  return out;
}

json PerturbationsJson(const std::vector<plant::Perturbation>& list) {
  json out = json::array();
  for (const auto& p : list) {
    json F = json::array();
    for (const auto& row : p.F) {
      json r = json::array();
      for (const auto& a : row) r.push_back(AtomJson(a));
      F.push_back(r);
    }
    out.push_back(json{{"D", MatrixJson(p.D)}, {"E", MatrixJson(p.E)}, {"F", F}});
  }
  return out;
}

plant::ControllerFragility ParseFragility(const json& j, const std::string& where) {
  plant::ControllerFragility f;
  if (j.contains("A_c")) f.A = ParsePerturbations(j.at("A_c"), where + ".A_c");
  if (j.contains("B_c")) f.B = ParsePerturbations(j.at("B_c"), where + ".B_c");
  if (j.contains("C_c")) f.C = ParsePerturbations(j.at("C_c"), where + ".C_c");
  if (j.contains("D_c")) f.D = ParsePerturbations(j.at("D_c"), where + ".D_c");
  return f;
}

json FragilityJson(const plant::ControllerFragility& f) {
  json out = json::object();
  if (!f.A.empty()) out["A_c"] = PerturbationsJson(f.A);
  if (!f.B.empty()) out["B_c"] = PerturbationsJson(f.B);
  if (!f.C.empty()) out["C_c"] = PerturbationsJson(f.C);
  if (!f.D.empty()) out["D_c"] = PerturbationsJson(f.D);
  return out;
}

plant::MultiAgentSystem ParseSystem(const json& j) {
  const std::string w = "system";
  plant::MultiAgentSystem sys;
  sys.dynamics.A = ParseMatrix(Require(j, "A", w), "system.A");
  const json& B = Require(j, "B", w);
  sys.dynamics.B = ParseMatrixList(B, "system.B");
  sys.dynamics.C = ParseMatrix(Require(j, "C", w), "system.C");
  const json& q = Require(j, "q", w);
  if (!q.is_number()) throw ScenarioError("system.q: expected a number");
  sys.dynamics.q = q.get<double>();
  sys.graph = topology::DirectedGraph(ParseMatrix(Require(j, "adjacency", w), "system.adjacency"));

  if (j.contains("uncertainty") && !j.at("uncertainty").is_null()) {
    const json& u = j.at("uncertainty");
    const std::string uw = "system.uncertainty";
    Matrix R = ParseMatrix(Require(u, "R", uw), uw + ".R");
    Matrix N = ParseMatrix(Require(u, "N", uw), uw + ".N");
    Matrix J = ParseMatrix(Require(u, "J", uw), uw + ".J");
    if (u.contains("Z")) {
      sys.uncertainty = plant::UncertaintyModel::FromZ(std::move(R), std::move(N), std::move(J),
                                                       ParseMatrixList(u.at("Z"), uw + ".Z"));
    } else {
      sys.uncertainty = plant::UncertaintyModel::FromDelta(
          std::move(R), std::move(N), std::move(J),
          ParseMatrixList(Require(u, "delta", uw), uw + ".delta"));
    }
  }

  const json& nl = Require(j, "nonlinearity", w);
  const std::string name = Require(nl, "name", "system.nonlinearity").get<std::string>();
  if (name != "none") {
    const json& xi1 = Require(nl, "xi1", "system.nonlinearity");
    if (!xi1.is_number() || !(xi1.get<double>() > 0.0)) {
      throw ScenarioError("system.nonlinearity.xi1 must be a positive number");
    }
    try {
      sys.nonlinearity = plant::MakeNonlinearity(name, xi1.get<double>());
    } catch (const std::invalid_argument& e) {
      throw ScenarioError(std::string("system.nonlinearity: ") + e.what());
    }
  }
  return sys;
}

json SystemJson(const plant::MultiAgentSystem& sys) {
  json j;
  j["A"] = MatrixJson(sys.dynamics.A);
  j["B"] = MatrixListJson(sys.dynamics.B);
  j["C"] = MatrixJson(sys.dynamics.C);
  j["q"] = sys.dynamics.q;
  j["adjacency"] = MatrixJson(sys.graph.adjacency());
  if (sys.uncertainty) {
    const auto& u = *sys.uncertainty;
    json uj{{"R", MatrixJson(u.R)}, {"N", MatrixJson(u.N)}, {"J", MatrixJson(u.J)}};
    if (!u.Z.empty()) {
      uj["Z"] = MatrixListJson(u.Z);
    } else {
      uj["delta"] = MatrixListJson(u.delta);
    }
    j["uncertainty"] = uj;
  }
  if (sys.nonlinearity) {
    j["nonlinearity"] = {{"name", sys.nonlinearity->name}, {"xi1", sys.nonlinearity->xi1}};
  } else {
    j["nonlinearity"] = {{"name", "none"}};
  }
  return j;
}

plant::Perturbation Scalar(double D, double E, plant::FragilityAtom F) {
  plant::Perturbation p;
  p.D = Matrix::Constant(1, 1, D);
  p.E = Matrix::Constant(1, 1, E);
  p.F = {{F}};
  return p;
}

plant::FragilityAtom Sin(double freq, double gain = 1.0) { return {Kind::kSin, gain, freq, 0.0}; }
plant::FragilityAtom Cos(double freq, double gain = 1.0) { return {Kind::kCos, gain, freq, 0.0}; }
plant::FragilityAtom ZeroAtom() { return {}; }

plant::Perturbation Block(Matrix D, std::vector<std::vector<plant::FragilityAtom>> F, Matrix E) {
  plant::Perturbation p;
  p.D = std::move(D);
  p.E = std::move(E);
  p.F = std::move(F);
  return p;
}

}  // namespace

int Scenario::n_c() const {
  if (synthesize) return synthesize->n_c;
  if (fixed) return fixed->n_c;
  return 0;
}

std::optional<plant::ControllerFragility> Scenario::FragilityFor(int order) const {
  for (const auto& e : fragility) {
    if (e.n_c == order) return e.fragility;
  }
  return std::nullopt;
}

void Scenario::Validate() const {
  try {
    system.Validate();
  } catch (const std::exception& e) {
    throw ScenarioError(std::string("system: ") + e.what());
  }
  if (synthesize.has_value() == fixed.has_value()) {
    throw ScenarioError("controller: exactly one of 'synthesize' and 'fixed' is required");
  }
  const int N = system.agents();
  if (fixed) {
    try {
      fixed->Validate(N, system.dynamics.m(), system.dynamics.p());
    } catch (const std::exception& e) {
      throw ScenarioError(std::string("controller.fixed: ") + e.what());
    }
  }
  if (synthesize && synthesize->n_c < 0) throw ScenarioError("controller.synthesize.n_c must be >= 0");
  for (const auto& e : fragility) {
    plant::ControllerRealization probe = plant::ControllerRealization::Zero(
        N, e.n_c, system.dynamics.m(), system.dynamics.p());
    probe.fragility = e.fragility;
    try {
      probe.Validate(N, system.dynamics.m(), system.dynamics.p());
    } catch (const std::exception& ex) {
      throw ScenarioError("fragility (n_c = " + std::to_string(e.n_c) + "): " + ex.what());
    }
  }
  try {
    sim.Validate();
  } catch (const std::exception& e) {
    throw ScenarioError(std::string("sim: ") + e.what());
  }
  if (x0.size() != N * system.dynamics.n()) {
    throw ScenarioError("sim.x0 must hold agents * n = " + std::to_string(N * system.dynamics.n()) +
                        " entries");
  }
}

Scenario FromJson(const json& j) {
  if (!j.is_object()) throw ScenarioError("scenario: expected a JSON object");
  Scenario s;
  try {
    s.name = j.value("name", std::string("scenario"));
    s.system = ParseSystem(Require(j, "system", "scenario"));
    const int N = s.system.agents();
    const int m = s.system.dynamics.m(), p = s.system.dynamics.p();

    const json& c = Require(j, "controller", "scenario");
    if (c.contains("synthesize")) {
      const json& r = c.at("synthesize");
      SynthesisRequest req;
      req.method = synthesis::ParseMethod(r.value("method", std::string("theorem2")));
      req.n_c = r.value("n_c", 0);
      const std::string pi = r.value("pi_mode", std::string("weighted"));
      if (pi == "weighted") {
        req.pi_mode = synthesis::PiMode::kWeighted;
      } else if (pi == "literal") {
        req.pi_mode = synthesis::PiMode::kLiteral;
      } else {
        throw ScenarioError("controller.synthesize.pi_mode must be 'weighted' or 'literal'");
      }
      s.synthesize = req;
    }
    if (c.contains("fixed")) {
      const json& f = c.at("fixed");
      plant::ControllerRealization ctrl;
      ctrl.n_c = Require(f, "n_c", "controller.fixed").get<int>();
      const int nc = ctrl.n_c;
      const auto list = [&](const char* key, int rows, int cols) {
        if (!f.contains(key)) {
          if (nc == 0 && std::string(key) != "D_c") return std::vector<Matrix>(N, Matrix(rows, cols));
          throw ScenarioError(std::string("controller.fixed: missing field '") + key + "'");
        }
        return Reshape(ParseMatrixList(f.at(key), std::string("controller.fixed.") + key), rows, cols);
      };
      ctrl.A_c = list("A_c", nc, nc);
      ctrl.B_c = list("B_c", nc, p);
      ctrl.C_c = list("C_c", m, nc);
      ctrl.D_c = list("D_c", m, p);
      s.fixed = std::move(ctrl);
    }

    if (j.contains("fragility")) {
      const json& fr = j.at("fragility");
      if (!fr.is_array()) throw ScenarioError("fragility: expected a list of per-order entries");
      for (const auto& e : fr) {
        FragilityEntry entry;
        entry.n_c = Require(e, "n_c", "fragility").get<int>();
        entry.fragility = ParseFragility(e, "fragility");
        s.fragility.push_back(std::move(entry));
      }
    }

    const json& sim = Require(j, "sim", "scenario");
    s.sim.t_end = sim.value("t_end", 5.0);
    s.sim.dt = sim.value("dt", 1e-3);
    if (sim.contains("memory") && !sim.at("memory").is_null()) s.sim.memory = sim.at("memory").get<int>();
    s.sim.scheme = fracsim::ParseScheme(sim.value("scheme", std::string("grunwald-letnikov")));
    const json& x0 = Require(sim, "x0", "sim");
    if (!x0.is_array()) throw ScenarioError("sim.x0: expected a flat array");
    s.x0.resize(static_cast<Eigen::Index>(x0.size()));
    for (size_t i = 0; i < x0.size(); ++i) s.x0(static_cast<Eigen::Index>(i)) = x0[i].get<double>();

    if (j.contains("outputs")) s.output_dir = j.at("outputs").value("dir", s.output_dir);
  } catch (const ScenarioError&) {
    throw;
  } catch (const std::exception& e) {
    throw ScenarioError(std::string("scenario: ") + e.what());
  }
  s.Validate();
  return s;
}

json ToJson(const Scenario& s) {
  json j;
  j["name"] = s.name;
  j["system"] = SystemJson(s.system);
  json c = json::object();
  if (s.synthesize) {
    c["synthesize"] = {{"method", synthesis::MethodName(s.synthesize->method)},
                       {"n_c", s.synthesize->n_c},
                       {"pi_mode", s.synthesize->pi_mode == synthesis::PiMode::kWeighted
                                       ? "weighted"
                                       : "literal"}};
  }
  if (s.fixed) {
    c["fixed"] = {{"n_c", s.fixed->n_c},
                  {"A_c", MatrixListJson(s.fixed->A_c)},
                  {"B_c", MatrixListJson(s.fixed->B_c)},
                  {"C_c", MatrixListJson(s.fixed->C_c)},
                  {"D_c", MatrixListJson(s.fixed->D_c)}};
  }
  j["controller"] = c;
  if (!s.fragility.empty()) {
    json fr = json::array();
    for (const auto& e : s.fragility) {
      json entry = FragilityJson(e.fragility);
      entry["n_c"] = e.n_c;
      fr.push_back(entry);
    }
    j["fragility"] = fr;
  }
  json sim{{"t_end", s.sim.t_end},
           {"dt", s.sim.dt},
           {"scheme", fracsim::SchemeName(s.sim.scheme)},
           {"x0", std::vector<double>(s.x0.data(), s.x0.data() + s.x0.size())}};
  sim["memory"] = s.sim.memory ? json(*s.sim.memory) : json(nullptr);
  j["sim"] = sim;
  j["outputs"] = {{"dir", s.output_dir}};
  return j;
}

Scenario Load(const std::string& path_or_name) {
  if (!std::filesystem::exists(path_or_name)) {
    if (auto b = Builtin(path_or_name)) return *b;
    throw ScenarioError("no scenario file or built-in scenario named '" + path_or_name + "'");
  }
  std::ifstream in(path_or_name);
  if (!in) throw ScenarioError("cannot read '" + path_or_name + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ScenarioError("'" + path_or_name + "' is not valid JSON: " + e.what());
  }
  return FromJson(j);
}

void Save(const Scenario& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << ToJson(s).dump(2) << "\n";
}

plant::MultiAgentSystem PmsmSystem(double xi1) {
  plant::MultiAgentSystem s;
  s.dynamics.A = FromRows({{0, 1}, {-1282, -124.3}});
  s.dynamics.B.assign(3, FromRows({{0}, {6.28}}));
  s.dynamics.C = FromRows({{1, 0}});
  s.dynamics.q = 0.87;
  std::vector<Matrix> delta;
  for (int i = 1; i <= 3; ++i) delta.push_back(Matrix::Constant(1, 1, std::sin(i * M_PI / 6.0)));
  s.uncertainty = plant::UncertaintyModel::FromDelta(FromRows({{0.3}, {0}}), FromRows({{-0.6, 0.5}}),
                                                     Matrix::Ones(1, 1), std::move(delta));
  s.nonlinearity = plant::MakeNonlinearity("pmsm_sin", xi1);
  s.graph = topology::DirectedGraph(FromRows({{0, 1, 0}, {0, 0, 1}, {1, 0, 0}}));
  return s;
}

plant::MultiAgentSystem NumericSystem() {
  plant::MultiAgentSystem s;
  s.dynamics.A = FromRows({{-1, 1, 0, 0}, {1, -3, 0, 1}, {0, 0, 0, 1}, {0, 0, -1, 0}});
  s.dynamics.B.assign(4, FromRows({{1}, {1}, {0}, {1}}));
  s.dynamics.C = FromRows({{1, 0, 1, 0}});
  s.dynamics.q = 0.8;
  std::vector<Matrix> delta;
  for (double v : {0.5, -0.4, 0.1, 0.8}) delta.push_back(Matrix::Constant(1, 1, v));
  s.uncertainty = plant::UncertaintyModel::FromDelta(FromRows({{0.2}, {0}, {-0.1}, {0.3}}),
                                                     FromRows({{0, 0.2, 0.4, -0.2}}),
                                                     Matrix::Ones(1, 1), std::move(delta));
  s.graph = topology::DirectedGraph(
      FromRows({{0, 1, 0, 1}, {1, 0, 1, 0}, {0, 1, 0, 1}, {1, 0, 1, 0}}));
  return s;
}

plant::ControllerRealization PmsmPublishedController(int n_c) {
  const auto scalars = [](std::initializer_list<double> v) {
    std::vector<Matrix> out;
    for (double x : v) out.push_back(Matrix::Constant(1, 1, x));
    return out;
  };
  switch (n_c) {
    case 0:
      return plant::ControllerRealization::Static(scalars({-105.33, -59.70, -59.95}), 1);
    case 1: {
      plant::ControllerRealization c;
      c.n_c = 1;
      c.A_c = scalars({-57.45, -66.14, -22.43});
      c.B_c = scalars({16.28, 3.54, 11.03});
      c.C_c = scalars({-15.26, -7.45, -3.14});
      c.D_c = scalars({-83.74, -45.31, -45.82});
      return c;
    }
    case 2: {
      plant::ControllerRealization c;
      c.n_c = 2;
      c.A_c = {FromRows({{-50.58, -34.24}, {-34.29, -78.37}}),
               FromRows({{-61.71, -42.54}, {-42.17, -84.95}}),
               FromRows({{-42.05, -23.86}, {-23.85, -62.63}})};
      c.B_c = {FromRows({{13.33}, {16.95}}), FromRows({{9.33}, {3.03}}), FromRows({{15.34}, {10.30}})};
      c.C_c = {FromRows({{-50.75, -18.36}}), FromRows({{-16.74, -40.21}}),
               FromRows({{-38.32, -11.84}})};
      c.D_c = scalars({-74.25, -53.82, -51.79});
      return c;
    }
    default:
      throw std::invalid_argument("published PMSM controllers exist for n_c = 0, 1, 2 only");
  }
}

plant::ControllerFragility PmsmFragility(int n_c) {
  plant::ControllerFragility f;
  if (n_c == 0 || n_c == 1) {
    f.D = {Scalar(0.7, 0.4, Cos(2)), Scalar(0.7, 0.4, Sin(1)), Scalar(-0.1, 0.6, Sin(1))};
    if (n_c == 0) return f;
    f.A = {Scalar(0.2, 0.4, Sin(1)), Scalar(-0.4, 0.9, Cos(3, 0.5)), Scalar(0.9, -0.1, Cos(1, -1))};
    f.B = {Scalar(0.2, 0.7, Cos(3)), Scalar(0.4, 0.0, Sin(1)), Scalar(-0.5, -0.2, Cos(1, 0.2))};
    f.C = {Scalar(0.4, 0.3, Sin(0.5)), Scalar(-0.1, -0.4, Cos(1)), Scalar(0.8, 0.5, Cos(1))};
    return f;
  }
  if (n_c != 2) throw std::invalid_argument("published PMSM fragility exists for n_c = 0, 1, 2 only");
  const auto diag2 = [](plant::FragilityAtom a, plant::FragilityAtom b) {
    return std::vector<std::vector<plant::FragilityAtom>>{{a, ZeroAtom()}, {ZeroAtom(), b}};
  };
  f.A = {Block(FromRows({{3.5, 1.9}, {4.6, 8.6}}), diag2(Sin(0.1), Cos(5)),
               FromRows({{3.8, 5.1}, {0.8, 5.2}})),
         Block(FromRows({{8.9, 7.8}, {9.6, 8.1}}), diag2(Sin(0.3), Sin(0.1)),
               FromRows({{0.8, 0.5}, {0.4, 0.5}})),
         Block(FromRows({{0, 2.4}, {5.1, 0}}), diag2(Cos(0.4), Sin(0.1)),
               FromRows({{0.9, 0}, {0.1, 0.2}}))};
  f.B = {Block(FromRows({{9}, {10}}), {{Sin(1)}}, FromRows({{0.2}})),
         Block(FromRows({{2.4}, {9.5}}), {{Cos(1)}}, FromRows({{0.6}})),
         Block(FromRows({{7.1}, {9.3}}), {{Sin(1)}}, FromRows({{0.5}}))};
  f.C = {Block(FromRows({{5.8}}), {{Sin(1)}}, FromRows({{3.2, 5.1}})),
         Block(FromRows({{8.8}}), {{Cos(1)}}, FromRows({{0.4, 0}})),
         Block(FromRows({{6}}), {{Sin(1)}}, FromRows({{-0.4, -0.5}}))};
  f.D = {Scalar(7.2, 1.3, Sin(0.5)), Scalar(6.4, 0.7, Cos(10)), Scalar(2.8, 3.2, Sin(0.1))};
  return f;
}

// Small disagreement keeps |u| near the range where the Lipschitz bound was
// sampled; larger offsets let sin(x2 u) trap agents in spurious equilibria.
Vector PmsmInitialState() {
  Vector x0(6);
  x0 << 0.010, 0.0, -0.005, 0.003, 0.002, -0.004;
  return x0;
}

Vector NumericInitialState() {
  Vector x0(16);
  x0 << 1.0, 0.0, -1.0, 0.5, -0.5, 1.0, 0.3, -0.2, 0.8, -0.6, 0.0, 1.0, -1.0, 0.2, 0.5, -0.5;
  return x0;
}

std::vector<std::string> BuiltinNames() {
  return {"pmsm", "numeric", "pmsm-fixed-0", "pmsm-fixed-1", "pmsm-fixed-2"};
}

std::optional<Scenario> Builtin(const std::string& name) {
  Scenario s;
  s.name = name;
  if (name == "pmsm" || name.rfind("pmsm-fixed-", 0) == 0) {
    s.system = PmsmSystem();
    for (int k = 0; k <= 2; ++k) s.fragility.push_back({k, PmsmFragility(k)});
    s.x0 = PmsmInitialState();
    if (name == "pmsm") {
      s.synthesize = SynthesisRequest{synthesis::Method::kTheorem2, 1, synthesis::PiMode::kWeighted};
    } else {
      const std::string order = name.substr(std::string("pmsm-fixed-").size());
      if (order != "0" && order != "1" && order != "2") return std::nullopt;
      s.fixed = PmsmPublishedController(std::stoi(order));
    }
  } else if (name == "numeric") {
    s.system = NumericSystem();
    s.synthesize = SynthesisRequest{synthesis::Method::kCorollary1, 1, synthesis::PiMode::kWeighted};
    s.x0 = NumericInitialState();
  } else {
    return std::nullopt;
  }
  s.Validate();
  return s;
}

}  // namespace scenario
}  // namespace fomas
