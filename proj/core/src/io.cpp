#include "regime_riccati/io.hpp"

#include <fstream>
#include <sstream>

namespace regime_riccati {

namespace {

[[noreturn]] void parse_error(const std::string& what) { throw Error(ErrorCode::Parse, what); }

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) parse_error(std::string("missing field '") + key + "'");
  return j.at(key);
}

RegimeFamily family_or_zeros(const Json& j, const char* key, int L, Index rows, Index cols) {
  if (!j.contains(key) || j.at(key).is_null()) return RegimeFamily::zeros(L, rows, cols);
  return family_from_json(j.at(key), rows, cols);
}

CostBlock cost_from_json(const Json& j, int L, int n, int m1, int m2) {
  if (!j.is_object()) parse_error("cost block must be an object");
  CostBlock c;
  c.Q = family_from_json(field(j, "Q"), n, n);
  c.S1 = family_or_zeros(j, "S1", L, m1, n);
  c.S2 = family_or_zeros(j, "S2", L, m2, n);
  c.R11 = family_from_json(field(j, "R11"), m1, m1);
  c.R12 = family_or_zeros(j, "R12", L, m1, m2);
  c.R22 = family_from_json(field(j, "R22"), m2, m2);
  return c;
}

Json cost_to_json(const CostBlock& c) {
  return Json{{"Q", to_json(c.Q)},     {"S1", to_json(c.S1)},   {"S2", to_json(c.S2)},
              {"R11", to_json(c.R11)}, {"R12", to_json(c.R12)}, {"R22", to_json(c.R22)}};
}

/// Zero-sum documents give one family per linear term; others give a pair.
void read_player_terms(const Json& j, const char* key, bool zeroSum, int L, Index rows,
                       std::array<RegimeFamily, 2>& out) {
  if (!j.contains(key)) {
    out = {RegimeFamily::zeros(L, rows, 1), RegimeFamily::zeros(L, rows, 1)};
    return;
  }
  const Json& v = j.at(key);
  if (zeroSum) {
    out[0] = family_from_json(v, rows, 1);
    out[1] = -out[0];
    return;
  }
  if (!v.is_array() || v.size() != 2) parse_error(std::string("'") + key + "' must list both players");
  out[0] = family_from_json(v[0], rows, 1);
  out[1] = family_from_json(v[1], rows, 1);
}

Json estimate_json(const Estimate& e) { return Json{{"mean", e.mean}, {"se", e.se}}; }

Json residual_pairs(const std::vector<std::array<double, 2>>& v) {
  Json out = Json::array();
  for (const auto& p : v) out.push_back(Json::array({p[0], p[1]}));
  return out;
}

}  // namespace

Json to_json(const Matrix& m) {
  Json out = Json::array();
  if (m.cols() == 1) {
    for (Index r = 0; r < m.rows(); ++r) out.push_back(m(r, 0));
    return out;
  }
  for (Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(std::move(row));
  }
  return out;
}

Matrix matrix_from_json(const Json& j, Index rows, Index cols) {
  if (!j.is_array()) parse_error("matrix must be an array");
  if (j.empty()) {
    if (rows >= 0 && cols >= 0 && rows * cols == 0) return Matrix::Zero(rows, cols);
    if (rows == 0 || cols == 0) return Matrix::Zero(std::max<Index>(rows, 0), std::max<Index>(cols, 0));
    parse_error("empty matrix where entries were expected");
  }
  if (j.front().is_number()) {
    Matrix out(static_cast<Index>(j.size()), 1);
    for (std::size_t r = 0; r < j.size(); ++r) {
      if (!j[r].is_number()) parse_error("matrix entries must be numbers");
      out(static_cast<Index>(r), 0) = j[r].get<double>();
    }
    if (rows == 1 && cols > 1 && cols == out.rows()) return out.transpose();
    return out;
  }
  const auto r = static_cast<Index>(j.size());
  if (!j.front().is_array()) parse_error("matrix rows must be arrays");
  const auto c = static_cast<Index>(j.front().size());
  Matrix out(r, c);
  for (Index i = 0; i < r; ++i) {
    const Json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != c) parse_error("ragged matrix rows");
    for (Index k = 0; k < c; ++k) {
      const Json& x = row[static_cast<std::size_t>(k)];
      if (!x.is_number()) parse_error("matrix entries must be numbers");
      out(i, k) = x.get<double>();
    }
  }
  return out;
}

Json to_json(const RegimeFamily& f) {
  Json out = Json::array();
  for (const auto& m : f) out.push_back(to_json(m));
  return out;
}

RegimeFamily family_from_json(const Json& j, Index rows, Index cols) {
  if (!j.is_array()) parse_error("matrix family must be an array of matrices");
  std::vector<Matrix> mats;
  for (const auto& m : j) mats.push_back(matrix_from_json(m, rows, cols));
  for (std::size_t i = 1; i < mats.size(); ++i) {
    if (mats[i].rows() != mats[0].rows() || mats[i].cols() != mats[0].cols()) {
      throw Error(ErrorCode::ShapeMismatch, "matrix family mixes shapes");
    }
  }
  return RegimeFamily(std::move(mats));
}

GameModel model_from_json(const Json& j) {
  try {
    if (!j.is_object()) parse_error("model document must be an object");
    const int n = field(j, "n").get<int>();
    const int m1 = field(j, "m1").get<int>();
    const int m2 = field(j, "m2").get<int>();
    Dynamics d;
    d.n = n;
    d.m1 = m1;
    d.m2 = m2;
    d.A = family_from_json(field(j, "A"), n, n);
    const int L = d.A.size();
    if (j.contains("L") && j.at("L").get<int>() != L) {
      throw Error(ErrorCode::ShapeMismatch, "field L disagrees with the number of A matrices");
    }
    d.B1 = family_from_json(field(j, "B1"), n, m1);
    d.B2 = family_from_json(field(j, "B2"), n, m2);
    d.C = family_from_json(field(j, "C"), n, n);
    d.D1 = family_from_json(field(j, "D1"), n, m1);
    d.D2 = family_from_json(field(j, "D2"), n, m2);
    Generator gen{matrix_from_json(field(j, "generator"), L, L)};

    const CostBlock cost1 = cost_from_json(field(j, "cost1"), L, n, m1, m2);
    bool zeroSum = !j.contains("cost2");
    if (j.contains("kind")) {
      const std::string kind = j.at("kind").get<std::string>();
      if (kind == "zero-sum") {
        zeroSum = true;
      } else if (kind != "non-zero-sum") {
        parse_error("kind must be 'zero-sum' or 'non-zero-sum'");
      }
    }

    std::optional<Inhomogeneity> inh;
    if (j.contains("inhomogeneity") && !j.at("inhomogeneity").is_null()) {
      const Json& h = j.at("inhomogeneity");
      Inhomogeneity x;
      x.lambda = field(h, "lambda").get<double>();
      x.bBar = family_or_zeros(h, "bBar", L, n, 1);
      x.sigmaBar = family_or_zeros(h, "sigmaBar", L, n, 1);
      read_player_terms(h, "qBar", zeroSum, L, n, x.qBar);
      read_player_terms(h, "rho1Bar", zeroSum, L, m1, x.rho1Bar);
      read_player_terms(h, "rho2Bar", zeroSum, L, m2, x.rho2Bar);
      inh = std::move(x);
    }

    if (zeroSum && !j.contains("cost2")) return embed_zero_sum(std::move(d), std::move(gen), cost1, inh);
    GameModel model;
    model.dynamics = std::move(d);
    model.generator = std::move(gen);
    model.cost1 = cost1;
    model.cost2 = cost_from_json(field(j, "cost2"), L, n, m1, m2);
    model.inhomogeneity = std::move(inh);
    model.kind = zeroSum ? GameKind::ZeroSum : GameKind::NonZeroSum;
    return model;
  } catch (const Json::exception& e) {
    parse_error(e.what());
  }
}

Json model_to_json(const GameModel& model) {
  const Dynamics& d = model.dynamics;
  const bool zeroSum = model.kind == GameKind::ZeroSum;
  Json j{{"kind", zeroSum ? "zero-sum" : "non-zero-sum"},
         {"n", d.n},
         {"m1", d.m1},
         {"m2", d.m2},
         {"L", d.regimes()},
         {"generator", to_json(model.generator.pi)},
         {"A", to_json(d.A)},
         {"B1", to_json(d.B1)},
         {"B2", to_json(d.B2)},
         {"C", to_json(d.C)},
         {"D1", to_json(d.D1)},
         {"D2", to_json(d.D2)},
         {"cost1", cost_to_json(model.cost1)}};
  if (!zeroSum) j["cost2"] = cost_to_json(model.cost2);
  if (model.inhomogeneity) {
    const Inhomogeneity& h = *model.inhomogeneity;
    Json hj{{"lambda", h.lambda}, {"bBar", to_json(h.bBar)}, {"sigmaBar", to_json(h.sigmaBar)}};
    if (zeroSum) {
      hj["qBar"] = to_json(h.qBar[0]);
      hj["rho1Bar"] = to_json(h.rho1Bar[0]);
      hj["rho2Bar"] = to_json(h.rho2Bar[0]);
    } else {
      hj["qBar"] = Json::array({to_json(h.qBar[0]), to_json(h.qBar[1])});
      hj["rho1Bar"] = Json::array({to_json(h.rho1Bar[0]), to_json(h.rho1Bar[1])});
      hj["rho2Bar"] = Json::array({to_json(h.rho2Bar[0]), to_json(h.rho2Bar[1])});
    }
    j["inhomogeneity"] = std::move(hj);
  }
  return j;
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    parse_error(path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << j.dump(2) << "\n";
  if (!out) throw Error(ErrorCode::Io, "failed writing " + path.string());
}

GameModel load_model(const std::filesystem::path& path) { return model_from_json(read_json_file(path)); }

Json to_json(const ValidationReport& r) {
  Json v = Json::array();
  for (const auto& x : r.violations) v.push_back(Json{{"kind", x.kind}, {"message", x.message}});
  return Json{{"ok", r.ok()}, {"violations", v}};
}

Json to_json(const ResidualReport& r) {
  return Json{{"equation", residual_pairs(r.equation)},
              {"constraint", residual_pairs(r.constraint)},
              {"maxEquation", r.maxEquation},
              {"maxConstraint", r.maxConstraint}};
}

Json to_json(const NonSymCareSolution& s) {
  return Json{{"mode", "open-rep"},         {"P1", to_json(s.P1)},
              {"P2", to_json(s.P2)},        {"Theta", to_json(s.Theta)},
              {"Sigma", to_json(s.Sigma)},  {"sigmaCondition", s.sigmaCondition},
              {"residual", s.residual},     {"iterations", s.iterations}};
}

Json to_json(const SymCareSolution& s) {
  return Json{{"mode", "closed-nash"},        {"P1", to_json(s.P1)},         {"P2", to_json(s.P2)},
              {"Theta1", to_json(s.Theta1)},  {"Theta2", to_json(s.Theta2)}, {"Theta", to_json(s.Theta)},
              {"n11Min", s.n11Min},           {"n22Min", s.n22Min},          {"residual", s.residual},
              {"iterations", s.iterations}};
}

Json to_json(const ZeroSumCareSolution& s) {
  return Json{{"mode", "zero-sum"},  {"P", to_json(s.P)},         {"Theta", to_json(s.Theta)},
              {"residual", s.residual}, {"iterations", s.iterations}, {"n11Ok", s.n11Ok},
              {"n22Ok", s.n22Ok},    {"rangeOk", s.rangeOk},      {"signOk", s.signOk()}};
}

Json to_json(const StrategyPair& s) {
  Json j{{"Theta", to_json(s.Theta)}};
  if (s.nu) j["nu"] = Json{{"lambda", s.nu->lambda}, {"nuBar", to_json(s.nu->nuBar)}};
  return j;
}

Json to_json(const EtaSolution& e) {
  Json fams = Json::array();
  for (const auto& f : e.etaBar) fams.push_back(to_json(f));
  return Json{{"lambda", e.lambda}, {"etaBar", fams}, {"residual", e.residual}};
}

Json to_json(const Decoupling& d) {
  Json j{{"P", Json::array({to_json(d.P[0]), to_json(d.P[1])})}, {"lambda", d.lambda}};
  if (d.etaBar) j["etaBar"] = Json::array({to_json((*d.etaBar)[0]), to_json((*d.etaBar)[1])});
  return j;
}

Json to_json(const StabilityVerdict& v) {
  return Json{{"method", to_string(v.method)}, {"stable", v.stable}, {"witness", v.witness}};
}

Json to_json(const StabilizerVerdict& v) {
  return Json{{"stable", v.stable()},
              {"spectral", to_json(v.spectral)},
              {"dissipativity", to_json(v.dissipativity)}};
}

Json to_json(const ConvexityConcavity& c) {
  return Json{{"ok", c.ok},       {"mQ", c.mQ},       {"MQ", c.MQ},   {"mR", c.mR},  {"MR", c.MR},
              {"Meps1", c.Meps1}, {"Meps2", c.Meps2}, {"mu1", c.mu1}, {"mu2", c.mu2}};
}

Json to_json(const SimReport& r) {
  Json j{{"cost", Json::array({estimate_json(r.cost[0]), estimate_json(r.cost[1])})},
         {"l2Norm", estimate_json(r.l2Norm)},
         {"tailMass", estimate_json(r.tailMass)},
         {"seed", r.seed},
         {"paths", r.paths},
         {"dt", r.dt},
         {"T", r.T},
         {"antithetic", r.antithetic}};
  j["stationarityResidual"] = r.stationarityResidual ? Json(*r.stationarityResidual) : Json(nullptr);
  return j;
}

StrategyPair strategy_from_json(const Json& doc) {
  try {
    const Json& j = doc.contains("strategy") ? doc.at("strategy") : doc;
    StrategyPair s;
    s.Theta = family_from_json(field(j, "Theta"));
    if (j.contains("nu") && !j.at("nu").is_null()) {
      const Json& nu = j.at("nu");
      Offset offset;
      offset.lambda = field(nu, "lambda").get<double>();
      offset.nuBar = family_from_json(field(nu, "nuBar"), s.Theta.rows(), 1);
      s.nu = std::move(offset);
    }
    return s;
  } catch (const Json::exception& e) {
    parse_error(e.what());
  }
}

Decoupling decoupling_from_json(const Json& doc) {
  try {
    const Json& j = doc.contains("decoupling") ? doc.at("decoupling") : doc;
    const Json& P = field(j, "P");
    if (!P.is_array() || P.size() != 2) parse_error("decoupling needs two P families");
    Decoupling d;
    d.P = {family_from_json(P[0]), family_from_json(P[1])};
    d.lambda = j.value("lambda", 0.0);
    if (j.contains("etaBar") && !j.at("etaBar").is_null()) {
      const Json& e = j.at("etaBar");
      if (!e.is_array() || e.size() != 2) parse_error("decoupling needs two eta families");
      d.etaBar = std::array<RegimeFamily, 2>{family_from_json(e[0], d.P[0].rows(), 1),
                                             family_from_json(e[1], d.P[0].rows(), 1)};
    }
    return d;
  } catch (const Json::exception& e) {
    parse_error(e.what());
  }
}

}  // namespace regime_riccati
