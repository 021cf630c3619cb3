#include "beamlink/model_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace beamlink {

namespace {

using json = nlohmann::ordered_json;

json vec_to_json(const Vec3& v) { return json::array({v(0), v(1), v(2)}); }

Vec3 vec_from_json(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) throw ModelError(std::string(what) + ": expected 3 numbers");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

json triad_to_json(const Mat3& m) {
  json rows = json::array();
  for (int r = 0; r < 3; ++r) rows.push_back(json::array({m(r, 0), m(r, 1), m(r, 2)}));
  return rows;
}

Mat3 triad_from_json(const json& j) {
  if (!j.is_array() || j.size() != 3) throw ModelError("triad: expected 3 rows");
  Mat3 m;
  for (int r = 0; r < 3; ++r) {
    const Vec3 row = vec_from_json(j[r], "triad row");
    m.row(r) = row.transpose();
  }
  return m;
}

const char* ramp_name(Ramp r) { return r == Ramp::kLinear ? "linear" : "hold_from_first"; }

Ramp ramp_from_name(const std::string& s) {
  if (s == "linear") return Ramp::kLinear;
  if (s == "hold_from_first") return Ramp::kHoldFromFirst;
  throw ModelError("unknown ramp '" + s + "'");
}

const char* enforcement_name(Enforcement e) {
  return e == Enforcement::kLagrange ? "lagrange" : "penalty";
}

Enforcement enforcement_from_name(const std::string& s) {
  if (s == "lagrange") return Enforcement::kLagrange;
  if (s == "penalty") return Enforcement::kPenalty;
  throw ModelError("unknown enforcement '" + s + "'");
}

}  // namespace

Model parse_model(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const std::exception& e) {
    throw ModelError(std::string("model document is not valid JSON: ") + e.what());
  }

  Model m;
  try {
    for (const auto& j : doc.value("materials", json::array())) {
      Material mat;
      mat.id = j.at("id").get<int>();
      mat.E = j.at("E").get<double>();
      mat.nu = j.at("nu").get<double>();
      mat.R = j.at("R").get<double>();
      mat.shear_area_factor = j.value("shear_area_factor", 1.0);
      m.materials.push_back(mat);
    }
    for (const auto& j : doc.value("nodes", json::array())) {
      ModelNode n;
      n.id = j.at("id").get<int>();
      n.x = vec_from_json(j.at("x"), "node position");
      if (j.contains("triad")) {
        n.triad = triad_from_json(j.at("triad"));
        n.has_triad = true;
      }
      m.nodes.push_back(n);
    }
    for (const auto& j : doc.value("elements", json::array())) {
      ElementSpec e;
      e.id = j.at("id").get<int>();
      e.material = j.at("material").get<int>();
      for (const auto& nid : j.at("nodes")) e.node_ids.push_back(nid.get<int>());
      m.element_specs.push_back(e);
    }
    for (const auto& j : doc.value("couplings", json::array())) {
      CouplingSpec c;
      const auto& elems = j.at("elements");
      if (!elems.is_array() || elems.size() != 2)
        throw ModelError("coupling: expected two element ids");
      c.elem_a = elems[0].get<int>();
      c.elem_b = elems[1].get<int>();
      const auto& xi = j.at("xi");
      if (xi.is_string() && xi.get<std::string>() == "auto") {
        c.auto_xi = true;
      } else if (xi.is_array() && xi.size() == 2) {
        c.xi_a = xi[0].get<double>();
        c.xi_b = xi[1].get<double>();
      } else {
        throw ModelError("coupling: xi must be \"auto\" or [xi_a, xi_b]");
      }
      c.enforcement = enforcement_from_name(j.value("enforcement", std::string("lagrange")));
      c.penalty_scale = j.value("penalty_scale", 1000.0);
      m.couplings.push_back(c);
    }
    for (const auto& j : doc.value("merges", json::array())) {
      if (!j.is_array() || j.size() != 2) throw ModelError("merge: expected two node ids");
      m.merges.push_back({j[0].get<int>(), j[1].get<int>()});
    }
    for (const auto& j : doc.value("dirichlet", json::array())) {
      DirichletBC bc;
      bc.node = j.at("node").get<int>();
      const auto& mask = j.at("mask");
      if (!mask.is_array() || mask.size() != 6) throw ModelError("dirichlet: mask needs 6 flags");
      for (int c = 0; c < 6; ++c) bc.mask[c] = mask[c].get<int>() != 0;
      if (j.contains("u")) bc.u = vec_from_json(j.at("u"), "dirichlet u");
      if (j.contains("theta")) bc.theta = vec_from_json(j.at("theta"), "dirichlet theta");
      bc.ramp = ramp_from_name(j.value("ramp", std::string("linear")));
      m.dirichlet.push_back(bc);
    }
    for (const auto& j : doc.value("loads", json::array())) {
      PointLoad l;
      l.node = j.at("node").get<int>();
      if (j.contains("force")) l.force = vec_from_json(j.at("force"), "load force");
      if (j.contains("moment")) l.moment = vec_from_json(j.at("moment"), "load moment");
      l.ramp = ramp_from_name(j.value("ramp", std::string("linear")));
      m.loads.push_back(l);
    }
    if (doc.contains("solve")) {
      const auto& j = doc.at("solve");
      m.settings.load_steps = j.value("load_steps", 10);
      m.settings.newton_tol = j.value("newton_tol", 1e-10);
      m.settings.newton_max_iter = j.value("newton_max_iter", 25);
      m.settings.step_cut_allowed = j.value("step_cut", true);
    }
    m.monitor_node = doc.value("monitor_node", -1);
  } catch (const json::exception& e) {
    throw ModelError(std::string("model document: ") + e.what());
  }
  return m;
}

std::string serialize_model(const Model& m) {
  json doc;
  doc["materials"] = json::array();
  for (const auto& mat : m.materials) {
    json j;
    j["id"] = mat.id;
    j["E"] = mat.E;
    j["nu"] = mat.nu;
    j["R"] = mat.R;
    if (mat.shear_area_factor != 1.0) j["shear_area_factor"] = mat.shear_area_factor;
    doc["materials"].push_back(j);
  }
  doc["nodes"] = json::array();
  for (const auto& n : m.nodes) {
    json j;
    j["id"] = n.id;
    j["x"] = vec_to_json(n.x);
    if (n.has_triad) j["triad"] = triad_to_json(n.triad);
    doc["nodes"].push_back(j);
  }
  doc["elements"] = json::array();
  for (const auto& e : m.element_specs) {
    json j;
    j["id"] = e.id;
    j["material"] = e.material;
    j["nodes"] = e.node_ids;
    doc["elements"].push_back(j);
  }
  if (!m.couplings.empty()) {
    doc["couplings"] = json::array();
    for (const auto& c : m.couplings) {
      json j;
      j["elements"] = json::array({c.elem_a, c.elem_b});
      if (c.auto_xi)
        j["xi"] = "auto";
      else
        j["xi"] = json::array({c.xi_a, c.xi_b});
      j["enforcement"] = enforcement_name(c.enforcement);
      if (c.enforcement == Enforcement::kPenalty) j["penalty_scale"] = c.penalty_scale;
      doc["couplings"].push_back(j);
    }
  }
  if (!m.merges.empty()) {
    doc["merges"] = json::array();
    for (const auto& pair : m.merges) doc["merges"].push_back(json::array({pair[0], pair[1]}));
  }
  doc["dirichlet"] = json::array();
  for (const auto& bc : m.dirichlet) {
    json j;
    j["node"] = bc.node;
    json mask = json::array();
    for (int c = 0; c < 6; ++c) mask.push_back(bc.mask[c] ? 1 : 0);
    j["mask"] = mask;
    if (bc.u.norm() != 0.0) j["u"] = vec_to_json(bc.u);
    if (bc.theta.norm() != 0.0) j["theta"] = vec_to_json(bc.theta);
    if (bc.ramp != Ramp::kLinear) j["ramp"] = ramp_name(bc.ramp);
    doc["dirichlet"].push_back(j);
  }
  doc["loads"] = json::array();
  for (const auto& l : m.loads) {
    json j;
    j["node"] = l.node;
    if (l.force.norm() != 0.0) j["force"] = vec_to_json(l.force);
    if (l.moment.norm() != 0.0) j["moment"] = vec_to_json(l.moment);
    if (l.ramp != Ramp::kLinear) j["ramp"] = ramp_name(l.ramp);
    doc["loads"].push_back(j);
  }
  doc["solve"] = {{"load_steps", m.settings.load_steps},
                  {"newton_tol", m.settings.newton_tol},
                  {"newton_max_iter", m.settings.newton_max_iter},
                  {"step_cut", m.settings.step_cut_allowed}};
  if (m.monitor_node >= 0) doc["monitor_node"] = m.monitor_node;
  return doc.dump(2) + "\n";
}

Model load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open model file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  Model m = parse_model(buffer.str());
  m.build();
  return m;
}

void save_model_file(const Model& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ModelError("cannot write model file '" + path + "'");
  out << serialize_model(m);
}

}  // namespace beamlink
