#include "centerward/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "centerward/errors.hpp"

namespace centerward {
namespace {

void write_string(const std::string& s, std::ostream& out) {
  // nlohmann handles escaping of a bare string.
  out << nlohmann::json(s).dump();
}

void write_value(const nlohmann::json& j, std::ostream& out, int depth) {
  const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
  const std::string close(static_cast<std::size_t>(2 * depth), ' ');
  switch (j.type()) {
    case nlohmann::json::value_t::object: {
      if (j.empty()) {
        out << "{}";
        return;
      }
      out << "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out << ",\n";
        first = false;
        out << pad;
        write_string(it.key(), out);
        out << ": ";
        write_value(it.value(), out, depth + 1);
      }
      out << '\n' << close << '}';
      return;
    }
    case nlohmann::json::value_t::array: {
      if (j.empty()) {
        out << "[]";
        return;
      }
      // Short numeric rows (points) stay on one line.
      const bool flat = j.size() <= 3 && std::all_of(j.begin(), j.end(), [](const auto& v) { return v.is_primitive(); });
      if (flat) {
        out << '[';
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) out << ", ";
          write_value(j[i], out, depth + 1);
        }
        out << ']';
        return;
      }
      out << "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out << ",\n";
        out << pad;
        write_value(j[i], out, depth + 1);
      }
      out << '\n' << close << ']';
      return;
    }
    case nlohmann::json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) {
        out << "null";
        return;
      }
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", v);
      std::string s = buf;
      if (s.find_first_of(".eE") == std::string::npos) s += ".0";
      out << s;
      return;
    }
    case nlohmann::json::value_t::string:
      write_string(j.get_ref<const std::string&>(), out);
      return;
    default:
      out << j.dump();
  }
}

std::vector<double> vec_of(Vec2 v) { return {v.x, v.y}; }

Vec2 vec2_from(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 2) throw ConfigError("expected a 2-vector");
  return {j[0].get<double>(), j[1].get<double>()};
}

nlohmann::json points_json(const PointSet& p) {
  nlohmann::json a = nlohmann::json::array();
  for (std::size_t i = 0; i < p.size(); ++i) a.push_back(std::vector<double>(p[i].begin(), p[i].end()));
  return a;
}

PointSet points_from(const nlohmann::json& a, int d) {
  PointSet p(d, 0);
  for (const auto& row : a) {
    const auto v = row.get<std::vector<double>>();
    if (static_cast<int>(v.size()) != d) throw ConfigError("point of the wrong dimension");
    p.push_back(v);
  }
  return p;
}

}  // namespace

const char* version_string() { return CENTERWARD_VERSION_STRING; }

void write_json(const nlohmann::json& j, std::ostream& out) {
  write_value(j, out, 0);
  out << '\n';
}

std::string to_json_string(const nlohmann::json& j) {
  std::ostringstream s;
  write_json(j, s);
  return s.str();
}

std::string config_hash(const nlohmann::json& j) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : to_json_string(j)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

nlohmann::json to_json(const Contour& c) {
  nlohmann::json j;
  j["r"] = c.r;
  j["M"] = c.vertices.size();
  j["closed"] = c.closed;
  j["vertices"] = nlohmann::json::array();
  for (Vec2 v : c.vertices) j["vertices"].push_back(vec_of(v));
  return j;
}

Contour contour_from_json(const nlohmann::json& j) {
  try {
    Contour c;
    c.r = j.at("r").get<double>();
    c.closed = j.value("closed", true);
    for (const auto& v : j.at("vertices")) c.vertices.push_back(vec2_from(v));
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed contour: ") + e.what());
  }
}

nlohmann::json to_json(const NestednessReport& r) {
  nlohmann::json j;
  j["pass"] = r.pass;
  j["loops"] = nlohmann::json::array();
  for (const auto& l : r.loops) {
    nlohmann::json e{{"r", l.r}, {"simple", l.simple}, {"area", l.area}};
    if (l.crossing) e["crossing_edges"] = {l.crossing->first, l.crossing->second};
    j["loops"].push_back(e);
  }
  j["pairs"] = nlohmann::json::array();
  for (const auto& p : r.pairs) {
    nlohmann::json e{{"inner_r", r.loops[p.inner].r},
                     {"outer_r", r.loops[p.outer].r},
                     {"nested", p.nested},
                     {"area_increasing", p.area_increasing}};
    if (p.witness) e["witness"] = vec_of(*p.witness);
    j["pairs"].push_back(e);
  }
  return j;
}

nlohmann::json to_json(const KEstimate& k) {
  nlohmann::json j;
  j["radii"] = k.radii;
  j["diameters"] = k.diameters;
  j["hull_vertices"] = nlohmann::json::array();
  for (Vec2 v : k.hull_vertices) j["hull_vertices"].push_back(vec_of(v));
  j["hull_area"] = k.hull_area;
  j["decreasing"] = k.decreasing;
  return j;
}

nlohmann::json to_json(const CheckResult& c) {
  return {{"name", c.name},
          {"status", status_name(c.status)},
          {"statistic", c.statistic},
          {"threshold", c.threshold},
          {"comparison", c.comparison},
          {"pass", !c.failed()},
          {"details", c.details}};
}

nlohmann::json to_json(const DiagnosticsReport& r) {
  nlohmann::json j;
  j["checks"] = nlohmann::json::array();
  for (const auto& c : r.checks) j["checks"].push_back(to_json(c));
  j["provenance"] = r.provenance;
  j["seed"] = r.seed;
  j["pass"] = r.pass();
  return j;
}

nlohmann::json to_json(const SemidiscreteSolution& s) {
  nlohmann::json j;
  j["kind"] = "semidiscrete";
  j["atoms"] = nlohmann::json::array();
  for (Vec2 y : s.target.points) j["atoms"].push_back(vec_of(y));
  j["weights"] = s.target.weights;
  j["psi"] = s.result.potential.psi;
  j["iterations"] = s.result.iterations;
  j["residual"] = s.result.residual;
  std::vector<double> masses;
  j["cells"] = nlohmann::json::array();
  for (const auto& cell : s.result.diagram.cells) {
    masses.push_back(cell.mass);
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& e : cell.region.edges) {
      if (e.kind == BoundaryEdge::Kind::Segment) {
        edges.push_back({{"kind", "segment"}, {"from", vec_of(e.from)}, {"to", vec_of(e.to)}, {"neighbor", e.neighbor}});
      } else {
        edges.push_back({{"kind", "arc"},
                         {"from", vec_of(e.from)},
                         {"to", vec_of(e.to)},
                         {"start_angle", e.start_angle},
                         {"sweep", e.sweep}});
      }
    }
    j["cells"].push_back({{"mass", cell.mass}, {"edges", edges}});
  }
  j["masses"] = masses;
  return j;
}

nlohmann::json to_json(const EntropicSolution& s) {
  nlohmann::json j;
  j["kind"] = "entropic";
  j["epsilon"] = s.coupling.epsilon;
  j["grid"] = {{"dim", s.grid.dim}, {"n_r", s.grid.n_r}, {"n_ang", s.grid.n_ang}};
  j["nodes"] = nlohmann::json::array();
  for (const auto& p : s.grid.polar) {
    if (s.grid.dim == 2) j["nodes"].push_back({p[0], p[1]});
    else j["nodes"].push_back({p[0], p[1], p[2]});
  }
  j["images"] = points_json(s.forward_table.images);
  j["flagged"] = s.forward_table.flagged;
  j["f"] = s.coupling.f;
  j["g"] = s.coupling.g;
  j["target_nodes"] = points_json(s.coupling.target.points);
  j["target_masses"] = s.coupling.target.masses;
  j["marginal_err"] = s.coupling.marginal_err;
  j["iterations"] = s.coupling.iterations;
  j["stages"] = nlohmann::json::array();
  for (const auto& st : s.coupling.stages)
    j["stages"].push_back({{"epsilon", st.epsilon},
                           {"iterations", st.iterations},
                           {"marginal_err", st.marginal_err},
                           {"support", st.support},
                           {"dense", st.dense},
                           {"rebuilds", st.rebuilds}});
  return j;
}

QuantileMap map_from_json(const nlohmann::json& j) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "semidiscrete") {
      DiscreteTarget t;
      for (const auto& a : j.at("atoms")) t.points.push_back(vec2_from(a));
      t.weights = j.at("weights").get<std::vector<double>>();
      t.validate();
      AscentResult r;
      r.potential.psi = j.at("psi").get<std::vector<double>>();
      if (r.potential.psi.size() != t.size()) throw ConfigError("psi does not match the atoms");
      r.iterations = j.at("iterations").get<int>();
      r.residual = j.at("residual").get<double>();
      r.diagram = build_laguerre(t, r.potential.psi);
      return QuantileMap::from_semidiscrete(std::move(t), std::move(r));
    }
    if (kind == "entropic") {
      const auto& g = j.at("grid");
      BallGrid grid = build_ball_grid(g.at("dim").get<int>(), g.at("n_r").get<int>(), g.at("n_ang").get<int>());
      GridCoupling c;
      c.source = grid.nodes;
      c.target.points = points_from(j.at("target_nodes"), grid.dim);
      c.target.masses = j.at("target_masses").get<std::vector<double>>();
      c.epsilon = j.at("epsilon").get<double>();
      c.f = j.at("f").get<std::vector<double>>();
      c.g = j.at("g").get<std::vector<double>>();
      c.marginal_err = j.at("marginal_err").get<double>();
      c.iterations = j.at("iterations").get<int>();
      if (c.f.size() != c.source.size() || c.g.size() != c.target.size() || c.target.masses.size() != c.target.size())
        throw ConfigError("map table sizes are inconsistent");
      return QuantileMap::from_entropic(std::move(grid), std::move(c));
    }
    throw ConfigError("unknown map artifact kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed map artifact: ") + e.what());
  }
}

}  // namespace centerward
