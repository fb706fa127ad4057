#include "bfm/scenario_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "bfm/errors.hpp"

namespace bfm {

namespace {

const Json& require(const Json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) throw ParseError(path, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(path.empty() ? key : path + "." + key, "missing field");
  return *it;
}

double as_number(const Json& v, const std::string& path) {
  if (!v.is_number()) throw ParseError(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ParseError(path, "number is not finite");
  return x;
}

Vector as_vector(const Json& v, int dimension, const std::string& path) {
  if (!v.is_array()) throw ParseError(path, "expected an array of " + std::to_string(dimension) + " numbers");
  if (static_cast<int>(v.size()) != dimension)
    throw ParseError(path, "expected " + std::to_string(dimension) + " components, got " +
                               std::to_string(v.size()));
  Vector out(dimension);
  for (int k = 0; k < dimension; ++k)
    out(k) = as_number(v[static_cast<std::size_t>(k)], path + "[" + std::to_string(k) + "]");
  return out;
}

std::string as_id(const Json& v, const std::string& path) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  throw ParseError(path, "agent id must be a string or an integer");
}

}  // namespace

Scenario parse_scenario(const Json& doc, std::optional<std::uint64_t> seed_override) {
  if (!doc.is_object()) throw ParseError("", "scenario must be a JSON object");

  const Json& dim_json = require(doc, "dimension", "");
  if (!dim_json.is_number_integer() || dim_json.get<long long>() < 2)
    throw ParseError("dimension", "expected an integer >= 2");
  const int d = dim_json.get<int>();

  // Agents: leaders first, each group in file order.
  const Json& agents = require(doc, "agents", "");
  if (!agents.is_array() || agents.empty()) throw ParseError("agents", "expected a non-empty array");
  struct AgentRecord {
    std::string id;
    bool leader;
    std::optional<Vector> initial;
  };
  std::vector<AgentRecord> leaders;
  std::vector<AgentRecord> followers;
  std::map<std::string, int> seen;
  for (std::size_t a = 0; a < agents.size(); ++a) {
    const std::string path = "agents[" + std::to_string(a) + "]";
    const Json& entry = agents[a];
    AgentRecord rec;
    rec.id = as_id(require(entry, "id", path), path + ".id");
    if (!seen.emplace(rec.id, 0).second) throw ParseError(path + ".id", "duplicate id '" + rec.id + "'");
    const Json& role = require(entry, "role", path);
    if (role == "leader") {
      rec.leader = true;
    } else if (role == "follower") {
      rec.leader = false;
    } else {
      throw ParseError(path + ".role", "expected \"leader\" or \"follower\"");
    }
    if (entry.contains("initial") && !entry["initial"].is_null())
      rec.initial = as_vector(entry["initial"], d, path + ".initial");
    (rec.leader ? leaders : followers).push_back(std::move(rec));
  }
  if (leaders.empty()) throw ParseError("agents", "at least one leader is required");

  std::vector<AgentRecord> ordered = leaders;
  ordered.insert(ordered.end(), followers.begin(), followers.end());
  std::map<std::string, int> index;
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < ordered.size(); ++i) {
    index[ordered[i].id] = static_cast<int>(i);
    labels.push_back(ordered[i].id);
  }
  const int n = static_cast<int>(ordered.size());
  const int nl = static_cast<int>(leaders.size());

  const Json& refs = require(doc, "reference_positions", "");
  if (!refs.is_object()) throw ParseError("reference_positions", "expected an object keyed by agent id");
  Vector ref(static_cast<Eigen::Index>(d) * n);
  for (int i = 0; i < n; ++i) {
    const auto it = refs.find(labels[static_cast<std::size_t>(i)]);
    const std::string path = "reference_positions." + labels[static_cast<std::size_t>(i)];
    if (it == refs.end()) throw ParseError(path, "missing reference position");
    ref.segment(i * d, d) = as_vector(*it, d, path);
  }
  for (const auto& [key, _] : refs.items())
    if (!index.contains(key)) throw ParseError("reference_positions." + key, "unknown agent id");

  const Json& edges_json = require(doc, "edges", "");
  if (!edges_json.is_array()) throw ParseError("edges", "expected an array of id pairs");
  std::vector<std::pair<int, int>> edges;
  for (std::size_t k = 0; k < edges_json.size(); ++k) {
    const std::string path = "edges[" + std::to_string(k) + "]";
    const Json& e = edges_json[k];
    if (!e.is_array() || e.size() != 2) throw ParseError(path, "expected a pair of ids");
    int ends[2];
    for (std::size_t s = 0; s < 2; ++s) {
      const std::string id = as_id(e[s], path + "[" + std::to_string(s) + "]");
      const auto it = index.find(id);
      if (it == index.end()) throw ParseError(path, "unknown agent id '" + id + "'");
      ends[s] = it->second;
    }
    edges.emplace_back(ends[0], ends[1]);
  }

  std::optional<FormationGraph> graph;
  try {
    graph.emplace(n, d, nl, edges);
  } catch (const InvalidGraph& ex) {
    throw ParseError("edges", ex.what());
  }

  Gains gains;
  if (doc.contains("gains")) {
    const Json& g = doc["gains"];
    if (!g.is_object()) throw ParseError("gains", "expected {kp, ki}");
    if (g.contains("kp")) gains.k_p = as_number(g["kp"], "gains.kp");
    if (g.contains("ki")) gains.k_i = as_number(g["ki"], "gains.ki");
    try {
      gains.validate();
    } catch (const std::invalid_argument& ex) {
      throw ParseError("gains", ex.what());
    }
  }

  const Json& sched = require(doc, "schedule", "");
  if (!sched.is_array() || sched.empty()) throw ParseError("schedule", "expected a non-empty array");
  std::vector<SegmentSpec> schedule;
  for (std::size_t k = 0; k < sched.size(); ++k) {
    const std::string path = "schedule[" + std::to_string(k) + "]";
    SegmentSpec seg;
    seg.t_start = as_number(require(sched[k], "t0", path), path + ".t0");
    seg.t_end = as_number(require(sched[k], "t1", path), path + ".t1");
    seg.v_c = sched[k].contains("vc") ? as_vector(sched[k]["vc"], d, path + ".vc")
                                      : Vector(Vector::Zero(d));
    seg.scale_rate = sched[k].contains("scale_rate")
                         ? as_number(sched[k]["scale_rate"], path + ".scale_rate")
                         : 0.0;
    schedule.push_back(std::move(seg));
  }

  const double dt = doc.contains("dt") ? as_number(doc["dt"], "dt") : kDefaultDt;
  if (!(dt > 0.0)) throw ParseError("dt", "must be positive");
  const double duration = as_number(require(doc, "duration", ""), "duration");
  if (!(duration > 0.0)) throw ParseError("duration", "must be positive");
  std::uint64_t seed = 0;
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned() && !(doc["seed"].is_number_integer() && doc["seed"].get<long long>() >= 0))
      throw ParseError("seed", "expected a non-negative integer");
    seed = doc["seed"].get<std::uint64_t>();
  }
  if (seed_override) seed = *seed_override;

  const Configuration reference(d, ref);

  // Initial configuration: leaders default to their reference positions,
  // followers to a seeded perturbation of the target.
  Vector leader_init = reference.slice(0, nl);
  for (int i = 0; i < nl; ++i)
    if (ordered[static_cast<std::size_t>(i)].initial)
      leader_init.segment(i * d, d) = *ordered[static_cast<std::size_t>(i)].initial;

  Vector init(static_cast<Eigen::Index>(d) * n);
  init.head(static_cast<Eigen::Index>(d) * nl) = leader_init;
  bool need_default = false;
  for (int i = nl; i < n; ++i) need_default |= !ordered[static_cast<std::size_t>(i)].initial;
  if (need_default) {
    Vector defaults;
    try {
      const BearingSpec spec = BearingSpec::from_configuration(*graph, reference);
      const BearingLaplacian lap = bearing_laplacian(*graph, spec);
      if (check_localizable(lap).is_localizable) {
        defaults = perturbed_target(TargetSolver(lap), leader_init, d, seed).stacked();
      } else {
        // No unique target: perturb the reference followers instead.
        defaults = perturb_followers(reference, nl, seed).stacked();
      }
    } catch (const DegenerateVector& ex) {
      throw ParseError("reference_positions", ex.what());
    }
    init.tail(static_cast<Eigen::Index>(d) * (n - nl)) =
        defaults.tail(static_cast<Eigen::Index>(d) * (n - nl));
  }
  for (int i = nl; i < n; ++i)
    if (ordered[static_cast<std::size_t>(i)].initial)
      init.segment(i * d, d) = *ordered[static_cast<std::size_t>(i)].initial;

  return Scenario{std::move(*graph), reference, Configuration(d, init), gains,
                  std::move(schedule), dt, duration, seed, std::move(labels)};
}

Scenario load_scenario(const std::filesystem::path& path,
                       std::optional<std::uint64_t> seed_override) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scenario file '" + path.string() + "'");
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& ex) {
    throw ParseError("", std::string("malformed JSON: ") + ex.what());
  }
  return parse_scenario(doc, seed_override);
}

namespace {

std::string label_of(const Scenario& sc, int i) {
  if (static_cast<std::size_t>(i) < sc.labels.size()) return sc.labels[static_cast<std::size_t>(i)];
  return "a" + std::to_string(i + 1);
}

Json to_array(const Eigen::Ref<const Vector>& v) {
  Json arr = Json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) arr.push_back(v(k));
  return arr;
}

}  // namespace

Json scenario_to_json(const Scenario& sc) {
  const int d = sc.graph.dimension();
  Json doc;
  doc["dimension"] = d;
  doc["agents"] = Json::array();
  doc["reference_positions"] = Json::object();
  for (int i = 0; i < sc.graph.agent_count(); ++i) {
    const std::string id = label_of(sc, i);
    doc["agents"].push_back({{"id", id},
                             {"role", sc.graph.is_leader(i) ? "leader" : "follower"},
                             {"initial", to_array(sc.initial_config.agent(i))}});
    doc["reference_positions"][id] = to_array(sc.reference_config.agent(i));
  }
  doc["edges"] = Json::array();
  for (const auto& e : sc.graph.edges())
    doc["edges"].push_back({label_of(sc, e.tail), label_of(sc, e.head)});
  doc["gains"] = {{"kp", sc.gains.k_p}, {"ki", sc.gains.k_i}};
  doc["schedule"] = Json::array();
  for (const auto& seg : sc.schedule)
    doc["schedule"].push_back({{"t0", seg.t_start},
                               {"t1", seg.t_end},
                               {"vc", to_array(seg.v_c)},
                               {"scale_rate", seg.scale_rate}});
  doc["dt"] = sc.dt;
  doc["duration"] = sc.duration;
  doc["seed"] = sc.seed;
  return doc;
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

namespace {

const char* axis_name(int k) {
  static const char* names[] = {"x", "y", "z"};
  return k < 3 ? names[k] : nullptr;
}

std::string axis_suffix(int k) {
  const char* name = axis_name(k);
  return name ? std::string(name) : std::to_string(k);
}

template <typename RowFn>
void write_rows(const Trajectory& traj, int decimate, RowFn&& row) {
  if (decimate < 1) throw std::invalid_argument("decimate must be >= 1");
  const std::size_t last = traj.size() - 1;
  for (std::size_t i = 0; i < traj.size(); ++i)
    if (i % static_cast<std::size_t>(decimate) == 0 || i == last) row(i);
}

}  // namespace

void write_trajectory_csv(std::ostream& out, const Scenario& sc, const Trajectory& traj,
                          int decimate) {
  const int d = sc.graph.dimension();
  const int n = sc.graph.agent_count();
  out << "t";
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < d; ++k) out << ',' << label_of(sc, i) << '_' << axis_suffix(k);
  out << ",bearing_error,tracking_error";
  for (int k = 0; k < d; ++k) out << ",centroid_" << axis_suffix(k);
  out << ",scale\n";

  std::string line;
  write_rows(traj, decimate, [&](std::size_t i) {
    line = format_double(traj.times[i]);
    for (Eigen::Index k = 0; k < traj.positions[i].size(); ++k)
      line += ',' + format_double(traj.positions[i](k));
    line += ',' + format_double(traj.bearing_error[i]);
    line += ',' + format_double(traj.tracking_error[i]);
    for (Eigen::Index k = 0; k < traj.centroid[i].size(); ++k)
      line += ',' + format_double(traj.centroid[i](k));
    line += ',' + format_double(traj.scale[i]);
    out << line << '\n';
  });
}

void write_xi_csv(std::ostream& out, const Scenario& sc, const Trajectory& traj, int decimate) {
  const int d = sc.graph.dimension();
  out << "t";
  for (int i = sc.graph.leader_count(); i < sc.graph.agent_count(); ++i)
    for (int k = 0; k < d; ++k) out << ",xi_" << label_of(sc, i) << '_' << axis_suffix(k);
  out << '\n';
  write_rows(traj, decimate, [&](std::size_t i) {
    out << format_double(traj.times[i]);
    for (Eigen::Index k = 0; k < traj.xi[i].size(); ++k) out << ',' << format_double(traj.xi[i](k));
    out << '\n';
  });
}

Json rigidity_to_json(const RigidityReport& r) {
  return {{"rank", r.rank},
          {"required_rank", r.required_rank},
          {"infinitesimally_bearing_rigid", r.is_infinitesimally_bearing_rigid},
          {"null_space_dim", r.null_space_dim},
          {"singular_values", r.singular_values}};
}

Json spectrum_to_json(const HurwitzReport& report, const Gains& gains) {
  Json eig = Json::array();
  for (const auto& z : report.spectrum) eig.push_back({{"re", z.real()}, {"im", z.imag()}});
  Json out = {{"eigenvalues", eig},
              {"max_real_part", report.max_real_part},
              {"is_hurwitz", report.is_hurwitz},
              {"gains", {{"kp", gains.k_p}, {"ki", gains.k_i}}},
              {"proportional_only", gains.k_i == 0.0}};
  if (report.max_real_part < 0.0 && std::isfinite(report.max_real_part)) {
    const double tau = 1.0 / -report.max_real_part;
    out["time_constant"] = tau;
    // Time for the slowest mode to decay by e^-12 (about 6e-6).
    out["convergence_horizon"] = 12.0 * tau;
  } else {
    out["time_constant"] = nullptr;
    out["convergence_horizon"] = nullptr;
  }
  return out;
}

Json summary_json(const SimContext& ctx, const Trajectory& traj) {
  const auto& sc = ctx.scenario;
  Json out;
  out["steps"] = traj.size() - 1;
  out["final_time"] = traj.times.back();
  out["final_bearing_error"] = traj.bearing_error.back();
  const double tracking = traj.tracking_error.back();
  out["final_tracking_error"] = std::isfinite(tracking) ? Json(tracking) : Json(nullptr);
  out["final_centroid"] = to_array(traj.centroid.back());
  out["final_scale"] = traj.scale.back();

  if (const auto fit = fit_final_segment(ctx, traj)) {
    out["decay_fit"] = {{"rate", fit->rate}, {"r_squared", fit->r_squared}, {"poor_fit", fit->poor_fit}};
  } else {
    out["decay_fit"] = nullptr;
  }

  out["spectrum"] = spectrum_to_json(closed_loop_spectrum(ctx.laplacian.ff(), sc.gains), sc.gains);
  out["rigidity"] = rigidity_to_json(ctx.rigidity);
  const auto& loc = ctx.localizability;
  out["localizability"] = {
      {"localizable", loc.is_localizable},
      {"lambda_min", std::isfinite(loc.min_eigenvalue) ? Json(loc.min_eigenvalue) : Json(nullptr)},
      {"lambda_max", loc.max_eigenvalue}};

  Json segs = Json::array();
  for (const auto& seg : ctx.segments)
    segs.push_back({{"t0", seg.t_start},
                    {"t1", seg.t_end},
                    {"scale_rate", seg.scale_rate},
                    {"predicted_scale_rate", seg.predicted_scale_rate},
                    {"predicted_centroid_rate", to_array(seg.predicted_centroid_rate)},
                    {"clamped", seg.clamped}});
  out["segments"] = segs;
  return out;
}

}  // namespace bfm
