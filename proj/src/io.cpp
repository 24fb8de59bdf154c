#include "trajpriv/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "trajpriv/errors.hpp"

namespace trajpriv {

using nlohmann::json;

namespace {

template <typename F>
auto parse_lines(std::istream& is, F&& per_object) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      per_object(json::parse(line));
    } catch (const json::exception& e) {
      throw ParseError("JSONL line " + std::to_string(lineno) + ": " + e.what());
    }
  }
}

int to_int(const json& v) {
  if (!v.is_number_integer()) throw ParseError("expected an integer, got " + v.dump());
  return v.get<int>();
}

std::int64_t to_i64(const json& v) {
  if (!v.is_number_integer()) throw ParseError("expected an integer, got " + v.dump());
  return v.get<std::int64_t>();
}

json matrix_to_json(const HmmParams::Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

HmmParams::Matrix matrix_from_json(const json& j, Eigen::Index rows, Eigen::Index cols) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows) {
    throw ParseError("matrix has the wrong number of rows");
  }
  HmmParams::Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw ParseError("matrix row has the wrong number of columns");
    }
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  return m;
}

}  // namespace

void write_trajectories_jsonl(std::ostream& os, const std::vector<TrajectoryTrue>& trajs) {
  for (const auto& traj : trajs) {
    json pts = json::array();
    for (const auto& p : traj.points) pts.push_back({p.t, p.cell.row, p.cell.col});
    os << json{{"id", traj.id}, {"points", std::move(pts)}}.dump() << '\n';
  }
}

std::vector<TrajectoryTrue> read_trajectories_jsonl(std::istream& is) {
  std::vector<TrajectoryTrue> out;
  parse_lines(is, [&out](const json& j) {
    TrajectoryTrue traj;
    traj.id = j.at("id").get<std::string>();
    for (const auto& p : j.at("points")) {
      if (!p.is_array() || p.size() != 3) throw ParseError("point must be [t, row, col]");
      traj.points.push_back({to_i64(p[0]), {to_int(p[1]), to_int(p[2])}});
    }
    out.push_back(std::move(traj));
  });
  return out;
}

void write_published_jsonl(std::ostream& os, const std::vector<PublishedTrajectory>& pubs) {
  for (const auto& pub : pubs) {
    json regs = json::array();
    for (const auto& s : pub.regions) {
      regs.push_back({s.t, s.region.row0, s.region.col0, s.region.height, s.region.width});
    }
    os << json{{"id", pub.id}, {"regions", std::move(regs)}}.dump() << '\n';
  }
}

std::vector<PublishedTrajectory> read_published_jsonl(std::istream& is) {
  std::vector<PublishedTrajectory> out;
  parse_lines(is, [&out](const json& j) {
    PublishedTrajectory pub;
    pub.id = j.at("id").get<std::string>();
    for (const auto& r : j.at("regions")) {
      if (!r.is_array() || r.size() != 5) throw ParseError("region must be [t, row0, col0, h, w]");
      const Region region{to_int(r[1]), to_int(r[2]), to_int(r[3]), to_int(r[4])};
      if (region.height < 1 || region.width < 1) throw ParseError("region must be at least 1x1");
      pub.regions.push_back({to_i64(r[0]), region});
    }
    out.push_back(std::move(pub));
  });
  return out;
}

json grid_to_json(const GridSpace& gs) {
  return json{{"lon_min", gs.lon_min()},         {"lon_max", gs.lon_max()},
              {"lat_min", gs.lat_min()},         {"lat_max", gs.lat_max()},
              {"cell_size_m", gs.cell_size_m()}, {"n_rows", gs.n_rows()},
              {"n_cols", gs.n_cols()}};
}

GridSpace grid_from_json(const json& j) {
  try {
    return GridSpace(j.at("lon_min").get<double>(), j.at("lon_max").get<double>(),
                     j.at("lat_min").get<double>(), j.at("lat_max").get<double>(),
                     j.at("cell_size_m").get<double>(), j.at("n_rows").get<int>(),
                     j.at("n_cols").get<int>());
  } catch (const json::exception& e) {
    throw ParseError(std::string("grid metadata: ") + e.what());
  }
}

json model_to_json(const AttackModel& model) {
  json states = json::array();
  for (Cell c : model.hidden.states) states.push_back({c.row, c.col});
  json symbols = json::array();
  for (const Region& r : model.alphabet.symbols) symbols.push_back({r.row0, r.col0, r.height, r.width});
  auto vector_to_json = [](const HmmParams::Vector& v) {
    json out = json::array();
    for (Eigen::Index h = 0; h < v.size(); ++h) out.push_back(v(h));
    return out;
  };
  return json{{"states", std::move(states)},
              {"symbols", std::move(symbols)},
              {"pi_fwd", vector_to_json(model.params.pi_fwd)},
              {"pi_bwd", vector_to_json(model.params.pi_bwd)},
              {"a_fwd", matrix_to_json(model.params.a_fwd)},
              {"a_bwd", matrix_to_json(model.params.a_bwd)},
              {"b", matrix_to_json(model.params.b)}};
}

AttackModel model_from_json(const json& j) {
  try {
    AttackModel m;
    for (const auto& s : j.at("states")) m.hidden.states.push_back({to_int(s.at(0)), to_int(s.at(1))});
    for (const auto& s : j.at("symbols")) {
      m.alphabet.symbols.push_back({to_int(s.at(0)), to_int(s.at(1)), to_int(s.at(2)), to_int(s.at(3))});
    }
    if (!std::is_sorted(m.hidden.states.begin(), m.hidden.states.end()) ||
        !std::is_sorted(m.alphabet.symbols.begin(), m.alphabet.symbols.end())) {
      throw ParseError("model states and symbols must be in canonical order");
    }
    const auto H = static_cast<Eigen::Index>(m.hidden.size());
    const auto O = static_cast<Eigen::Index>(m.alphabet.size());
    m.params.pi_fwd = matrix_from_json(json::array({j.at("pi_fwd")}), 1, H).row(0).transpose();
    m.params.pi_bwd = matrix_from_json(json::array({j.at("pi_bwd")}), 1, H).row(0).transpose();
    m.params.a_fwd = matrix_from_json(j.at("a_fwd"), H, H);
    m.params.a_bwd = matrix_from_json(j.at("a_bwd"), H, H);
    m.params.b = matrix_from_json(j.at("b"), H, O);
    m.params.allowed = emission_mask(m.hidden, m.alphabet);
    return m;
  } catch (const json::exception& e) {
    throw ParseError(std::string("model checkpoint: ") + e.what());
  }
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return buf;
}

void write_eval_csv(std::ostream& os, const EvalReport& report) {
  os << "id,T,AED_m,maxED_m\n";
  std::size_t total = 0;
  for (const auto& t : report.trajectories) {
    os << t.id << ',' << t.length << ',' << format_number(t.aed_m) << ','
       << format_number(t.max_ed_m) << '\n';
    total += t.length;
  }
  os << "__all__," << total << ',' << format_number(report.a2ed_m) << ','
     << format_number(report.amed_m) << '\n';
}

json eval_to_json(const EvalReport& report) {
  json per = json::array();
  for (const auto& t : report.trajectories) {
    per.push_back({{"id", t.id}, {"T", t.length}, {"aed_m", t.aed_m}, {"max_ed_m", t.max_ed_m},
                   {"step_ed_m", t.step_ed_m}});
  }
  return json{{"a2ed_m", report.a2ed_m},
              {"amed_m", report.amed_m},
              {"n_trajectories", report.trajectories.size()},
              {"trajectories", std::move(per)}};
}

void write_diagnostics_csv(std::ostream& os, const std::vector<PassDiagnostics>& diags) {
  os << "pass,direction,total_log_likelihood,mean_reward,fraction_rewarded\n";
  for (const auto& d : diags) {
    os << d.pass << ',' << (d.direction == TimeDirection::kForward ? "fwd" : "bwd") << ','
       << format_number(d.log_likelihood) << ',' << format_number(d.mean_reward) << ','
       << format_number(d.fraction_rewarded) << '\n';
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingInputError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << contents;
  if (!out) throw Error("failed writing " + path.string());
}

std::vector<TrajectoryTrue> load_trajectories(const std::filesystem::path& path) {
  std::istringstream in(read_text_file(path));
  return read_trajectories_jsonl(in);
}

std::vector<PublishedTrajectory> load_published(const std::filesystem::path& path) {
  std::istringstream in(read_text_file(path));
  return read_published_jsonl(in);
}

GridSpace load_grid(const std::filesystem::path& path) {
  const auto text = read_text_file(path);
  const auto j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ParseError("grid metadata in " + path.string() + " is not valid JSON");
  return grid_from_json(j);
}

}  // namespace trajpriv
