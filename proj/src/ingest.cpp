#include "trajpriv/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>

#include <json.hpp>

#include "trajpriv/errors.hpp"
#include "trajpriv/rng.hpp"

namespace trajpriv {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  s = trim(s);
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

/// Lines without their terminators; a trailing empty line is not reported.
std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.push_back(line);
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  return out;
}

/// "YYYY-MM-DD" and "HH:MM:SS" (UTC) to epoch seconds.
std::optional<std::int64_t> epoch_seconds(std::string_view date, std::string_view time) {
  date = trim(date);
  time = trim(time);
  if (date.size() != 10 || date[4] != '-' || date[7] != '-') return std::nullopt;
  if (time.size() != 8 || time[2] != ':' || time[5] != ':') return std::nullopt;
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
  if (!parse_number(date.substr(0, 4), y) || !parse_number(date.substr(5, 2), mo) ||
      !parse_number(date.substr(8, 2), d) || !parse_number(time.substr(0, 2), h) ||
      !parse_number(time.substr(3, 2), mi) || !parse_number(time.substr(6, 2), s)) {
    return std::nullopt;
  }
  using namespace std::chrono;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 60) return std::nullopt;
  const auto days_since_epoch = sys_days{ymd}.time_since_epoch().count();
  return static_cast<std::int64_t>(days_since_epoch) * 86400 + h * 3600 + mi * 60 + s;
}

}  // namespace

PltParse parse_plt(std::string_view text) {
  constexpr std::size_t kHeaderLines = 6;
  const auto lines = lines_of(text);
  if (lines.size() < kHeaderLines) throw ParseError("PLT header is truncated");

  PltParse out;
  for (std::size_t i = kHeaderLines; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    const auto fields = split_csv_line(lines[i]);
    RawPoint p;
    std::optional<std::int64_t> t;
    if (fields.size() == 7 && parse_number(fields[0], p.lat) && parse_number(fields[1], p.lon) &&
        std::abs(p.lat) <= 90.0 && std::abs(p.lon) <= 180.0 &&
        (t = epoch_seconds(fields[5], fields[6]))) {
      p.t = *t;
      out.points.push_back(p);
    } else {
      ++out.skipped;
    }
  }
  return out;
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

PortoColumns PortoColumns::from_header(const std::vector<std::string>& header) {
  PortoColumns cols;
  auto find = [&header](std::string_view name) {
    auto it = std::find_if(header.begin(), header.end(),
                           [name](const std::string& h) { return trim(h) == name; });
    if (it == header.end()) throw ParseError("Porto CSV header lacks column " + std::string(name));
    return static_cast<std::size_t>(it - header.begin());
  };
  cols.trip_id = find("TRIP_ID");
  cols.timestamp = find("TIMESTAMP");
  cols.missing_data = find("MISSING_DATA");
  cols.polyline = find("POLYLINE");
  return cols;
}

std::optional<RawTrack> parse_porto(const std::vector<std::string>& fields,
                                    const PortoColumns& cols) {
  const std::size_t need =
      std::max({cols.trip_id, cols.timestamp, cols.missing_data, cols.polyline}) + 1;
  if (fields.size() < need) throw ParseError("Porto row has too few fields");

  const auto missing = trim(fields[cols.missing_data]);
  if (missing == "True" || missing == "true" || missing == "TRUE") return std::nullopt;

  std::int64_t start = 0;
  if (!parse_number(fields[cols.timestamp], start)) throw ParseError("Porto TIMESTAMP is not an integer");

  const auto polyline = nlohmann::json::parse(fields[cols.polyline], nullptr, false);
  if (polyline.is_discarded() || !polyline.is_array()) throw ParseError("Porto POLYLINE is not a JSON array");

  RawTrack track;
  track.id = std::string(trim(fields[cols.trip_id]));
  std::int64_t t = start;
  for (const auto& pair : polyline) {
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number()) {
      throw ParseError("Porto POLYLINE entry is not a [lon, lat] pair");
    }
    track.points.push_back({pair[1].get<double>(), pair[0].get<double>(), t});
    t += 15;
  }
  return track;
}

PortoParse parse_porto_csv(std::string_view text) {
  const auto lines = lines_of(text);
  if (lines.empty()) throw ParseError("Porto CSV is empty");
  const auto cols = PortoColumns::from_header(split_csv_line(lines[0]));
  PortoParse out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    try {
      if (auto track = parse_porto(split_csv_line(lines[i]), cols)) {
        out.tracks.push_back(std::move(*track));
      } else {
        ++out.dropped_missing;
      }
    } catch (const ParseError&) {
      ++out.skipped_malformed;
    }
  }
  return out;
}

void PreprocessConfig::check() const {
  if (!(subsample_s > 0.0)) throw ConfigError("subsample interval must be positive");
  if (min_len < 1) throw ConfigError("min_len must be at least 1");
  if (max_len < min_len) throw ConfigError("max_len must be at least min_len");
}

std::vector<TrajectoryTrue> preprocess(const std::vector<RawTrack>& tracks,
                                       const PreprocessConfig& cfg, const GridSpace& gs,
                                       PreprocessReport* report) {
  cfg.check();
  PreprocessReport local;
  PreprocessReport& rep = report ? *report : local;
  std::vector<TrajectoryTrue> out;

  for (const auto& track : tracks) {
    ++rep.tracks_in;
    rep.points_in += track.points.size();
    if (track.points.empty()) continue;

    // First point per subsampling window, measured from the track's first point.
    std::vector<RawPoint> kept;
    const std::int64_t t0 = track.points.front().t;
    std::int64_t last_window = -1;
    for (const auto& p : track.points) {
      if (!kept.empty() && p.t <= kept.back().t) {
        ++rep.points_unordered;
        continue;
      }
      const auto window = static_cast<std::int64_t>(std::floor((p.t - t0) / cfg.subsample_s));
      if (window == last_window) {
        ++rep.points_subsampled;
        continue;
      }
      last_window = window;
      kept.push_back(p);
    }

    std::vector<std::vector<TimedCell>> segments(1);
    for (const auto& p : kept) {
      if (!gs.in_box(p.lon, p.lat)) {
        ++rep.points_out_of_box;
        if (!segments.back().empty()) segments.emplace_back();
        continue;
      }
      auto& seg = segments.back();
      if (!seg.empty() && static_cast<double>(p.t - seg.back().t) > 3.0 * cfg.subsample_s) {
        segments.emplace_back();
      }
      segments.back().push_back({p.t, cell_of(p.lon, p.lat, gs)});
    }

    std::vector<std::vector<TimedCell>> pieces;
    for (auto& seg : segments) {
      for (std::size_t at = 0; at < seg.size(); at += cfg.max_len) {
        const auto end = std::min(seg.size(), at + cfg.max_len);
        pieces.emplace_back(seg.begin() + static_cast<std::ptrdiff_t>(at),
                            seg.begin() + static_cast<std::ptrdiff_t>(end));
      }
    }
    rep.segments += pieces.size();
    for (std::size_t k = 0; k < pieces.size(); ++k) {
      if (pieces[k].size() < cfg.min_len) {
        ++rep.segments_discarded;
        continue;
      }
      TrajectoryTrue traj;
      traj.id = pieces.size() == 1 ? track.id : track.id + "_" + std::to_string(k);
      traj.points = std::move(pieces[k]);
      out.push_back(std::move(traj));
      ++rep.trajectories_out;
    }
  }
  return out;
}

void SynthConfig::check() const {
  if (n_rows < 1 || n_cols < 1) throw ConfigError("synthetic grid must be at least 1x1");
  if (min_len < 1 || max_len < min_len) throw ConfigError("synthetic length range is invalid");
  if (!(persistence >= 0.0 && persistence <= 1.0)) throw ConfigError("persistence must lie in [0, 1]");
  if (step_s < 1) throw ConfigError("synthetic time step must be at least one second");
  for (double p : step_kernel) {
    if (!(p >= 0.0)) throw ConfigError("step kernel probabilities must be non-negative");
  }
  const double total = std::accumulate(step_kernel.begin(), step_kernel.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-9) throw ConfigError("step kernel probabilities must sum to 1");
}

GridSpace SynthConfig::grid() const {
  return GridSpace::with_shape(origin_lon, origin_lat, cell_size_m, n_rows, n_cols);
}

namespace {

constexpr std::array<std::array<int, 2>, 9> kMoveDelta = {{
    {0, 0}, {-1, 0}, {-1, 1}, {0, 1}, {1, 1}, {1, 0}, {1, -1}, {0, -1}, {-1, -1},
}};

int draw_move(Rng& rng, const std::array<double, 9>& kernel) {
  const double u = uniform01(rng);
  double acc = 0;
  int last_positive = 0;
  for (int m = 0; m < 9; ++m) {
    if (kernel[static_cast<std::size_t>(m)] <= 0) continue;
    acc += kernel[static_cast<std::size_t>(m)];
    last_positive = m;
    if (u < acc) return m;
  }
  return last_positive;
}

/// Steps one coordinate, reflecting off [0, n). Flips `delta` on reflection.
int reflect(int pos, int& delta, int n) {
  int next = pos + delta;
  if (next < 0 || next >= n) {
    delta = -delta;
    next = pos + delta;
    if (next < 0 || next >= n) next = pos;
  }
  return next;
}

}  // namespace

std::vector<TrajectoryTrue> synth_generate(const SynthConfig& cfg) {
  cfg.check();
  std::vector<TrajectoryTrue> out;
  out.reserve(cfg.n_traj);
  for (std::size_t i = 0; i < cfg.n_traj; ++i) {
    Rng rng = make_rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(i)));
    const auto span = static_cast<std::uint64_t>(cfg.max_len - cfg.min_len + 1);
    const std::size_t len = cfg.min_len + uniform_index(rng, span);
    Cell c{static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(cfg.n_rows))),
           static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(cfg.n_cols)))};

    char id[32];
    std::snprintf(id, sizeof id, "syn_%05zu", i);
    TrajectoryTrue traj;
    traj.id = id;
    traj.points.push_back({0, c});
    std::array<int, 2> last{0, 0};
    for (std::size_t step = 1; step < len; ++step) {
      std::array<int, 2> move = last;
      if (step == 1 || uniform01(rng) >= cfg.persistence) {
        move = kMoveDelta[static_cast<std::size_t>(draw_move(rng, cfg.step_kernel))];
      }
      c.row = reflect(c.row, move[0], cfg.n_rows);
      c.col = reflect(c.col, move[1], cfg.n_cols);
      last = move;
      traj.points.push_back({static_cast<std::int64_t>(step) * cfg.step_s, c});
    }
    out.push_back(std::move(traj));
  }
  return out;
}

}  // namespace trajpriv
