#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "trajpriv/grid.hpp"

namespace trajpriv {

struct RawPoint {
  double lat = 0;
  double lon = 0;
  std::int64_t t = 0;  // seconds since the Unix epoch
  friend bool operator==(const RawPoint&, const RawPoint&) = default;
};

struct RawTrack {
  std::string id;
  std::vector<RawPoint> points;
};

struct PltParse {
  std::vector<RawPoint> points;
  std::size_t skipped = 0;
};

/// Geolife PLT: six header lines, then rows `lat,lon,0,alt,days,date,time`.
/// Malformed rows are counted and skipped; a truncated header throws ParseError.
PltParse parse_plt(std::string_view text);

/// Splits one CSV record, honouring double-quoted fields with "" escapes.
std::vector<std::string> split_csv_line(std::string_view line);

/// Column positions of the Porto taxi CSV, located by header name.
struct PortoColumns {
  std::size_t trip_id = 0;
  std::size_t timestamp = 5;
  std::size_t missing_data = 7;
  std::size_t polyline = 8;

  static PortoColumns from_header(const std::vector<std::string>& header);
};

/// One Porto trip. Points are spaced 15 s apart from the TIMESTAMP field.
/// Returns nothing for rows flagged MISSING_DATA; throws ParseError when the
/// row is malformed.
std::optional<RawTrack> parse_porto(const std::vector<std::string>& fields,
                                    const PortoColumns& cols);

struct PortoParse {
  std::vector<RawTrack> tracks;
  std::size_t skipped_malformed = 0;
  std::size_t dropped_missing = 0;
};

PortoParse parse_porto_csv(std::string_view text);

struct PreprocessConfig {
  double subsample_s = 18;
  std::size_t min_len = 5;
  std::size_t max_len = 30;

  void check() const;
};

struct PreprocessReport {
  std::size_t tracks_in = 0;
  std::size_t points_in = 0;
  std::size_t points_unordered = 0;
  std::size_t points_subsampled = 0;
  std::size_t points_out_of_box = 0;
  std::size_t segments = 0;
  std::size_t segments_discarded = 0;
  std::size_t trajectories_out = 0;
};

/// Keeps the first point of each subsampling window, splits where a point
/// leaves the box or the gap exceeds three windows, cuts long segments into
/// pieces of at most max_len, and drops pieces shorter than min_len. A track
/// yielding a single piece keeps its id; otherwise pieces are suffixed _0, _1...
std::vector<TrajectoryTrue> preprocess(const std::vector<RawTrack>& tracks,
                                       const PreprocessConfig& cfg, const GridSpace& gs,
                                       PreprocessReport* report = nullptr);

/// Moves on the 8-neighbourhood plus staying in place.
enum class Move { kStay, kN, kNE, kE, kSE, kS, kSW, kW, kNW };

struct SynthConfig {
  std::size_t n_traj = 200;
  std::size_t min_len = 10;
  std::size_t max_len = 20;
  int n_rows = 20;
  int n_cols = 20;
  double cell_size_m = 100.0;
  double origin_lon = 116.28;  // north-west corner
  double origin_lat = 40.0;
  std::int64_t step_s = 18;
  /// Probabilities indexed by Move.
  std::array<double, 9> step_kernel = {0.0, 0.125, 0.125, 0.125, 0.125, 0.125, 0.125, 0.125, 0.125};
  double persistence = 0.8;
  std::uint64_t seed = 0;

  void check() const;
  GridSpace grid() const;
};

/// Persistent random walk: each step repeats the previous move with
/// probability `persistence`, otherwise draws from the kernel. Moves that
/// leave the grid are reflected off the edge.
std::vector<TrajectoryTrue> synth_generate(const SynthConfig& cfg);

}  // namespace trajpriv
