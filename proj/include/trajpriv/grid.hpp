#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace trajpriv {

/// A grid cell addressed by zero-based (row, col); row 0 is the northern edge.
struct Cell {
  int row = 0;
  int col = 0;

  friend auto operator<=>(const Cell&, const Cell&) = default;
};

/// Axis-aligned rectangle of cells. Canonical identity is (row0, col0, height, width).
struct Region {
  int row0 = 0;
  int col0 = 0;
  int height = 1;
  int width = 1;

  long area() const { return static_cast<long>(height) * width; }
  int row_end() const { return row0 + height; }
  int col_end() const { return col0 + width; }

  static Region singleton(Cell c) { return {c.row, c.col, 1, 1}; }

  friend auto operator<=>(const Region&, const Region&) = default;
};

/// Bounding box discretized into square cells of side `cell_size_m` meters.
///
/// Cell angular extents are derived at the box's mid-latitude on a spherical
/// earth. The last row/column may extend past the box when the extent is not
/// a whole number of cells.
class GridSpace {
 public:
  static constexpr double kEarthRadiusM = 6371008.8;

  GridSpace(double lon_min, double lon_max, double lat_min, double lat_max, double cell_size_m);

  /// Grid with explicit row/column counts anchored at the north-west corner.
  static GridSpace with_shape(double lon_min, double lat_max, double cell_size_m, int n_rows,
                              int n_cols);

  double lon_min() const { return lon_min_; }
  double lon_max() const { return lon_max_; }
  double lat_min() const { return lat_min_; }
  double lat_max() const { return lat_max_; }
  double cell_size_m() const { return cell_size_m_; }
  int n_rows() const { return n_rows_; }
  int n_cols() const { return n_cols_; }
  double cell_dlat() const { return dlat_; }
  double cell_dlon() const { return dlon_; }
  long n_cells() const { return static_cast<long>(n_rows_) * n_cols_; }

  bool valid(Cell c) const { return c.row >= 0 && c.row < n_rows_ && c.col >= 0 && c.col < n_cols_; }
  bool inside(const Region& r) const;
  bool in_box(double lon, double lat) const;

  /// Geographic center (lon, lat) of a cell.
  std::pair<double, double> center_lonlat(Cell c) const;

  /// Exact-field constructor used when loading a persisted grid.
  GridSpace(double lon_min, double lon_max, double lat_min, double lat_max, double cell_size_m,
            int n_rows, int n_cols);

  friend bool operator==(const GridSpace&, const GridSpace&) = default;

 private:
  double lon_min_, lon_max_, lat_min_, lat_max_;
  double cell_size_m_;
  int n_rows_, n_cols_;
  double dlat_, dlon_;
};

struct TimedCell {
  std::int64_t t = 0;
  Cell cell;
  friend bool operator==(const TimedCell&, const TimedCell&) = default;
};

struct TimedRegion {
  std::int64_t t = 0;
  Region region;
  friend bool operator==(const TimedRegion&, const TimedRegion&) = default;
};

/// Ground-truth (or predicted) cell sequence with strictly increasing timestamps.
struct TrajectoryTrue {
  std::string id;
  std::vector<TimedCell> points;
  friend bool operator==(const TrajectoryTrue&, const TrajectoryTrue&) = default;
};

struct PublishedTrajectory {
  std::string id;
  std::vector<TimedRegion> regions;
  friend bool operator==(const PublishedTrajectory&, const PublishedTrajectory&) = default;
};

/// Throws OutOfGridError when the point is outside the bounding box.
Cell cell_of(double lon, double lat, const GridSpace& gs);

/// Cell center in meters relative to the grid's north-west corner: x east, y south.
Eigen::Vector2d center_m(Cell c, const GridSpace& gs);

inline bool contains(const Region& r, Cell c) {
  return c.row >= r.row0 && c.row < r.row_end() && c.col >= r.col0 && c.col < r.col_end();
}

inline long intersection_area(const Region& a, const Region& b) {
  const int h = std::min(a.row_end(), b.row_end()) - std::max(a.row0, b.row0);
  const int w = std::min(a.col_end(), b.col_end()) - std::max(a.col0, b.col0);
  return (h > 0 && w > 0) ? static_cast<long>(h) * w : 0;
}

/// Euclidean distance in meters between cell centers.
double cell_distance_m(Cell a, Cell b, double cell_size_m);

/// Throws Error when timestamps are not strictly increasing,
/// the trajectory is empty, or a cell is off the grid.
void validate(const TrajectoryTrue& traj, const GridSpace& gs);
void validate(const PublishedTrajectory& pub, const GridSpace& gs);

}  // namespace trajpriv
