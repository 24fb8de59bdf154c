#include "trajpriv/grid.hpp"

#include <cmath>
#include <numbers>

#include "trajpriv/errors.hpp"

namespace trajpriv {

namespace {

double deg_per_meter_lat() { return 180.0 / (std::numbers::pi * GridSpace::kEarthRadiusM); }

double cos_deg(double deg) { return std::cos(deg * std::numbers::pi / 180.0); }

int cells_along(double extent_deg, double cell_deg) {
  // Tolerate round-off so an extent of exactly n cells does not become n+1.
  const double n = extent_deg / cell_deg;
  return std::max(1, static_cast<int>(std::ceil(n - 1e-9)));
}

}  // namespace

GridSpace::GridSpace(double lon_min, double lon_max, double lat_min, double lat_max,
                     double cell_size_m)
    : lon_min_(lon_min),
      lon_max_(lon_max),
      lat_min_(lat_min),
      lat_max_(lat_max),
      cell_size_m_(cell_size_m) {
  if (!(lon_min < lon_max) || !(lat_min < lat_max)) {
    throw ConfigError("grid bounding box must satisfy lon_min < lon_max and lat_min < lat_max");
  }
  if (!(cell_size_m > 0.0)) throw ConfigError("grid cell size must be positive");
  dlat_ = cell_size_m * deg_per_meter_lat();
  dlon_ = dlat_ / cos_deg(0.5 * (lat_min + lat_max));
  n_rows_ = cells_along(lat_max - lat_min, dlat_);
  n_cols_ = cells_along(lon_max - lon_min, dlon_);
}

GridSpace::GridSpace(double lon_min, double lon_max, double lat_min, double lat_max,
                     double cell_size_m, int n_rows, int n_cols)
    : GridSpace(lon_min, lon_max, lat_min, lat_max, cell_size_m) {
  if (n_rows < 1 || n_cols < 1) throw ConfigError("grid must have at least one row and column");
  n_rows_ = n_rows;
  n_cols_ = n_cols;
}

GridSpace GridSpace::with_shape(double lon_min, double lat_max, double cell_size_m, int n_rows,
                                int n_cols) {
  if (n_rows < 1 || n_cols < 1) throw ConfigError("grid must have at least one row and column");
  if (!(cell_size_m > 0.0)) throw ConfigError("grid cell size must be positive");
  const double dlat = cell_size_m * deg_per_meter_lat();
  const double lat_min = lat_max - n_rows * dlat;
  // dlon depends on the mid-latitude, which is already fixed by lat_min/lat_max.
  const double dlon = dlat / cos_deg(0.5 * (lat_min + lat_max));
  return GridSpace(lon_min, lon_min + n_cols * dlon, lat_min, lat_max, cell_size_m, n_rows, n_cols);
}

bool GridSpace::inside(const Region& r) const {
  return r.height >= 1 && r.width >= 1 && r.row0 >= 0 && r.col0 >= 0 && r.row_end() <= n_rows_ &&
         r.col_end() <= n_cols_;
}

bool GridSpace::in_box(double lon, double lat) const {
  return lon >= lon_min_ && lon <= lon_max_ && lat >= lat_min_ && lat <= lat_max_;
}

std::pair<double, double> GridSpace::center_lonlat(Cell c) const {
  return {lon_min_ + (c.col + 0.5) * dlon_, lat_max_ - (c.row + 0.5) * dlat_};
}

Cell cell_of(double lon, double lat, const GridSpace& gs) {
  if (!gs.in_box(lon, lat)) throw OutOfGridError("point outside the grid bounding box");
  const int row = static_cast<int>(std::floor((gs.lat_max() - lat) / gs.cell_dlat()));
  const int col = static_cast<int>(std::floor((lon - gs.lon_min()) / gs.cell_dlon()));
  return {std::min(row, gs.n_rows() - 1), std::min(col, gs.n_cols() - 1)};
}

Eigen::Vector2d center_m(Cell c, const GridSpace& gs) {
  const double g = gs.cell_size_m();
  return {(c.col + 0.5) * g, (c.row + 0.5) * g};
}

double cell_distance_m(Cell a, Cell b, double cell_size_m) {
  const double dr = a.row - b.row;
  const double dc = a.col - b.col;
  return cell_size_m * std::sqrt(dr * dr + dc * dc);
}

void validate(const TrajectoryTrue& traj, const GridSpace& gs) {
  if (traj.points.empty()) throw Error("trajectory '" + traj.id + "' is empty");
  for (std::size_t i = 0; i < traj.points.size(); ++i) {
    if (!gs.valid(traj.points[i].cell)) {
      throw Error("trajectory '" + traj.id + "' has a cell outside the grid");
    }
    if (i > 0 && traj.points[i].t <= traj.points[i - 1].t) {
      throw Error("trajectory '" + traj.id + "' timestamps are not strictly increasing");
    }
  }
}

void validate(const PublishedTrajectory& pub, const GridSpace& gs) {
  for (std::size_t i = 0; i < pub.regions.size(); ++i) {
    if (!gs.inside(pub.regions[i].region)) {
      throw Error("published trajectory '" + pub.id + "' has a region outside the grid");
    }
    if (i > 0 && pub.regions[i].t <= pub.regions[i - 1].t) {
      throw Error("published trajectory '" + pub.id + "' timestamps are not strictly increasing");
    }
  }
}

}  // namespace trajpriv
