"""Independent reference for the ingest golden files.

Re-implements PLT/Porto parsing, windowed subsampling, box/gap splitting,
max_len chunking and spherical-earth discretization in plain Python, then
writes golden/<dataset>_trajectories.jsonl and golden/<dataset>_counts.json.
"""

import calendar
import csv
import json
import math
import pathlib

R = 6371008.8
HERE = pathlib.Path(__file__).parent


class Grid:
    def __init__(self, g):
        self.lon_min, self.lon_max = g["lon_min"], g["lon_max"]
        self.lat_min, self.lat_max = g["lat_min"], g["lat_max"]
        self.dlat = g["cell_size_m"] * (180.0 / (math.pi * R))
        self.dlon = self.dlat / math.cos(0.5 * (self.lat_min + self.lat_max) * math.pi / 180.0)
        self.rows = max(1, math.ceil((self.lat_max - self.lat_min) / self.dlat - 1e-9))
        self.cols = max(1, math.ceil((self.lon_max - self.lon_min) / self.dlon - 1e-9))

    def inside(self, lon, lat):
        return self.lon_min <= lon <= self.lon_max and self.lat_min <= lat <= self.lat_max

    def cell(self, lon, lat):
        fr = (self.lat_max - lat) / self.dlat
        fc = (lon - self.lon_min) / self.dlon
        # Fixture points are authored well away from cell edges.
        for f in (fr, fc):
            assert min(f - math.floor(f), math.ceil(f) - f) > 1e-3 or f == int(f), f
        return min(math.floor(fr), self.rows - 1), min(math.floor(fc), self.cols - 1)


def read_plt(path):
    points, skipped = [], 0
    lines = path.read_text().splitlines()
    for line in lines[6:]:
        if not line.strip():
            continue
        f = line.split(",")
        try:
            assert len(f) == 7
            lat, lon = float(f[0]), float(f[1])
            y, mo, d = map(int, f[5].split("-"))
            h, mi, s = map(int, f[6].split(":"))
            t = calendar.timegm((y, mo, d, h, mi, s))
            import datetime
            datetime.date(y, mo, d)
        except Exception:
            skipped += 1
            continue
        points.append((lat, lon, t))
    return points, skipped


def read_porto(path):
    tracks, malformed, missing = [], 0, 0
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    head = rows[0]
    for r in rows[1:]:
        rec = dict(zip(head, r))
        if rec["MISSING_DATA"] == "True":
            missing += 1
            continue
        try:
            start = int(rec["TIMESTAMP"])
            poly = json.loads(rec["POLYLINE"])
        except ValueError:
            malformed += 1
            continue
        tracks.append((rec["TRIP_ID"], [(lat, lon, start + 15 * i) for i, (lon, lat) in enumerate(poly)]))
    return tracks, malformed, missing


def preprocess(tracks, grid, sub=18, min_len=5, max_len=30):
    out = []
    for tid, pts in tracks:
        if not pts:
            continue
        kept, last_w, t0 = [], None, pts[0][2]
        for lat, lon, t in pts:
            w = math.floor((t - t0) / sub)
            if w != last_w:
                kept.append((lat, lon, t))
                last_w = w
        segs = [[]]
        for lat, lon, t in kept:
            if not grid.inside(lon, lat):
                if segs[-1]:
                    segs.append([])
                continue
            if segs[-1] and t - segs[-1][-1][0] > 3 * sub:
                segs.append([])
            r, c = grid.cell(lon, lat)
            segs[-1].append((t, r, c))
        pieces = [s[i:i + max_len] for s in segs for i in range(0, len(s), max_len)]
        for k, p in enumerate(pieces):
            if len(p) >= min_len:
                out.append({"id": tid if len(pieces) == 1 else f"{tid}_{k}", "points": [list(x) for x in p]})
    return out


def write(name, trajs, counts):
    gold = HERE / "golden"
    gold.mkdir(exist_ok=True)
    (gold / f"{name}_trajectories.jsonl").write_text(
        "".join(json.dumps(t, separators=(",", ":")) + "\n" for t in trajs))
    (gold / f"{name}_counts.json").write_text(json.dumps(counts, indent=2) + "\n")


def main():
    cfg = json.loads((HERE / "geolife.json").read_text())
    grid = Grid(cfg["grid"])
    tracks, skipped = [], 0
    for f in sorted((HERE / "geolife").glob("*.plt")):
        pts, s = read_plt(f)
        skipped += s
        tracks.append((f.stem, pts))
    write("geolife", preprocess(tracks, grid), {"rows_skipped": skipped})

    cfg = json.loads((HERE / "porto.json").read_text())
    tracks, malformed, missing = read_porto(HERE / "porto.csv")
    write("porto", preprocess(tracks, Grid(cfg["grid"])),
          {"rows_malformed": malformed, "rows_missing_data": missing})


if __name__ == "__main__":
    main()
