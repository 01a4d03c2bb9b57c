#!/usr/bin/env python3
"""Regenerates the ASCII occupancy-grid fixtures under tests/fixtures/.

A cell is occupied when its center lies inside (or on the edge of) one of the
polygons listed for the map. The first body line is the top row (highest y).
"""

import pathlib
import sys

RES = 0.05


def inside(px, py, poly):
    # even-odd rule; points on an edge count as inside
    n = len(poly)
    hit = False
    for k in range(n):
        x0, y0 = poly[k]
        x1, y1 = poly[(k + 1) % n]
        cross = (x1 - x0) * (py - y0) - (y1 - y0) * (px - x0)
        if abs(cross) < 1e-12 and min(x0, x1) - 1e-12 <= px <= max(x0, x1) + 1e-12 \
                and min(y0, y1) - 1e-12 <= py <= max(y0, y1) + 1e-12:
            return True
        if (y0 > py) != (y1 > py):
            xi = x0 + (py - y0) * (x1 - x0) / (y1 - y0)
            if px < xi:
                hit = not hit
    return hit


def rect(x0, y0, x1, y1):
    return [(x0, y0), (x1, y0), (x1, y1), (x0, y1)]


def render(width_m, height_m, polys):
    w = round(width_m / RES)
    h = round(height_m / RES)
    rows = []
    for iy in reversed(range(h)):
        cy = (iy + 0.5) * RES
        row = []
        for ix in range(w):
            cx = (ix + 0.5) * RES
            row.append('#' if any(inside(cx, cy, p) for p in polys) else '.')
        rows.append(''.join(row))
    return f"{w} {h} {RES} 0 0\n" + "\n".join(rows) + "\n"


MAPS = {
    # convex pentagon straddling the start-goal diagonal
    "single_obstacle.txt": (10.0, 8.0, [
        [(3.4, 3.0), (5.2, 2.8), (5.6, 4.4), (4.4, 5.2), (3.2, 4.4)],
    ]),
    "three_obstacles.txt": (10.0, 8.0, [
        [(2.0, 2.2), (3.6, 1.9), (3.0, 3.5)],
        [(4.3, 3.6), (5.7, 3.4), (5.9, 4.8), (4.5, 5.1)],
        [(6.6, 4.4), (7.8, 4.2), (8.2, 5.2), (7.0, 5.5)],
    ]),
    "rectangle.txt": (10.0, 8.0, [rect(4.0, 3.0, 6.0, 5.0)]),
    "lshape.txt": (10.0, 8.0, [
        [(3.5, 2.5), (6.0, 2.5), (6.0, 3.75), (4.75, 3.75), (4.75, 5.0), (3.5, 5.0)],
    ]),
    # four wall bars with open corners, two chairs between start and goal
    "room.txt": (8.0, 6.0, [
        rect(0.5, 0.0, 7.5, 0.2),
        rect(0.5, 5.8, 7.5, 6.0),
        rect(0.0, 0.5, 0.2, 5.5),
        rect(7.8, 0.5, 8.0, 5.5),
        rect(4.7, 3.8, 5.2, 4.3),
        rect(4.9, 2.2, 5.4, 2.7),
    ]),
}


def main():
    out = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else
                       pathlib.Path(__file__).resolve().parents[2] / "tests" / "fixtures")
    out.mkdir(parents=True, exist_ok=True)
    for name, (w, h, polys) in MAPS.items():
        (out / name).write_text(render(w, h, polys))
        print("wrote", out / name)


if __name__ == "__main__":
    main()
