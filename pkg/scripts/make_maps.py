"""Regenerate the bundled map files in src/collmap/maps/.

    python scripts/make_maps.py

The basilica-like plan: west narthex, a long nave flanked by two aisles
behind pillar rows, a transept crossing, an east apse and small side
chapels off both aisles. Walls are one cell thick.
"""

from pathlib import Path

import numpy as np

OUT = Path(__file__).resolve().parents[1] / "src" / "collmap" / "maps"


def box(g, r0, r1, c0, c1, value=True):
    g[r0 : r1 + 1, c0 : c1 + 1] = value


def hline(g, r, c0, c1):
    g[r, c0 : c1 + 1] = True


def vline(g, c, r0, r1):
    g[r0 : r1 + 1, c] = True


def basilica(h=60, w=80):
    g = np.zeros((h, w), dtype=bool)
    g[0, :] = g[-1, :] = g[:, 0] = g[:, -1] = True

    # narthex wall (west), doors into nave and both aisles
    vline(g, 9, 1, h - 2)
    for r0, r1 in ((13, 14), (28, 31), (45, 46)):
        box(g, r0, r1, 9, 9, False)

    # aisle/nave separation: pillar rows with 3-cell gaps
    for r in (19, 40):
        for c in range(10, 60):
            if (c - 10) % 5 == 0:
                box(g, r, r, c, c + 1)

    # chapels north (rows 1..7) and south (rows 52..58), one door each
    hline(g, 8, 10, 49)
    hline(g, h - 9, 10, 49)
    for c in range(10, 50, 10):
        vline(g, c, 1, 7)
        vline(g, c, h - 8, h - 2)
    for c in range(14, 50, 10):
        g[8, c] = g[8, c + 1] = False
        g[h - 9, c] = g[h - 9, c + 1] = False

    # transept crossing: cols 50..59 open north/south through the aisles,
    # arms closed by walls with a central door
    vline(g, 60, 1, 18)
    vline(g, 60, 41, h - 2)
    g[9:12, 60] = False
    g[48:51, 60] = False

    # apse: east end, chord wall with a wide opening, rounded corners
    vline(g, 66, 1, h - 2)
    box(g, 24, 35, 66, 66, False)
    g[5:8, 66] = False
    g[52:55, 66] = False
    rr, cc = np.mgrid[0:h, 0:w]
    outside = ((rr - 29.5) ** 2 / 29.0**2 + (cc - 62.0) ** 2 / 17.0**2) > 1.0
    g[(cc > 66) & outside] = True

    # altar block and a few interior partitions in the arms
    box(g, 28, 31, 72, 73)
    hline(g, 14, 61, 64)
    hline(g, 45, 61, 64)

    # cloister-ish obstacles inside the narthex
    for r in range(6, h - 6, 8):
        box(g, r, r + 1, 4, 5)
    g[0, :] = g[-1, :] = g[:, 0] = g[:, -1] = True
    return g


def test20():
    g = np.zeros((20, 20), dtype=bool)
    g[0, :] = g[-1, :] = g[:, 0] = g[:, -1] = True
    vline(g, 9, 1, 18)
    g[4:6, 9] = False
    g[14, 9] = False
    hline(g, 11, 10, 18)
    g[11, 15:17] = False
    box(g, 5, 6, 4, 5)
    return g


def render(g, spawns=()):
    rows = [["#" if b else "." for b in row] for row in g]
    for r, c in spawns:
        assert not g[r, c]
        rows[r][c] = "S"
    return "\n".join("".join(r) for r in rows) + "\n"


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    (OUT / "basilica.map").write_text(render(basilica()), encoding="utf-8")
    (OUT / "test20.map").write_text(render(test20(), spawns=[(2, 2), (2, 3), (16, 15)]), encoding="utf-8")
    print("wrote", OUT)


if __name__ == "__main__":
    main()
