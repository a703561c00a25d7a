"""Smoke test for the slatsim extension.

Build first:  cargo build --release -p slatsim-py
Then run:     python3 python/smoke_test.py
"""

import json
import os
import shutil
import sys

HERE = os.path.dirname(os.path.abspath(__file__))
ROOT = os.path.dirname(HERE)


def load():
    built = os.path.join(ROOT, "target", "release", "libslatsim_py.so")
    if os.path.exists(built):
        shutil.copy(built, os.path.join(HERE, "slatsim.so"))
    sys.path.insert(0, HERE)
    import slatsim

    return slatsim


def main():
    slatsim = load()
    assert "zigzag-counter" in slatsim.fixture_names()

    ts = slatsim.TileSystem.fixture("zigzag-counter")
    assert ts.classify() == "zigzag"
    want = sorted(ts.run(10_000, 3))

    cs = ts.compile("zigzag", 4)
    assert cs.scale == 8
    side, count, length = cs.bounds()
    assert (side, length) == (8, 12) and count <= 16

    slats, terminal, image = cs.run(5000, 3)
    assert terminal and sorted(image) == want, "represented assembly differs from the tile run"

    rep = json.loads(cs.verify(bound=4, runs=3, steps=300, seed=1))
    assert rep["pass"], rep

    again = slatsim.TileSystem.from_json(ts.to_json())
    assert again.tile_names == ts.tile_names

    assert cs.render(200, 0).startswith("<svg")
    try:
        ts.compile("zigzag", 3)
    except ValueError as e:
        assert "cooperativity must be even and > 2" in str(e)
    else:
        raise AssertionError("odd cooperativity accepted")

    print(f"ok: {slats} slats, {len(image)} tiles represented, verify pass")


if __name__ == "__main__":
    main()
