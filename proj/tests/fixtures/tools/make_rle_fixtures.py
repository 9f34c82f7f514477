"""Regenerates rle_fixtures.json with pycocotools as the reference encoder."""
import json
import numpy as np
from pycocotools import mask as coco_mask

rng = np.random.default_rng(20240611)
cases = []

def add(m):
    m = np.asfortranarray(m.astype(np.uint8))
    enc = coco_mask.encode(m)
    h, w = m.shape
    # uncompressed counts via a column-major walk
    flat = m.flatten(order="F")
    counts, cur, run = [], 0, 0
    for v in flat:
        if v != cur:
            counts.append(run); run = 0; cur = v
        run += 1
    counts.append(run)
    cases.append({
        "size": [int(h), int(w)],
        "rows": ["".join(str(int(v)) for v in row) for row in m],
        "counts": [int(c) for c in counts],
        "compressed": enc["counts"].decode("ascii"),
        "area": int(coco_mask.area(enc)),
        "bbox": [float(v) for v in coco_mask.toBbox(enc)],
    })

add(np.zeros((3, 4)))
add(np.ones((3, 4)))
m = np.zeros((2, 2)); m[1, 0] = 1; m[0, 1] = 1; add(m)
m = np.zeros((5, 7)); m[2, 3] = 1; add(m)
for p in (0.05, 0.3, 0.5, 0.9):
    add(rng.random((17, 23)) < p)
for _ in range(4):
    h, w = rng.integers(40, 120, size=2)
    m = np.zeros((h, w))
    y1, x1 = rng.integers(0, h // 2), rng.integers(0, w // 2)
    m[y1:y1 + rng.integers(5, h // 2), x1:x1 + rng.integers(5, w // 2)] = 1
    yy, xx = np.mgrid[:h, :w]
    cy, cx, r = rng.integers(0, h), rng.integers(0, w), rng.integers(5, 30)
    m[(yy - cy) ** 2 + (xx - cx) ** 2 < r * r] = 1
    add(m)
# long runs with large negative deltas
m = np.zeros((300, 3)); m[:290, 0] = 1; m[5:7, 1] = 1; m[100:299, 2] = 1; add(m)

with open("rle_fixtures.json", "w") as f:
    json.dump({"generator": "pycocotools " + __import__("pycocotools").__version__
               if hasattr(__import__("pycocotools"), "__version__") else "pycocotools",
               "cases": cases}, f, indent=1)
print(len(cases))
