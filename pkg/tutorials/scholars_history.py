"""h-index timeline and temporal citation network for one researcher.

Run with ``python3 scholars_history.py``.
"""
from abmbench.scholars import build_tcn, load_history

history = [
    (1968, [6]), (1969, [6]), (1970, [6, 3]), (1971, [20, 6, 3]), (1972, [20, 7, 6, 3]),
    (1973, [20, 7, 6, 6, 3]), (1974, [20, 7, 6, 6, 3, 2, 0]),
    (1975, [166, 20, 7, 6, 6, 3, 3, 2, 0, 0]), (1976, [166, 21, 20, 15, 7, 6, 6, 3, 3, 2, 0, 0]),
    (1977, [166, 122, 103, 71, 21, 20, 15, 8, 7, 6, 6, 3, 3, 2, 0, 0, 0]),
]
for year, h in load_history(history):
    print(year, h)
tcn = build_tcn(history)
print(f"TCN: {len(tcn.graph)} nodes, {tcn.graph.number_of_edges()} edges")
