"""CMAC tile coding over the five state variables.

Overlapping offset layers of hyper-rectangular receptive fields, one weight
table per action, lazily created weights, exact (collision-free) addressing
with an optional hashed, memory-bounded mode.  Two layouts:

* ``multidim`` -- each layer is a 5-D grid; a state excites one field per
  layer (num_layers fields in total).
* ``onedim`` -- each layer is an interval along a single state variable; a
  state excites num_layers fields per variable (5x as many in total).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import IO, Iterable, Union

from .features import StateFeatures

MULTI_DIM = "multidim"
ONE_DIM = "onedim"

NUM_VARIABLES = 5  # posy, dribbler angle, dribbler-adversary angle, ball-adversary angle, distance

FULL_CIRCLE = 360.0


class SnapshotError(Exception):
    pass


class VersionMismatch(SnapshotError):
    pass


class CorruptSnapshot(SnapshotError):
    pass


class HashCollision(Exception):
    """Two distinct receptive fields mapped to the same hashed slot."""


@dataclass(slots=True)
class TilingSpec:
    mode: str = MULTI_DIM
    num_layers: int = 32
    angle_width: float = 20.0
    dist_width: float = 3.0

    def __post_init__(self):
        if self.mode not in (MULTI_DIM, ONE_DIM):
            raise ValueError(f"unknown cmac mode {self.mode!r}")
        if self.num_layers < 1:
            raise ValueError("num_layers must be >= 1")
        if self.angle_width <= 0 or self.dist_width <= 0:
            raise ValueError("tile widths must be positive")

    @property
    def fields_per_state(self) -> int:
        return self.num_layers * (NUM_VARIABLES if self.mode == ONE_DIM else 1)


Key = tuple  # (action, layer, cells...) in multidim; (action, layer, var, cell) in onedim


class CmacNetwork:
    """Per-action weight tables over the tiled state space."""

    def __init__(self, spec: TilingSpec, num_actions: int = 5,
                 hash_size: int | None = None):
        self.spec = spec
        self.num_actions = num_actions
        self.weights: dict = {}
        self.hash_size = hash_size
        self._slot_key: dict[int, Key] = {} if hash_size else {}
        n = spec.num_layers
        self._fractions = [layer / n for layer in range(n)]
        self._angle_cells = math.ceil(FULL_CIRCLE / spec.angle_width)

    # -- excitation -----------------------------------------------------

    def _angle_cell(self, value: float, offset: float) -> int:
        return int((value % FULL_CIRCLE + offset) // self.spec.angle_width) % self._angle_cells

    def _layer_cells(self, s: StateFeatures) -> list[tuple]:
        """Per-layer cell coordinates, shared across actions."""
        aw = self.spec.angle_width
        dw = self.spec.dist_width
        a1 = s.dribbler_angle % FULL_CIRCLE
        a2 = s.dribbler_adversary_angle % FULL_CIRCLE
        a3 = s.ball_adversary_angle % FULL_CIRCLE
        dist = s.ball_adversary_dist
        posy = s.posy
        nang = self._angle_cells
        cells = []
        for frac in self._fractions:
            ao = frac * aw
            do = frac * dw
            cells.append((
                posy,  # categorical: 3 cells, no offsets
                int((a1 + ao) // aw) % nang,
                int((a2 + ao) // aw) % nang,
                int((a3 + ao) // aw) % nang,
                int((dist + do) // dw),
            ))
        return cells

    def excite(self, s: StateFeatures, action: int) -> list[Key]:
        cells = self._layer_cells(s)
        if self.spec.mode == MULTI_DIM:
            return [(action, layer) + cell for layer, cell in enumerate(cells)]
        return [(action, layer, var, cell[var])
                for layer, cell in enumerate(cells)
                for var in range(NUM_VARIABLES)]

    def excite_all(self, s: StateFeatures) -> list[list[Key]]:
        """Excited key lists for every action (cells computed once)."""
        cells = self._layer_cells(s)
        if self.spec.mode == MULTI_DIM:
            return [[(action, layer) + cell for layer, cell in enumerate(cells)]
                    for action in range(self.num_actions)]
        return [[(action, layer, var, cell[var])
                 for layer, cell in enumerate(cells)
                 for var in range(NUM_VARIABLES)]
                for action in range(self.num_actions)]

    # -- weights --------------------------------------------------------

    def _slot(self, key: Key):
        if self.hash_size is None:
            return key
        slot = hash(key) % self.hash_size
        stored = self._slot_key.get(slot)
        if stored is None:
            self._slot_key[slot] = key
        elif stored != key:
            raise HashCollision(f"slot {slot}: {stored} vs {key}")
        return slot

    def q_for(self, excited: Iterable[Key]) -> float:
        w = self.weights
        if self.hash_size is None:
            return sum(w.get(k, 0.0) for k in excited)
        return sum(w.get(self._slot(k), 0.0) for k in excited)

    def q_value(self, s: StateFeatures, action: int) -> float:
        return self.q_for(self.excite(s, action))

    def q_values(self, s: StateFeatures) -> list[float]:
        return [self.q_for(ex) for ex in self.excite_all(s)]

    def apply_delta(self, excited: Iterable[Key], alpha: float, delta: float) -> None:
        inc = alpha * delta
        w = self.weights
        if self.hash_size is None:
            for k in excited:
                w[k] = w.get(k, 0.0) + inc
        else:
            for k in excited:
                slot = self._slot(k)
                w[slot] = w.get(slot, 0.0) + inc

    def _items_by_key(self):
        if self.hash_size is None:
            return self.weights.items()
        return ((self._slot_key[slot], w) for slot, w in self.weights.items())


# ---------------------------------------------------------------------------
# Snapshots

SNAPSHOT_MAGIC = "dribblesim-cmac"
SNAPSHOT_VERSION = 1


def save_weights(net: CmacNetwork, sink: Union[str, IO[str]]) -> None:
    """Write a versioned text snapshot; records are sorted for reproducibility."""
    records = sorted(net._items_by_key())
    lines = [
        f"{SNAPSHOT_MAGIC} {SNAPSHOT_VERSION}",
        f"mode {net.spec.mode}",
        f"num_layers {net.spec.num_layers}",
        f"angle_width {net.spec.angle_width!r}",
        f"dist_width {net.spec.dist_width!r}",
        f"num_actions {net.num_actions}",
        f"records {len(records)}",
    ]
    for key, weight in records:
        lines.append(" ".join(str(part) for part in key) + " " + float(weight).hex())
    text = "\n".join(lines) + "\n"
    if isinstance(sink, str):
        with open(sink, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sink.write(text)


def _header_value(lines: list[str], index: int, name: str) -> str:
    if index >= len(lines):
        raise CorruptSnapshot(f"line {index + 1}: missing header field {name!r}")
    parts = lines[index].split(None, 1)
    if len(parts) != 2 or parts[0] != name:
        raise CorruptSnapshot(f"line {index + 1}: expected {name!r} header, got {lines[index]!r}")
    return parts[1]


def load_weights(source: Union[str, IO[str]]) -> CmacNetwork:
    if isinstance(source, str):
        with open(source, "r", encoding="utf-8") as fh:
            text = fh.read()
    else:
        text = source.read()
    lines = text.splitlines()
    if not lines:
        raise CorruptSnapshot("line 1: empty snapshot")
    magic = lines[0].split()
    if len(magic) != 2 or magic[0] != SNAPSHOT_MAGIC:
        raise CorruptSnapshot(f"line 1: bad magic {lines[0]!r}")
    if magic[1] != str(SNAPSHOT_VERSION):
        raise VersionMismatch(f"snapshot version {magic[1]}, expected {SNAPSHOT_VERSION}")
    try:
        spec = TilingSpec(
            mode=_header_value(lines, 1, "mode"),
            num_layers=int(_header_value(lines, 2, "num_layers")),
            angle_width=float(_header_value(lines, 3, "angle_width")),
            dist_width=float(_header_value(lines, 4, "dist_width")),
        )
    except ValueError as exc:
        raise CorruptSnapshot(f"bad header: {exc}") from exc
    num_actions = int(_header_value(lines, 5, "num_actions"))
    num_records = int(_header_value(lines, 6, "records"))
    net = CmacNetwork(spec, num_actions=num_actions)
    key_len = 4 if spec.mode == ONE_DIM else 2 + NUM_VARIABLES
    body = lines[7:]
    if len(body) != num_records:
        raise CorruptSnapshot(
            f"line {len(lines) + 1}: expected {num_records} records, found {len(body)}")
    for i, line in enumerate(body):
        parts = line.split()
        if len(parts) != key_len + 1:
            raise CorruptSnapshot(f"line {8 + i}: malformed record {line!r}")
        try:
            key = tuple(int(p) for p in parts[:key_len])
            weight = float.fromhex(parts[key_len])
        except ValueError as exc:
            raise CorruptSnapshot(f"line {8 + i}: {exc}") from exc
        net.weights[key] = weight
    return net
