"""Exhaustive enumeration of small grids, for oracle-based testing.

enumerate_small_grids defines the corpus over which the card protocol is
checked against the plain rule checker: every grid up to the given
dimensions, all-white or with exactly one black cell, every edge-connected
partition of the white cells into rooms, every legal arrow direction, no
clues.  Three caps keep the sweep exhaustive yet affordable; they are part
of the corpus definition:

* product of room-size factorials <= max_candidates (bounds full protocol
  runs per grid),
* product of size**size over rooms <= max_assignment_space (bounds the
  clue-consistent assignment loop, which includes room-duplicating fillings
  that reject at setup), and
* grids larger than all_white_max_cells appear only with a black cell:
  bigger all-white grids repeat room/neighbor shapes the smaller dimensions
  already cover, while a black cell with up to four white neighbors is what
  the largest dimensions uniquely add.
"""

from __future__ import annotations

import math
from itertools import product
from typing import Iterator

from .puzzle import ARROW_DELTAS, Assignment, Black, Cell, Coord, Grid, White, build_grid

_ORTHO = ((-1, 0), (1, 0), (0, -1), (0, 1))
_ROOM_IDS = "ABCDEFGHIJKLMNOPQRSTUVWXYZ"


def _connected_partitions(cells: frozenset[Coord]) -> Iterator[list[frozenset[Coord]]]:
    """All partitions of `cells` into edge-connected groups."""
    if not cells:
        yield []
        return
    seed = min(cells)
    for part in _connected_subsets(seed, cells):
        for rest in _connected_partitions(cells - part):
            yield [part] + rest


def _connected_subsets(seed: Coord, avail: frozenset[Coord]) -> Iterator[frozenset[Coord]]:
    """All connected subsets of `avail` containing `seed`, each exactly once."""

    def grow(current: frozenset[Coord], banned: frozenset[Coord]) -> Iterator[frozenset[Coord]]:
        yield current
        frontier = set()
        for rc in current:
            for dr, dc in _ORTHO:
                nb = (rc[0] + dr, rc[1] + dc)
                if nb in avail and nb not in current and nb not in banned:
                    frontier.add(nb)
        blocked = banned
        for nb in sorted(frontier):
            yield from grow(current | {nb}, blocked)
            blocked = blocked | {nb}

    yield from grow(frozenset([seed]), frozenset())


def _grids_for_mask(height: int, width: int, black: dict[Coord, str],
                    max_candidates: int, max_assignment_space: int) -> Iterator[Grid]:
    whites = frozenset((r, c) for r in range(height) for c in range(width)
                       if (r, c) not in black)
    if not whites:
        return
    for partition in _connected_partitions(whites):
        sizes = [len(part) for part in partition]
        if math.prod(math.factorial(s) for s in sizes) > max_candidates:
            continue
        if math.prod(s ** s for s in sizes) > max_assignment_space:
            continue
        room_of = {}
        parts = sorted(partition, key=min)
        for idx, part in enumerate(parts):
            for rc in part:
                room_of[rc] = _ROOM_IDS[idx]
        cells: list[list[Cell]] = []
        for r in range(height):
            row: list[Cell] = []
            for c in range(width):
                if (r, c) in black:
                    row.append(Black(black[(r, c)]))
                else:
                    row.append(White(room_of[(r, c)]))
            cells.append(row)
        yield build_grid(cells)


def enumerate_small_grids(max_height: int = 3, max_width: int = 3,
                          max_candidates: int = 36,
                          max_assignment_space: int = 324,
                          all_white_max_cells: int = 6,
                          include_black: bool = True) -> list[Grid]:
    """The deterministic small-grid corpus described in the module docstring."""
    grids: list[Grid] = []
    for height in range(1, max_height + 1):
        for width in range(1, max_width + 1):
            coords = [(r, c) for r in range(height) for c in range(width)]
            masks: list[dict[Coord, str]] = [{}] if height * width <= all_white_max_cells else []
            if include_black and height * width >= 2:
                for rc in coords:
                    for arrow, (dr, dc) in ARROW_DELTAS.items():
                        target = (rc[0] + dr, rc[1] + dc)
                        if 0 <= target[0] < height and 0 <= target[1] < width:
                            masks.append({rc: arrow})
            for mask in masks:
                grids.extend(_grids_for_mask(height, width, mask,
                                             max_candidates, max_assignment_space))
    return grids


def all_value_assignments(grid: Grid) -> Iterator[Assignment]:
    """Every clue-consistent filling: each white cell ranges over 1..room size.

    Includes fillings that repeat a value inside a room; those are exactly the
    ones a standard deck cannot place (one card per value per room), so the
    protocol rejects them during setup.
    """
    coords = list(grid.white_coords())
    choices = []
    for rc in coords:
        cell = grid.cell(rc)
        size = grid.room_size(cell.room)
        choices.append((cell.clue,) if cell.clue is not None else tuple(range(1, size + 1)))
    for values in product(*choices):
        yield dict(zip(coords, values))
