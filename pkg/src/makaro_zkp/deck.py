"""Physical layer of the card protocol: cards, matrices, shuffles, transcripts.

Every card is distinct (standard-deck model) but all backs look alike, so a
face-down card reveals nothing.  The protocol arranges cards into small
matrices and shuffles whole columns; both shuffle kinds draw from a seedable
stream so runs are reproducible.  A Transcript records what an onlooker sees:
placements, shuffle occurrences, reveals, and rearrangements.  Face-down
cards never put their identity into the transcript.
"""

from __future__ import annotations

import random
from typing import Iterable, NamedTuple


class DeckError(Exception):
    pass


class CardId(NamedTuple):
    """One physical card: a set name plus a 1-based index within the set."""

    set: str
    index: int

    def __str__(self) -> str:
        return f"{self.set}#{self.index}"


def cell_card(room: str, value: int) -> CardId:
    return CardId(f"room:{room}", value)


def help_card(index: int) -> CardId:
    return CardId("help", index)


def encoding_card(letter: str, index: int) -> CardId:
    return CardId(f"enc:{letter}", index)


def parse_card(text: str) -> CardId:
    set_name, sep, index = text.rpartition("#")
    if not sep or not index.isdigit():
        raise DeckError(f"bad card {text!r}")
    return CardId(set_name, int(index))


class RandomSource:
    """Two independent seeded streams.

    shuffle_stream drives the public shuffles; prover_stream is the prover's
    private randomness (secret card orders).  Seeding with the same value
    reproduces a run bit for bit.  Trial i of a batch uses the derived seed
    "<seed>:<i>", so results are independent of how trials are distributed
    across workers.
    """

    def __init__(self, shuffle_stream: random.Random, prover_stream: random.Random):
        self.shuffle_stream = shuffle_stream
        self.prover_stream = prover_stream

    @classmethod
    def from_seed(cls, seed: int | str) -> "RandomSource":
        return cls(random.Random(f"{seed}/shuffle"), random.Random(f"{seed}/prover"))

    @classmethod
    def for_trial(cls, seed: int | str, trial: int) -> "RandomSource":
        return cls.from_seed(f"{seed}:{trial}")


class Transcript:
    """Everything the verifier observes, in order.

    Events are tuples whose first element is the kind.  site_patterns mirrors
    the reveal events grouped by reveal site, which is what the statistics
    consume; it is derived data and is rebuilt when a transcript is parsed
    back from text.
    """

    __slots__ = ("events", "site_patterns")

    def __init__(self) -> None:
        self.events: list[tuple] = []
        self.site_patterns: list[tuple[str, tuple[CardId, ...]]] = []

    def append(self, event: tuple) -> None:
        self.events.append(event)

    def add_pattern(self, site: str, pattern: tuple[CardId, ...]) -> None:
        self.site_patterns.append((site, pattern))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Transcript) and self.events == other.events

    def __len__(self) -> int:
        return len(self.events)

    def to_text(self) -> str:
        return "".join(_format_event(ev) + "\n" for ev in self.events)

    @classmethod
    def from_text(cls, text: str) -> "Transcript":
        t = cls()
        for line in text.splitlines():
            if line.strip():
                t.append(_parse_event(line))
        t.site_patterns = collect_site_patterns(t.events)
        return t


def collect_site_patterns(events: Iterable[tuple]) -> list[tuple[str, tuple[CardId, ...]]]:
    """Group consecutive reveals under the preceding site marker."""
    out: list[tuple[str, tuple[CardId, ...]]] = []
    site: str | None = None
    cards: list[CardId] = []
    for ev in events:
        kind = ev[0]
        if kind == "reveal" and site is not None:
            cards.append(ev[2])
        else:
            if site is not None:
                out.append((site, tuple(cards)))
                site, cards = None, []
            if kind == "site":
                site = ev[1]
    if site is not None:
        out.append((site, tuple(cards)))
    return out


def _fmt_pos(pos: tuple[int, int]) -> str:
    return f"{pos[0]},{pos[1]}"


def _format_event(ev: tuple) -> str:
    kind = ev[0]
    if kind == "place":
        return f"place pos={_fmt_pos(ev[1])} card={ev[2]}"
    if kind == "place-hidden":
        return f"place-hidden pos={_fmt_pos(ev[1])}"
    if kind == "collect":
        return f"collect src={ev[1]} row={ev[2]} count={ev[3]}"
    if kind == "helps":
        return f"helps row={ev[1]} count={ev[2]}"
    if kind == "marker":
        return f"marker card={ev[1]} row={ev[2]} col={ev[3]}"
    if kind == "hidden-fill":
        return f"hidden-fill row={ev[1]} count={ev[2]}"
    if kind == "shuffle":
        return f"shuffle kind={ev[1]}"
    if kind == "site":
        return f"site key={ev[1]}"
    if kind == "reveal":
        return f"reveal pos={_fmt_pos(ev[1])} card={ev[2]}"
    if kind == "rearrange":
        return "rearrange perm=" + ",".join(str(i) for i in ev[1])
    if kind == "turn-down":
        return "turn-down"
    if kind == "extract":
        return f"extract row={ev[1]} count={ev[2]}"
    if kind == "tail":
        return f"tail count={ev[1]}"
    if kind == "restore":
        return f"restore dst={ev[1]} count={ev[2]}"
    if kind == "begin":
        return f"begin kind={ev[1]} key={ev[2]}"
    if kind == "end":
        return f"end kind={ev[1]} key={ev[2]} result={'pass' if ev[3] else 'fail'}"
    raise DeckError(f"unknown event {ev!r}")


def _parse_pos(text: str) -> tuple[int, int]:
    r, c = text.split(",")
    return (int(r), int(c))


def _parse_event(line: str) -> tuple:
    kind, _, rest = line.partition(" ")
    fields = {}
    for item in rest.split() if rest else []:
        key, _, value = item.partition("=")
        fields[key] = value
    try:
        if kind == "place":
            return ("place", _parse_pos(fields["pos"]), parse_card(fields["card"]))
        if kind == "place-hidden":
            return ("place-hidden", _parse_pos(fields["pos"]))
        if kind == "collect":
            return ("collect", fields["src"], int(fields["row"]), int(fields["count"]))
        if kind == "helps":
            return ("helps", int(fields["row"]), int(fields["count"]))
        if kind == "marker":
            return ("marker", parse_card(fields["card"]), int(fields["row"]), int(fields["col"]))
        if kind == "hidden-fill":
            return ("hidden-fill", int(fields["row"]), int(fields["count"]))
        if kind == "shuffle":
            return ("shuffle", fields["kind"])
        if kind == "site":
            return ("site", fields["key"])
        if kind == "reveal":
            return ("reveal", _parse_pos(fields["pos"]), parse_card(fields["card"]))
        if kind == "rearrange":
            return ("rearrange", tuple(int(i) for i in fields["perm"].split(",")))
        if kind == "turn-down":
            return ("turn-down",)
        if kind == "extract":
            return ("extract", int(fields["row"]), int(fields["count"]))
        if kind == "tail":
            return ("tail", int(fields["count"]))
        if kind == "restore":
            return ("restore", fields["dst"], int(fields["count"]))
        if kind == "begin":
            return ("begin", fields["kind"], fields["key"])
        if kind == "end":
            return ("end", fields["kind"], fields["key"], fields["result"] == "pass")
    except (KeyError, ValueError) as exc:
        raise DeckError(f"bad transcript line {line!r}") from exc
    raise DeckError(f"bad transcript line {line!r}")


class CardMatrix:
    """A rows x cols arrangement of card slots, shuffled by whole columns."""

    __slots__ = ("rows", "cols", "_ids", "_faces")

    def __init__(self, rows: int, cols: int):
        if rows < 1 or cols < 1:
            raise DeckError("matrix needs at least one row and column")
        self.rows = rows
        self.cols = cols
        self._ids: list[CardId | None] = [None] * (rows * cols)
        self._faces = bytearray(rows * cols)  # 1 = face up

    def place(self, row: int, col: int, card: CardId, face_up: bool = False) -> None:
        i = row * self.cols + col
        if self._ids[i] is not None:
            raise DeckError(f"slot ({row},{col}) already holds a card")
        self._ids[i] = card
        self._faces[i] = 1 if face_up else 0

    def card_at(self, row: int, col: int) -> CardId | None:
        return self._ids[row * self.cols + col]

    def is_face_up(self, row: int, col: int) -> bool:
        return bool(self._faces[row * self.cols + col])

    def is_full(self) -> bool:
        return all(c is not None for c in self._ids)

    def row_cards(self, row: int) -> list[CardId | None]:
        return self._ids[row * self.cols:(row + 1) * self.cols]

    def take_row(self, row: int) -> list[CardId]:
        """Remove and return a full row, left to right."""
        start = row * self.cols
        cards = self._ids[start:start + self.cols]
        if any(c is None for c in cards):
            raise DeckError(f"row {row} is not fully occupied")
        for i in range(start, start + self.cols):
            self._ids[i] = None
            self._faces[i] = 0
        return cards  # type: ignore[return-value]

    def permute_columns(self, order: tuple[int, ...]) -> None:
        """Reorder columns so that new column j is old column order[j]."""
        if sorted(order) != list(range(self.cols)):
            raise DeckError(f"bad column order {order!r}")
        ids, faces = self._ids, self._faces
        new_ids: list[CardId | None] = [None] * len(ids)
        new_faces = bytearray(len(ids))
        for j, src in enumerate(order):
            for r in range(self.rows):
                new_ids[r * self.cols + j] = ids[r * self.cols + src]
                new_faces[r * self.cols + j] = faces[r * self.cols + src]
        self._ids = new_ids
        self._faces = new_faces

    def find_in_row(self, row: int, card: CardId) -> int:
        for c in range(self.cols):
            if self._ids[row * self.cols + c] == card:
                return c
        raise DeckError(f"{card} not in row {row}")


def pile_shifting_shuffle(matrix: CardMatrix, source: RandomSource,
                          transcript: Transcript | None = None) -> CardMatrix:
    """Cyclically shift the columns by a uniform hidden offset.

    Old column c ends up at position (c + s) % cols.  Requires every slot
    occupied: piles must have equal height for the shuffle to hide anything.
    """
    if not matrix.is_full():
        raise DeckError("pile-shifting shuffle needs a fully occupied matrix")
    s = source.shuffle_stream.randrange(matrix.cols)
    matrix.permute_columns(tuple((j - s) % matrix.cols for j in range(matrix.cols)))
    if transcript is not None:
        transcript.append(("shuffle", "shift"))
    return matrix


def pile_scramble_shuffle(matrix: CardMatrix, source: RandomSource,
                          transcript: Transcript | None = None) -> CardMatrix:
    """Rearrange the columns by a uniform hidden permutation."""
    if not matrix.is_full():
        raise DeckError("pile-scramble shuffle needs a fully occupied matrix")
    order = list(range(matrix.cols))
    source.shuffle_stream.shuffle(order)
    matrix.permute_columns(tuple(order))
    if transcript is not None:
        transcript.append(("shuffle", "scramble"))
    return matrix


def reveal(matrix: CardMatrix, row: int, col: int, transcript: Transcript) -> CardId:
    """Turn one face-down card face up and record what it shows."""
    card = matrix.card_at(row, col)
    if card is None:
        raise DeckError(f"no card at ({row},{col})")
    if matrix.is_face_up(row, col):
        raise DeckError(f"card at ({row},{col}) is already face up")
    matrix._faces[row * matrix.cols + col] = 1
    transcript.append(("reveal", (row, col), card))
    return card


def turn_all_down(matrix: CardMatrix) -> CardMatrix:
    """Flip every face-up card face down; identities are unchanged."""
    for i in range(len(matrix._faces)):
        if matrix._faces[i]:
            matrix._faces[i] = 0
    return matrix
