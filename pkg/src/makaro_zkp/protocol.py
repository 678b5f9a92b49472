"""The interactive proof: a prover convinces a verifier that a hidden Makaro
solution is valid without exposing any cell value.

Setup places one face-down cell card per white cell (card index = hidden
value; each room has its own card set, so a value can only be placed once per
room).  Three check families then run, in a fixed public schedule:

* room checks: a room's cards plus helping cards are column-shuffled and the
  cell cards revealed; any multiset other than the room's full card set would
  expose a bad room, while a valid one reveals only a uniformly random order.
* neighbor checks: both cells are converted into value-encoding sequences (a
  marker card hides at the position equal to the cell value, all other cards
  in secret uniform order); after a column scramble the marker of one row is
  found and the card above/below it revealed.  Equal values would put both
  markers in the same column every time.
* arrow checks: the pointed cell and its rivals become encoding sequences of
  length 2m-1; after a cyclic column shift, a window of m columns starting at
  the pointed marker is revealed in every rival row.  A rival marker can land
  in that window exactly when its value is >= the pointed value.

Conversions return each room's cards to the grid untouched, so checks can run
in any number.  Each reveal shows a distribution that depends only on the
grid, never on the hidden values, which is what simulate_transcript
reproduces without seeing any solution.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .deck import (
    CardId,
    CardMatrix,
    RandomSource,
    Transcript,
    cell_card,
    encoding_card,
    help_card,
    pile_scramble_shuffle,
    pile_shifting_shuffle,
    reveal,
    turn_all_down,
)
from .puzzle import (
    ARROW_DELTAS,
    Assignment,
    Coord,
    Grid,
    black_coords,
    stats,
    white_neighbor_pairs,
)

ENC_LETTERS = ("a", "b", "c", "d")
_CLOCKWISE = ("^", ">", "v", "<")


class ProtocolError(Exception):
    pass


class SetupError(ProtocolError):
    """The prover's values cannot be placed with the available cards."""

    def __init__(self, message: str, room: str):
        super().__init__(message)
        self.room = room


class CardsUnavailable(ProtocolError):
    pass


@dataclass
class ProverState:
    """The prover's secret assignment and private randomness."""

    secret: Assignment
    rng: random.Random


def make_prover(assignment: Assignment, source: RandomSource) -> ProverState:
    return ProverState(dict(assignment), source.prover_stream)


@dataclass
class EncodingSequence:
    """m face-down cards of one set; the marker (index 1) sits at the position
    equal to the encoded value, the rest are in an order only the prover knows."""

    letter: str
    length: int
    cards: list[CardId]


@dataclass(frozen=True)
class FailedCheck:
    kind: str        # "room" | "neighbor" | "arrow"
    subject: object  # room id, ((r,c),(r,c)), or (r,c)
    at_setup: bool = False

    def __str__(self) -> str:
        if self.kind == "room":
            where = f"room {self.subject}"
        elif self.kind == "neighbor":
            (a, b) = self.subject  # type: ignore[misc]
            where = f"neighbor pair {a}-{b}"
        else:
            where = f"arrow at {self.subject}"
        return where + (" (at setup)" if self.at_setup else "")


@dataclass(frozen=True)
class Verdict:
    accepted: bool
    failing_check: FailedCheck | None = None


class TableState:
    """All cards in play: the grid zone plus the helping/encoding free pools.

    Tracks how many cards are simultaneously on the table; peak_cards is
    checked against the deck budget.
    """

    def __init__(self, grid: Grid):
        self.grid = grid
        st = stats(grid)
        self.n = st.n
        self.k = st.k
        self.enc_len = 2 * st.k - 1
        self.cell_cards: dict[Coord, CardId | None] = {}
        self.room_cards = {
            room: tuple(cell_card(room, v) for v in range(1, len(cells) + 1))
            for room, cells in grid.rooms.items()
        }
        self.helps = tuple(help_card(i) for i in range(1, st.k + 1))
        self.enc = {
            letter: tuple(encoding_card(letter, i) for i in range(1, self.enc_len + 1))
            for letter in ENC_LETTERS
        }
        self._help_out = 0
        self._enc_out = dict.fromkeys(ENC_LETTERS, 0)
        self._in_play = 0
        self.peak_cards = 0

    def _bump(self, count: int) -> None:
        self._in_play += count
        if self._in_play > self.peak_cards:
            self.peak_cards = self._in_play

    def place_cell(self, rc: Coord, card: CardId) -> None:
        if self.cell_cards.get(rc) is not None:
            raise ProtocolError(f"cell {rc} already holds a card")
        self.cell_cards[rc] = card
        self._bump(1)

    def remove_cell(self, rc: Coord) -> CardId:
        card = self.cell_cards.get(rc)
        if card is None:
            raise ProtocolError(f"no card on cell {rc}")
        self.cell_cards[rc] = None
        return card

    def put_cell(self, rc: Coord, card: CardId) -> None:
        if self.cell_cards.get(rc) is not None:
            raise ProtocolError(f"cell {rc} already holds a card")
        self.cell_cards[rc] = card

    def take_helps(self, count: int) -> tuple[CardId, ...]:
        if self._help_out:
            raise CardsUnavailable("helping cards already in use")
        if count > self.k:
            raise CardsUnavailable(f"only {self.k} helping cards exist")
        self._help_out = count
        self._bump(count)
        return self.helps[:count]

    def return_helps(self) -> None:
        self._in_play -= self._help_out
        self._help_out = 0

    def take_encoding(self, letter: str, count: int) -> tuple[CardId, ...]:
        if self._enc_out[letter]:
            raise CardsUnavailable(f"encoding set {letter} already in use")
        if count > self.enc_len:
            raise CardsUnavailable(f"only {self.enc_len} cards in encoding set {letter}")
        self._enc_out[letter] = count
        self._bump(count)
        return self.enc[letter][:count]

    def return_encoding(self, letter: str) -> None:
        self._in_play -= self._enc_out[letter]
        self._enc_out[letter] = 0

    def assert_settled(self) -> None:
        # card conservation between checks: grid full, every pool card home
        placed = sum(1 for card in self.cell_cards.values() if card is not None)
        if placed != self.n or self._help_out or any(self._enc_out.values()):
            raise ProtocolError("table out of balance between checks")
        if self._in_play != self.n:
            raise ProtocolError("card count drifted")


def make_encoding(letter: str, length: int, value: int, prover: ProverState,
                  table: TableState | None = None) -> EncodingSequence:
    """Encode `value` as a card sequence: marker at that position, the other
    length-1 cards in a secret uniform order.  With a table, the set's cards
    1..length are drawn from (and tracked in) its free pool."""
    if not 1 <= value <= length:
        raise ProtocolError(f"cannot encode {value} in a sequence of {length}")
    if table is not None:
        cards = table.take_encoding(letter, length)
    else:
        cards = tuple(encoding_card(letter, i) for i in range(1, length + 1))
    rest = list(cards[1:])
    prover.rng.shuffle(rest)
    return EncodingSequence(letter, length,
                            rest[:value - 1] + [cards[0]] + rest[value - 1:])


def _sort_order(revealed: list[CardId], canonical: tuple[CardId, ...]) -> tuple[int, ...]:
    """Column order that rearranges a revealed row into canonical order."""
    pos = {card: idx for idx, card in enumerate(revealed)}
    return tuple(pos[card] for card in canonical)


def _reveal_row(matrix: CardMatrix, row: int, transcript: Transcript,
                site: str) -> list[CardId]:
    transcript.append(("site", site))
    cards = [reveal(matrix, row, col, transcript) for col in range(matrix.cols)]
    transcript.add_pattern(site, tuple(cards))
    return cards


def setup_placement(grid: Grid, prover: ProverState, transcript: Transcript) -> TableState:
    """Place one face-down cell card per white cell: clue cards publicly,
    the rest hidden.  Raises SetupError when a needed card does not exist or
    was already used, which is how bad rooms surface."""
    secret = prover.secret
    if set(secret) != set(grid.white_coords()):
        raise ValueError("prover assignment must cover exactly the white cells")
    table = TableState(grid)
    seen: dict[str, set[int]] = {room: set() for room in grid.rooms}
    hidden: list[tuple[Coord, str, int]] = []
    for rc in grid.white_coords():
        cell = grid.cell(rc)
        if cell.clue is None:
            hidden.append((rc, cell.room, secret[rc]))
            continue
        if secret[rc] != cell.clue:
            raise ValueError(f"prover value at {rc} contradicts the clue")
        if cell.clue in seen[cell.room]:
            raise SetupError(f"two cards of value {cell.clue} needed in room {cell.room!r}",
                             cell.room)
        seen[cell.room].add(cell.clue)
        card = cell_card(cell.room, cell.clue)
        table.place_cell(rc, card)
        transcript.append(("place", rc, card))
    for rc, room, value in hidden:
        if value > len(grid.rooms[room]):
            raise SetupError(f"no card of value {value} in room {room!r}", room)
        if value in seen[room]:
            raise SetupError(f"two cards of value {value} needed in room {room!r}", room)
        seen[room].add(value)
        table.place_cell(rc, cell_card(room, value))
        transcript.append(("place-hidden", rc))
    return table


def verify_room(table: TableState, room: str, source: RandomSource,
                transcript: Transcript) -> bool:
    """Check that a room's cards are exactly its full set, revealing only a
    shuffled order.  Restores the cards to their cells on success."""
    grid = table.grid
    cells = grid.rooms[room]
    p = len(cells)
    canonical = table.room_cards[room]
    transcript.append(("begin", "room", room))
    matrix = CardMatrix(2, p)
    for col, rc in enumerate(cells):
        matrix.place(0, col, table.remove_cell(rc))
    transcript.append(("collect", f"room:{room}", 0, p))
    helps = table.take_helps(p)
    for col, card in enumerate(helps):
        matrix.place(1, col, card)
    transcript.append(("helps", 1, p))
    pile_scramble_shuffle(matrix, source, transcript)
    revealed = _reveal_row(matrix, 0, transcript, f"room/{room}/cells")
    ok = set(revealed) == set(canonical)
    if ok:
        order = _sort_order(revealed, canonical)
        matrix.permute_columns(order)
        transcript.append(("rearrange", order))
        turn_all_down(matrix)
        transcript.append(("turn-down",))
        pile_scramble_shuffle(matrix, source, transcript)
        helped = _reveal_row(matrix, 1, transcript, f"room/{room}/helps")
        order = _sort_order(helped, helps)
        matrix.permute_columns(order)
        transcript.append(("rearrange", order))
        for col, rc in enumerate(cells):
            table.put_cell(rc, matrix.card_at(0, col))
        transcript.append(("restore", f"room:{room}", p))
        table.return_helps()
    transcript.append(("end", "room", room, ok))
    return ok


def convert_cell(table: TableState, rc: Coord, letter: str, length: int,
                 prover: ProverState, source: RandomSource, transcript: Transcript,
                 site_prefix: str | None = None) -> EncodingSequence:
    """Turn a cell's hidden value into an encoding sequence of the given
    length, leaving the room's cards back on the grid exactly as they were.

    The room's cards and the prepared encoding row ride the same column
    scramble; sorting the revealed room cards into canonical order drags each
    encoding card to the position of its cell's value, so the extracted row
    encodes the target value without anyone seeing it.
    """
    grid = table.grid
    room = grid.room_of(rc)
    cells = grid.rooms[room]
    p = len(cells)
    if length < p:
        raise ProtocolError(f"sequence of {length} too short for a room of {p}")
    canonical = table.room_cards[room]
    col_of_target = cells.index(rc)
    if site_prefix is None:
        site_prefix = f"cell/{rc[0]}.{rc[1]}"
    key = f"{site_prefix}/conv-{letter}"
    transcript.append(("begin", "convert", key))

    matrix = CardMatrix(3, p)
    for col, cell in enumerate(cells):
        matrix.place(0, col, table.remove_cell(cell))
    transcript.append(("collect", f"room:{room}", 0, p))
    helps = table.take_helps(p)
    for col, card in enumerate(helps):
        matrix.place(1, col, card)
    transcript.append(("helps", 1, p))
    enc = table.take_encoding(letter, length)
    matrix.place(2, col_of_target, enc[0])
    transcript.append(("marker", enc[0], 2, col_of_target))
    secret = list(enc[1:])
    prover.rng.shuffle(secret)
    fill = iter(secret)
    for col in range(p):
        if col != col_of_target:
            matrix.place(2, col, next(fill))
    transcript.append(("hidden-fill", 2, p - 1))
    tail = secret[p - 1:]

    pile_scramble_shuffle(matrix, source, transcript)
    revealed = _reveal_row(matrix, 0, transcript, f"{key}/cells")
    order = _sort_order(revealed, canonical)
    matrix.permute_columns(order)
    transcript.append(("rearrange", order))
    sequence = matrix.take_row(2) + tail
    transcript.append(("extract", 2, p))
    transcript.append(("tail", length - p))

    lower = CardMatrix(2, p)
    for col in range(p):
        lower.place(0, col, matrix.card_at(0, col), matrix.is_face_up(0, col))
        lower.place(1, col, matrix.card_at(1, col), matrix.is_face_up(1, col))
    turn_all_down(lower)
    transcript.append(("turn-down",))
    pile_scramble_shuffle(lower, source, transcript)
    helped = _reveal_row(lower, 1, transcript, f"{key}/helps")
    order = _sort_order(helped, helps)
    lower.permute_columns(order)
    transcript.append(("rearrange", order))
    for col, cell in enumerate(cells):
        table.put_cell(cell, lower.card_at(0, col))
    transcript.append(("restore", f"room:{room}", p))
    table.return_helps()
    transcript.append(("end", "convert", key, True))
    return EncodingSequence(letter, length, sequence)


def _pair_key(a: Coord, b: Coord) -> str:
    return f"neighbor/{a[0]}.{a[1]}-{b[0]}.{b[1]}"


def _arrow_key(rc: Coord) -> str:
    return f"arrow/{rc[0]}.{rc[1]}"


def neighbor_length(grid: Grid, a: Coord, b: Coord) -> int:
    return max(grid.room_size(grid.room_of(a)), grid.room_size(grid.room_of(b)))


def verify_neighbor(table: TableState, a: Coord, b: Coord, prover: ProverState,
                    source: RandomSource, transcript: Transcript) -> bool:
    """Check two adjacent cells differ: convert both to sequences of equal
    length, scramble the two rows as columns, find one marker, and look at the
    card sharing its column.  Equal values pair the markers in every shuffle."""
    grid = table.grid
    m = neighbor_length(grid, a, b)
    key = _pair_key(a, b)
    transcript.append(("begin", "neighbor", key))
    seq_a = convert_cell(table, a, "a", m, prover, source, transcript, site_prefix=key)
    seq_b = convert_cell(table, b, "b", m, prover, source, transcript, site_prefix=key)
    matrix = CardMatrix(2, m)
    for row, seq in enumerate((seq_a, seq_b)):
        for col, card in enumerate(seq.cards):
            matrix.place(row, col, card)
        transcript.append(("collect", f"seq:{seq.letter}", row, m))
    pile_scramble_shuffle(matrix, source, transcript)
    revealed = _reveal_row(matrix, 0, transcript, f"{key}/row1")
    col = revealed.index(table.enc["a"][0])
    site = f"{key}/probe"
    transcript.append(("site", site))
    card = reveal(matrix, 1, col, transcript)
    transcript.add_pattern(site, (card,))
    ok = card.index != 1
    table.return_encoding("a")
    table.return_encoding("b")
    transcript.append(("end", "neighbor", key, ok))
    return ok


def arrow_check_cells(grid: Grid, black_rc: Coord) -> list[Coord]:
    """White neighbors of a black cell: the arrow's target first, then the
    rest clockwise from it."""
    arrow = grid.cell(black_rc).arrow  # type: ignore[union-attr]
    start = _CLOCKWISE.index(arrow)
    out = []
    for step in range(4):
        dr, dc = ARROW_DELTAS[_CLOCKWISE[(start + step) % 4]]
        nb = (black_rc[0] + dr, black_rc[1] + dc)
        if grid.in_bounds(nb) and grid.is_white(nb):
            out.append(nb)
    return out


def arrow_length(grid: Grid, black_rc: Coord) -> int:
    cells = arrow_check_cells(grid, black_rc)
    return max(grid.room_size(grid.room_of(rc)) for rc in cells)


def verify_arrow(table: TableState, black_rc: Coord, prover: ProverState,
                 source: RandomSource, transcript: Transcript) -> bool:
    """Check the pointed cell strictly beats every rival around the arrow.

    All participating cells become sequences of length 2m-1.  After a cyclic
    column shift, the m columns starting at the pointed marker are revealed in
    each rival row; a rival marker lands there exactly when rival >= pointed.
    """
    grid = table.grid
    cells = arrow_check_cells(grid, black_rc)
    m = arrow_length(grid, black_rc)
    length = 2 * m - 1
    key = _arrow_key(black_rc)
    transcript.append(("begin", "arrow", key))
    letters = ENC_LETTERS[:len(cells)]
    sequences = [
        convert_cell(table, rc, letter, length, prover, source, transcript, site_prefix=key)
        for letter, rc in zip(letters, cells)
    ]
    matrix = CardMatrix(len(cells), length)
    for row, seq in enumerate(sequences):
        for col, card in enumerate(seq.cards):
            matrix.place(row, col, card)
        transcript.append(("collect", f"seq:{seq.letter}", row, length))
    pile_shifting_shuffle(matrix, source, transcript)
    revealed = _reveal_row(matrix, 0, transcript, f"{key}/row1")
    start = revealed.index(table.enc["a"][0])
    ok = True
    for row in range(1, len(cells)):
        site = f"{key}/row{row + 1}"
        transcript.append(("site", site))
        cards = [reveal(matrix, row, (start + off) % length, transcript)
                 for off in range(m)]
        transcript.add_pattern(site, tuple(cards))
        if any(card.index == 1 for card in cards):
            ok = False
    for letter in letters:
        table.return_encoding(letter)
    transcript.append(("end", "arrow", key, ok))
    return ok


def run_full_protocol_with_table(
        grid: Grid, prover: ProverState, source: RandomSource,
) -> tuple[Verdict, Transcript, TableState | None]:
    """Like run_full_protocol, but also hands back the table so callers can
    inspect physical accounting (notably peak_cards).  The table is None when
    setup itself failed."""
    transcript = Transcript()
    try:
        table = setup_placement(grid, prover, transcript)
    except SetupError as err:
        return (Verdict(False, FailedCheck("room", err.room, at_setup=True)),
                transcript, None)
    for room in sorted(grid.rooms):
        if not verify_room(table, room, source, transcript):
            return Verdict(False, FailedCheck("room", room)), transcript, table
        table.assert_settled()
    for a, b in white_neighbor_pairs(grid):
        if not verify_neighbor(table, a, b, prover, source, transcript):
            return Verdict(False, FailedCheck("neighbor", (a, b))), transcript, table
        table.assert_settled()
    for rc in black_coords(grid):
        if not verify_arrow(table, rc, prover, source, transcript):
            return Verdict(False, FailedCheck("arrow", rc)), transcript, table
        table.assert_settled()
    return Verdict(True, None), transcript, table


def run_full_protocol(grid: Grid, prover: ProverState,
                      source: RandomSource) -> tuple[Verdict, Transcript]:
    """Run setup and every check in the canonical order, stopping at the
    first failure.  Room problems surface at setup (a standard deck has one
    card per value per room), reported as that room's check failing."""
    verdict, transcript, _ = run_full_protocol_with_table(grid, prover, source)
    return verdict, transcript


# --- transcript simulator ----------------------------------------------------
#
# Emits the exact event structure of an accepting run, drawing every reveal
# from its run-independent distribution.  No assignment is involved, which is
# the zero-knowledge argument made executable: if real transcripts match these
# distributions, they carry no information about the solution.

def _sim_reveal_row(transcript: Transcript, row: int, cards: list[CardId],
                    site: str) -> None:
    transcript.append(("site", site))
    for col, card in enumerate(cards):
        transcript.append(("reveal", (row, col), card))
    transcript.add_pattern(site, tuple(cards))


def _sim_room_segment(helper: "_SimHelper", room: str) -> None:
    t = helper.transcript
    canonical = helper.room_cards[room]
    p = len(canonical)
    t.append(("begin", "room", room))
    t.append(("collect", f"room:{room}", 0, p))
    t.append(("helps", 1, p))
    t.append(("shuffle", "scramble"))
    cells_perm = helper.perm_of(canonical)
    _sim_reveal_row(t, 0, cells_perm, f"room/{room}/cells")
    t.append(("rearrange", _sort_order(cells_perm, canonical)))
    t.append(("turn-down",))
    t.append(("shuffle", "scramble"))
    helps = helper.helps[:p]
    helps_perm = helper.perm_of(helps)
    _sim_reveal_row(t, 1, helps_perm, f"room/{room}/helps")
    t.append(("rearrange", _sort_order(helps_perm, helps)))
    t.append(("restore", f"room:{room}", p))
    t.append(("end", "room", room, True))


def _sim_convert(helper: "_SimHelper", rc: Coord, letter: str, length: int,
                 site_prefix: str) -> None:
    t = helper.transcript
    grid = helper.grid
    room = grid.room_of(rc)
    canonical = helper.room_cards[room]
    p = len(canonical)
    key = f"{site_prefix}/conv-{letter}"
    t.append(("begin", "convert", key))
    t.append(("collect", f"room:{room}", 0, p))
    t.append(("helps", 1, p))
    t.append(("marker", encoding_card(letter, 1), 2, grid.rooms[room].index(rc)))
    t.append(("hidden-fill", 2, p - 1))
    t.append(("shuffle", "scramble"))
    cells_perm = helper.perm_of(canonical)
    _sim_reveal_row(t, 0, cells_perm, f"{key}/cells")
    t.append(("rearrange", _sort_order(cells_perm, canonical)))
    t.append(("extract", 2, p))
    t.append(("tail", length - p))
    t.append(("turn-down",))
    t.append(("shuffle", "scramble"))
    helps = helper.helps[:p]
    helps_perm = helper.perm_of(helps)
    _sim_reveal_row(t, 1, helps_perm, f"{key}/helps")
    t.append(("rearrange", _sort_order(helps_perm, helps)))
    t.append(("restore", f"room:{room}", p))
    t.append(("end", "convert", key, True))


def _sim_neighbor_segment(helper: "_SimHelper", a: Coord, b: Coord) -> None:
    t = helper.transcript
    m = neighbor_length(helper.grid, a, b)
    key = _pair_key(a, b)
    t.append(("begin", "neighbor", key))
    _sim_convert(helper, a, "a", m, key)
    _sim_convert(helper, b, "b", m, key)
    t.append(("collect", "seq:a", 0, m))
    t.append(("collect", "seq:b", 1, m))
    t.append(("shuffle", "scramble"))
    a_cards = helper.perm_of(helper.enc_prefix("a", m))
    _sim_reveal_row(t, 0, a_cards, f"{key}/row1")
    col = a_cards.index(encoding_card("a", 1))
    site = f"{key}/probe"
    t.append(("site", site))
    if m > 1:
        card = encoding_card("b", helper.rng.randrange(2, m + 1))
    else:
        card = encoding_card("b", 1)  # adjacent forced-1 rooms: unsatisfiable grid
    t.append(("reveal", (1, col), card))
    t.add_pattern(site, (card,))
    t.append(("end", "neighbor", key, True))


def _sim_arrow_segment(helper: "_SimHelper", black_rc: Coord) -> None:
    t = helper.transcript
    grid = helper.grid
    cells = arrow_check_cells(grid, black_rc)
    m = arrow_length(grid, black_rc)
    length = 2 * m - 1
    key = _arrow_key(black_rc)
    t.append(("begin", "arrow", key))
    letters = ENC_LETTERS[:len(cells)]
    for letter, rc in zip(letters, cells):
        _sim_convert(helper, rc, letter, length, key)
    for row, letter in enumerate(letters):
        t.append(("collect", f"seq:{letter}", row, length))
    t.append(("shuffle", "shift"))
    a_cards = helper.perm_of(helper.enc_prefix("a", length))
    _sim_reveal_row(t, 0, a_cards, f"{key}/row1")
    start = a_cards.index(encoding_card("a", 1))
    for row in range(1, len(cells)):
        site = f"{key}/row{row + 1}"
        t.append(("site", site))
        if length > 1:
            window = helper.rng.sample(helper.enc_prefix(letters[row], length)[1:], m)
        else:
            window = [encoding_card(letters[row], 1)]  # unsatisfiable grid
        for off, card in enumerate(window):
            t.append(("reveal", (row, (start + off) % length), card))
        t.add_pattern(site, tuple(window))
    t.append(("end", "arrow", key, True))


class _SimHelper:
    def __init__(self, grid: Grid, rng: random.Random):
        self.grid = grid
        self.rng = rng
        self.transcript = Transcript()
        st = stats(grid)
        self.room_cards = {
            room: [cell_card(room, v) for v in range(1, len(cells) + 1)]
            for room, cells in grid.rooms.items()
        }
        self.helps = [help_card(i) for i in range(1, st.k + 1)]
        self.enc_len = 2 * st.k - 1

    def perm_of(self, cards: list[CardId]) -> list[CardId]:
        out = cards[:]
        self.rng.shuffle(out)
        return out

    def enc_prefix(self, letter: str, count: int) -> list[CardId]:
        return [encoding_card(letter, i) for i in range(1, count + 1)]


def simulate_transcript(grid: Grid, source: RandomSource) -> Transcript:
    """A transcript with the exact event structure of an accepting run, every
    reveal drawn from its solution-independent distribution.  Needs no
    assignment; meaningful for satisfiable grids."""
    helper = _SimHelper(grid, source.shuffle_stream)
    t = helper.transcript
    for rc in grid.white_coords():
        cell = grid.cell(rc)
        if cell.clue is not None:
            t.append(("place", rc, cell_card(cell.room, cell.clue)))
    for rc in grid.white_coords():
        if grid.cell(rc).clue is None:
            t.append(("place-hidden", rc))
    for room in sorted(grid.rooms):
        _sim_room_segment(helper, room)
    for a, b in white_neighbor_pairs(grid):
        _sim_neighbor_segment(helper, a, b)
    for rc in black_coords(grid):
        _sim_arrow_segment(helper, rc)
    return t


def reveal_site_plan(grid: Grid) -> list[tuple[str, str, tuple[CardId, ...], int]]:
    """Every reveal site of an accepting run, in order, with its pattern
    family: (site, kind, support cards, take).

    kind "perm": the pattern is a uniform permutation of the support.
    kind "pick": a single uniform card from the support.
    kind "arrangement": `take` distinct cards from the support, ordered,
    uniform over all such sequences.
    """
    helps = tuple(help_card(i) for i in range(1, stats(grid).k + 1))
    room_cards = {
        room: tuple(cell_card(room, v) for v in range(1, len(cells) + 1))
        for room, cells in grid.rooms.items()
    }

    plan: list[tuple[str, str, tuple[CardId, ...], int]] = []

    def add_conversion(rc: Coord, letter: str, prefix: str) -> None:
        room = grid.room_of(rc)
        p = len(room_cards[room])
        key = f"{prefix}/conv-{letter}"
        plan.append((f"{key}/cells", "perm", room_cards[room], p))
        plan.append((f"{key}/helps", "perm", helps[:p], p))

    for room in sorted(grid.rooms):
        p = len(room_cards[room])
        plan.append((f"room/{room}/cells", "perm", room_cards[room], p))
        plan.append((f"room/{room}/helps", "perm", helps[:p], p))
    for a, b in white_neighbor_pairs(grid):
        m = neighbor_length(grid, a, b)
        key = _pair_key(a, b)
        add_conversion(a, "a", key)
        add_conversion(b, "b", key)
        a_cards = tuple(encoding_card("a", i) for i in range(1, m + 1))
        plan.append((f"{key}/row1", "perm", a_cards, m))
        if m > 1:
            probe = tuple(encoding_card("b", i) for i in range(2, m + 1))
        else:
            probe = (encoding_card("b", 1),)
        plan.append((f"{key}/probe", "pick", probe, 1))
    for black_rc in black_coords(grid):
        cells = arrow_check_cells(grid, black_rc)
        m = arrow_length(grid, black_rc)
        length = 2 * m - 1
        key = _arrow_key(black_rc)
        letters = ENC_LETTERS[:len(cells)]
        for letter, rc in zip(letters, cells):
            add_conversion(rc, letter, key)
        a_cards = tuple(encoding_card("a", i) for i in range(1, length + 1))
        plan.append((f"{key}/row1", "perm", a_cards, length))
        for row, letter in enumerate(letters[1:], start=2):
            if length > 1:
                support = tuple(encoding_card(letter, i) for i in range(2, length + 1))
                plan.append((f"{key}/row{row}", "arrangement", support, m))
            else:
                plan.append((f"{key}/row{row}", "pick",
                             (encoding_card(letter, 1),), 1))
    return plan
