"""Puzzles as data: parsing, rule checking, and exhaustive solving.

A Makaro grid is made of rooms of white cells and black arrow cells.  A
filled grid is valid when every room holds exactly the values 1..size,
orthogonal neighbors across room borders differ, and every black cell's
arrow points at the strictly largest of its white neighbors.

Run:  python3 demos/01_puzzle_basics.py
"""

from pathlib import Path

from makaro_zkp import (
    assignment_from_grid,
    assignment_text,
    check_solution,
    parse_puzzle,
    solve_brute_force,
    stats,
    violations,
)

PUZZLES = Path(__file__).resolve().parent.parent / "puzzles"


def main() -> None:
    text = (PUZZLES / "example5x5.makaro").read_text(encoding="utf-8")
    print("A puzzle file is plain text: a size header, then one token per")
    print("cell (room id, room=clue, or a black arrow B^ Bv B< B>):\n")
    print(text)

    grid = parse_puzzle(text)
    st = stats(grid)
    print(f"Parsed: {grid.height}x{grid.width}, {st.n} white cells in "
          f"{len(grid.rooms)} rooms, largest room {st.k}.")
    rooms = ", ".join(f"{room} has {len(cells)}" for room, cells in
                      sorted(grid.rooms.items()))
    print(f"Room sizes: {rooms}.\n")

    solution = assignment_from_grid(
        parse_puzzle((PUZZLES / "example5x5_solution.makaro").read_text(encoding="utf-8")))
    print("A solution file is the same grid with every white cell clued.")
    print(f"check_solution says: {check_solution(grid, solution)}\n")

    print("Corrupt it by swapping the two cells of the size-2 room at the top")
    print("and the checker pinpoints every broken rule:")
    corrupt = dict(solution)
    corrupt[(0, 1)], corrupt[(1, 1)] = corrupt[(1, 1)], corrupt[(0, 1)]
    for kind, subject in violations(grid, corrupt):
        print(f"  - {kind}: {subject}")
    print()

    print("Small puzzles can be solved exhaustively.  The bundled 3x3 has a")
    print("black cell whose arrow sees four white neighbors:\n")
    cross = parse_puzzle((PUZZLES / "cross.makaro").read_text(encoding="utf-8"))
    print((PUZZLES / "cross.makaro").read_text(encoding="utf-8"))
    found = solve_brute_force(cross)
    print(f"solve_brute_force finds {len(found)} solution(s):\n")
    for assignment in found:
        print(assignment_text(cross, assignment))


if __name__ == "__main__":
    main()
