"""Analysis-tree files and the verifier that replays them.

A ``.lines`` file pins an opening (a few setup flats) and a tree of
alternating moves: every node pairs one Black move with White's prepared
reply, children analyze Black's continuations after that reply.  The
verifier confirms the tree is a complete winning strategy for White:

* each listed move is legal where it appears, for every expansion of the
  shorthand forms,
* at every visited position each legal Black move is analyzed in the
  tree, loses to a single White reply on the spot, or is a dihedral
  image of an analyzed move,
* each leaf reply either finishes the game or is proven winning by
  search within a small ply budget.

File grammar, one construct per line::

    # comment
    %size 3
    %opening w:a1 w:a2 b:b1
    !anomaly b-12 -> b3-12
    * a3 : b3
      * b1<1 : b2

Nodes are ``* <black> : <white>`` indented two spaces per tree level.
Anomaly directives carry corrections for move text that is garbled in
the source material; the original stays in the tree verbatim and the
verifier works from the correction, so a bad guess still fails loudly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterator, Optional

from tak.board import BLACK, FLAT, WHITE, Outcome, Position, new_position, outcome
from tak.moves import Move, apply, legal_moves, resolve
from tak.notation import NotationError, expand_shorthand, format_move, parse_square, square_name
from tak.solver import Solver, SolverConfig, winning_move
from tak.symmetry import serialize_under, transform_name

__all__ = [
    "LineError",
    "LineFile",
    "LineNode",
    "VerifyEntry",
    "VerifyReport",
    "bundled_dataset",
    "load_line_file",
    "loads",
    "verify",
]

# Entry statuses.  The first six describe a healthy tree; the rest are
# failures that poison the report.
WHITE_WINS_IMMEDIATELY = "WhiteWinsImmediately"
PROVEN_WITHIN_LEAF_DEPTH = "ProvenWithinLeafDepth"
CHILD_LISTED = "ChildListed"
REFUTED_IN_TWO = "RefutedInTwo"
SYMMETRY_COVERED = "SymmetryCovered"
UNCOVERED = "UNCOVERED"
ILLEGAL_LISTED_MOVE = "IllegalListedMove"
REPLY_NOT_WINNING = "ReplyNotWinning"
CHILDREN_UNREACHABLE = "ChildrenUnreachable"

_FAILURES = frozenset({UNCOVERED, ILLEGAL_LISTED_MOVE, REPLY_NOT_WINNING, CHILDREN_UNREACHABLE})


class LineError(Exception):
    """Problem with a .lines file, located when possible."""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        spot = ""
        if line is not None:
            spot = f" (line {line}" + (f", column {column}" if column is not None else "") + ")"
        super().__init__(message + spot)
        self.line = line
        self.column = column


@dataclass
class LineNode:
    """One analyzed move pair.  ``anomaly`` replaces whichever of the two
    texts does not parse; the raw text stays for fidelity to the source."""

    black: str
    white: str
    children: tuple["LineNode", ...] = ()
    anomaly: Optional[str] = None
    line: int = 0

    def effective_black(self, size: int) -> str:
        return self.anomaly if self.anomaly and not _parses(self.black, size) else self.black

    def effective_white(self, size: int) -> str:
        return self.anomaly if self.anomaly and not _parses(self.white, size) else self.white

    def walk(self) -> Iterator["LineNode"]:
        yield self
        for child in self.children:
            yield from child.walk()


@dataclass
class LineFile:
    size: int
    opening: tuple[tuple[int, int], ...]  # (color, square) setup flats
    roots: tuple[LineNode, ...]
    anomalies: tuple[tuple[str, str], ...] = ()
    name: str = ""

    def start_position(self) -> Position:
        return opening_position(self.size, self.opening)

    def opening_text(self) -> str:
        return " ".join(
            f"{'wb'[color]}:{square_name(sq, self.size)}" for color, sq in self.opening
        )

    def node_count(self) -> int:
        return sum(1 for root in self.roots for _ in root.walk())


def opening_position(size: int, opening: tuple[tuple[int, int], ...]) -> Position:
    """Position after the setup flats, with the ply clock advanced past
    them so the swap rules no longer apply."""
    if len(opening) < 2:
        raise LineError("an opening needs at least the two swap flats")
    pos = new_position(size)
    for color, sq in opening:
        if color not in (WHITE, BLACK):
            raise LineError("opening colors must be w or b")
        if not 0 <= sq < size * size:
            raise LineError("opening square off the board")
        if pos.stacks[sq]:
            raise LineError(f"square {square_name(sq, size)} set twice in the opening")
        pos.stacks[sq] = [color * 3 + FLAT]
        pos.reserves[color * 2] -= 1
    pos.ply = len(opening)
    pos.to_move = len(opening) % 2
    pos.recompute_hashes()
    return pos


def _parses(text: str, size: int) -> bool:
    try:
        expand_shorthand(text, size)
    except NotationError:
        return False
    return True


# -- parsing -----------------------------------------------------------------


def loads(text: str, name: str = "<string>") -> LineFile:
    size: Optional[int] = None
    opening: list[tuple[int, int]] = []
    anomalies: dict[str, str] = {}
    anomaly_order: list[str] = []
    # Stack of (depth, children list) for the node currently open at each
    # indentation level; roots live at depth 0 under a sentinel.
    roots: list[LineNode] = []
    stack: list[tuple[int, LineNode]] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip()
        if not line or line.lstrip().startswith("#"):
            continue
        if line.startswith("%size"):
            if roots:
                raise LineError("%size must come before the tree", lineno)
            try:
                size = int(line[len("%size") :].strip())
            except ValueError:
                raise LineError("%size needs an integer", lineno) from None
            if not 3 <= size <= 8:
                raise LineError("%size out of range", lineno)
            continue
        if line.startswith("%opening"):
            if size is None:
                raise LineError("%opening needs %size first", lineno)
            for token in line[len("%opening") :].split():
                if len(token) < 3 or token[1] != ":" or token[0] not in "wb":
                    raise LineError(f"bad opening token {token!r}", lineno)
                try:
                    sq = parse_square(token[2:], size)
                except NotationError as exc:
                    raise LineError(str(exc), lineno) from None
                opening.append(("wb".index(token[0]), sq))
            continue
        if line.startswith("!anomaly"):
            body = line[len("!anomaly") :].strip()
            if " -> " not in body:
                raise LineError("!anomaly needs 'original -> corrected'", lineno)
            original, corrected = (part.strip() for part in body.split(" -> ", 1))
            if not original or not corrected:
                raise LineError("!anomaly needs 'original -> corrected'", lineno)
            if original in anomalies:
                raise LineError(f"duplicate anomaly for {original!r}", lineno)
            anomalies[original] = corrected
            anomaly_order.append(original)
            continue
        if line.startswith("%") or line.startswith("!"):
            raise LineError(f"unknown directive {line.split()[0]!r}", lineno)

        indent = len(line) - len(line.lstrip(" "))
        body = line[indent:]
        if not body.startswith("* "):
            raise LineError("expected a '* black : white' node", lineno, indent + 1)
        if indent % 2:
            raise LineError("indentation must be two spaces per level", lineno, indent)
        depth = indent // 2
        if size is None:
            raise LineError("%size must come before the tree", lineno)
        if " : " not in body[2:]:
            raise LineError("node needs ' : ' between the two moves", lineno, indent + 3)
        black, white = (part.strip() for part in body[2:].split(" : ", 1))
        if not black or not white:
            raise LineError("node needs both moves", lineno, indent + 3)

        while stack and stack[-1][0] >= depth:
            stack.pop()
        if depth != len(stack):
            raise LineError(f"indent jumps to depth {depth}, parent is at {len(stack) - 1}", lineno, indent)
        node = LineNode(black, white, line=lineno)
        if stack:
            parent = stack[-1][1]
            parent.children = parent.children + (node,)
        else:
            roots.append(node)
        stack.append((depth, node))

    if size is None:
        raise LineError("missing %size header")
    if not opening:
        raise LineError("missing %opening header")
    if not roots:
        raise LineError("file has no tree nodes")

    used: set[str] = set()
    for root in roots:
        for node in root.walk():
            _attach_anomaly(node, size, anomalies, used)
    unused = [orig for orig in anomaly_order if orig not in used]
    if unused:
        raise LineError(f"anomaly corrections never used: {', '.join(map(repr, unused))}")

    file = LineFile(size, tuple(opening), tuple(roots), tuple((o, anomalies[o]) for o in anomaly_order), name)
    file.start_position()  # validates the opening eagerly
    return file


def _attach_anomaly(node: LineNode, size: int, anomalies: dict[str, str], used: set[str]) -> None:
    for text in (node.black, node.white):
        if _parses(text, size):
            continue
        corrected = anomalies.get(text)
        if corrected is None:
            raise LineError(f"unparseable move {text!r} has no anomaly correction", node.line)
        if not _parses(corrected, size):
            raise LineError(f"anomaly correction {corrected!r} does not parse either", node.line)
        if node.anomaly is not None and node.anomaly != corrected:
            raise LineError("both moves of one node are anomalous", node.line)
        node.anomaly = corrected
        used.add(text)


def load_line_file(path: str | Path) -> LineFile:
    path = Path(path)
    return loads(path.read_text(encoding="utf-8"), name=path.stem)


def bundled_dataset() -> dict[str, LineFile]:
    """The analysis trees shipped with the package, keyed by name."""
    out: dict[str, LineFile] = {}
    data = resources.files("tak").joinpath("data")
    for entry in sorted(data.iterdir(), key=lambda e: e.name):
        if entry.name.endswith(".lines"):
            out[entry.name[: -len(".lines")]] = loads(
                entry.read_text(encoding="utf-8"), name=entry.name[: -len(".lines")]
            )
    return out


# -- verification ------------------------------------------------------------


@dataclass(frozen=True)
class VerifyEntry:
    path: tuple[str, ...]  # concrete move texts from the opening to here
    move: str
    status: str
    detail: str = ""

    def render(self) -> str:
        where = " ".join(self.path) if self.path else "(root)"
        tail = f"  [{self.detail}]" if self.detail else ""
        return f"{self.status:<22} {where} :: {self.move}{tail}"


@dataclass
class VerifyReport:
    name: str
    leaf_depth: int
    refute_depth: int
    entries: tuple[VerifyEntry, ...]
    anomalies: tuple[tuple[str, str], ...] = ()

    @property
    def counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for entry in self.entries:
            out[entry.status] = out.get(entry.status, 0) + 1
        return out

    @property
    def uncovered(self) -> tuple[VerifyEntry, ...]:
        return tuple(e for e in self.entries if e.status == UNCOVERED)

    @property
    def failures(self) -> tuple[VerifyEntry, ...]:
        return tuple(e for e in self.entries if e.status in _FAILURES)

    @property
    def passed(self) -> bool:
        return not self.failures

    def render_text(self) -> str:
        lines = [f"{self.name}: {'PASS' if self.passed else 'FAIL'}"]
        for status, count in sorted(self.counts.items()):
            lines.append(f"  {status:<22} {count}")
        for original, corrected in self.anomalies:
            lines.append(f"  anomaly {original!r} -> {corrected!r}")
        for entry in self.failures:
            lines.append("  " + entry.render())
        return "\n".join(lines)

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "leaf_depth": self.leaf_depth,
            "refute_depth": self.refute_depth,
            "counts": self.counts,
            "anomalies": [{"original": o, "corrected": c} for o, c in self.anomalies],
            "entries": [
                {"path": list(e.path), "move": e.move, "status": e.status, "detail": e.detail}
                for e in self.entries
            ],
        }


def verify(file: LineFile, leaf_depth: int = 8, refute_depth: int = 2) -> VerifyReport:
    """Replay the tree against the engine and judge every move.

    White must be the side replying: the opening leaves Black to move at
    the root.  The solver budget for leaves is ``leaf_depth`` plies after
    White's reply; ``refute_depth`` is the total length of the shortest
    dismissal of an unlisted Black move (2 means Black moves, one White
    reply ends the game).
    """
    if leaf_depth < 1:
        raise ValueError("leaf_depth must be at least 1")
    if refute_depth < 2 or refute_depth % 2:
        raise ValueError("refute_depth counts plies and must be even and at least 2")
    root = file.start_position()
    if root.to_move != BLACK:
        raise ValueError("the opening must leave Black to move")
    if outcome(root).is_terminal:
        raise ValueError("the opening position is already decided")
    solver = Solver(SolverConfig(max_depth=max(leaf_depth, refute_depth - 1)))
    entries: list[VerifyEntry] = []
    _walk(file, root, file.roots, (), solver, leaf_depth, refute_depth, entries)
    return VerifyReport(file.name, leaf_depth, refute_depth, tuple(entries), file.anomalies)


def _walk(
    file: LineFile,
    pos: Position,
    nodes: tuple[LineNode, ...],
    path: tuple[str, ...],
    solver: Solver,
    leaf_depth: int,
    refute_depth: int,
    entries: list[VerifyEntry],
) -> None:
    size = file.size
    legal = set(legal_moves(pos))
    # Every expansion of every listed Black move, with its resulting
    # position; the serialized forms anchor the symmetry checks below.
    listed: dict[Move, str] = {}
    listed_serials: list[tuple[str, str]] = []

    for node in nodes:
        black_moves = _expansions(node.effective_black(size), pos, size)
        for bmove in sorted(black_moves, key=lambda m: format_move(m, size)):
            btext = format_move(bmove, size)
            bpath = path + (btext,)
            if bmove not in legal:
                entries.append(
                    VerifyEntry(path, btext, ILLEGAL_LISTED_MOVE, f"line {node.line}: not legal here")
                )
                continue
            if bmove not in listed:
                listed[bmove] = btext
            after_black = pos.copy()
            apply(after_black, bmove)
            listed_serials.append((serialize_under(after_black, 0), btext))
            if outcome(after_black).is_terminal:
                entries.append(
                    VerifyEntry(
                        bpath,
                        node.white,
                        ILLEGAL_LISTED_MOVE,
                        f"line {node.line}: the game is over before this reply",
                    )
                )
                continue
            _check_reply(file, after_black, node, bpath, solver, leaf_depth, refute_depth, entries)

    # Coverage: every legal Black move must be accounted for.
    for move in sorted(legal, key=lambda m: format_move(m, size)):
        text = format_move(move, size)
        if move in listed:
            entries.append(VerifyEntry(path, text, CHILD_LISTED))
            continue
        after = pos.copy()
        apply(after, move)
        out = outcome(after)
        if out.is_terminal:
            if out.winner == WHITE:
                entries.append(VerifyEntry(path, text, REFUTED_IN_TWO, "loses on the spot"))
            else:
                entries.append(VerifyEntry(path, text, UNCOVERED, f"ends the game: {out.tag}"))
            continue
        refutation = _refutation(after, solver, refute_depth)
        if refutation is not None:
            entries.append(VerifyEntry(path, text, REFUTED_IN_TWO, refutation))
            continue
        covered = _symmetry_cover(after, listed_serials, size)
        if covered is not None:
            entries.append(VerifyEntry(path, text, SYMMETRY_COVERED, covered))
        else:
            entries.append(VerifyEntry(path, text, UNCOVERED))


def _check_reply(
    file: LineFile,
    after_black: Position,
    node: LineNode,
    bpath: tuple[str, ...],
    solver: Solver,
    leaf_depth: int,
    refute_depth: int,
    entries: list[VerifyEntry],
) -> None:
    size = file.size
    reply_legal = set(legal_moves(after_black))
    white_moves = _expansions(node.effective_white(size), after_black, size)
    # A shorthand reply must hold for each of its expansions separately.
    for wmove in sorted(white_moves, key=lambda m: format_move(m, size)):
        wtext = format_move(wmove, size)
        if wmove not in reply_legal:
            entries.append(
                VerifyEntry(bpath, wtext, ILLEGAL_LISTED_MOVE, f"line {node.line}: not legal here")
            )
            continue
        after_white = after_black.copy()
        apply(after_white, wmove)
        out = outcome(after_white)
        if out.is_terminal:
            if out.winner == WHITE:
                entries.append(VerifyEntry(bpath, wtext, WHITE_WINS_IMMEDIATELY, out.tag))
            else:
                entries.append(
                    VerifyEntry(bpath, wtext, REPLY_NOT_WINNING, f"ends the game: {out.tag}")
                )
            if node.children:
                entries.append(
                    VerifyEntry(
                        bpath,
                        wtext,
                        CHILDREN_UNREACHABLE,
                        f"line {node.line}: children behind a finished game",
                    )
                )
            continue
        if node.children:
            _walk(
                file,
                after_white,
                node.children,
                bpath + (wtext,),
                solver,
                leaf_depth,
                refute_depth,
                entries,
            )
            continue
        result = solver.solve(after_white, leaf_depth)
        if result.value.is_win and result.value.color == WHITE:
            entries.append(
                VerifyEntry(bpath, wtext, PROVEN_WITHIN_LEAF_DEPTH, f"d={result.value.plies}")
            )
        else:
            entries.append(
                VerifyEntry(
                    bpath,
                    wtext,
                    REPLY_NOT_WINNING,
                    f"no forced win within {leaf_depth} plies",
                )
            )


def _expansions(text: str, pos: Position, size: int) -> list[Move]:
    moves = []
    for move in expand_shorthand(text, size):
        try:
            moves.append(resolve(move, pos))
        except Exception:
            # A bare spread from an empty square stays unresolved and is
            # reported as illegal by the caller via the legality check.
            moves.append(move)
    return moves


def _refutation(after_black: Position, solver: Solver, refute_depth: int) -> Optional[str]:
    if refute_depth == 2:
        reply = winning_move(after_black)
        if reply is None:
            return None
        return format_move(reply, after_black.size)
    result = solver.solve(after_black, refute_depth - 1)
    if result.value.is_win and result.value.color == WHITE:
        return f"forced in {result.value.plies}"
    return None


def _symmetry_cover(
    after: Position, listed_serials: list[tuple[str, str]], size: int
) -> Optional[str]:
    for g in range(1, 8):
        image = serialize_under(after, g)
        for serial, btext in listed_serials:
            if image == serial:
                return f"{transform_name(g)} -> {btext}"
    return None
