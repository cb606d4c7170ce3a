"""Gauss diagrams for string links, links and braids.

A diagram is a set of signed arrows drawn on n ordered, oriented strands.
Each strand carries an ordered sequence of arrow endpoints; an arrow is a
(tail, head, sign) triple with all endpoints distinct.  Open diagrams have
interval strands read bottom to top; closed diagrams have circle strands
with a distinguished basepoint at index 0.

Everything here is immutable; operations return new diagrams.
"""

from __future__ import annotations

import hashlib
import itertools

OPEN = "open"
CLOSED = "closed"

TAIL = "T"
HEAD = "H"


class DiagramError(Exception):
    """A structurally invalid diagram or an inapplicable operation."""


class ParseError(DiagramError):
    """WGD text that does not conform to the grammar."""

    def __init__(self, message, line=None):
        if line is not None:
            message = "line %d: %s" % (line, message)
        super().__init__(message)
        self.line = line


class GaussDiagram:
    """An immutable Gauss diagram.

    strands: tuple of per-strand endpoint sequences, each endpoint a pair
    (arrow_id, role) with role in {"T", "H"}.  signs: arrow_id -> +1/-1.
    """

    __slots__ = ("n", "kind", "strands", "signs", "_ends", "_canon")

    def __init__(self, n, kind, strands, signs, validate=True):
        if kind not in (OPEN, CLOSED):
            raise DiagramError("kind must be 'open' or 'closed'")
        if n < 1:
            raise DiagramError("need at least one strand")
        if len(strands) != n:
            raise DiagramError("strand count mismatch")
        self.n = n
        self.kind = kind
        self.strands = tuple(tuple(s) for s in strands)
        self.signs = dict(signs)
        self._ends = None
        self._canon = None
        if validate:
            self._validate()

    def _validate(self):
        seen = {}
        for i, strand in enumerate(self.strands):
            for pos, (aid, role) in enumerate(strand):
                if role not in (TAIL, HEAD):
                    raise DiagramError("bad role %r" % (role,))
                key = (aid, role)
                if key in seen:
                    raise DiagramError("arrow %s has two %s endpoints" % (aid, role))
                seen[key] = (i, pos)
        for aid in self.signs:
            if (aid, TAIL) not in seen or (aid, HEAD) not in seen:
                raise DiagramError("arrow %s is missing an endpoint" % (aid,))
        for (aid, _role) in seen:
            if aid not in self.signs:
                raise DiagramError("arrow %s has no sign" % (aid,))
        if self.signs and not set(self.signs.values()) <= {1, -1}:
            raise DiagramError("signs must be +1 or -1")

    # -- basic accessors ---------------------------------------------------

    @property
    def arrow_ids(self):
        return sorted(self.signs)

    def num_arrows(self):
        return len(self.signs)

    def _end_map(self):
        if self._ends is None:
            ends = {}
            for i, strand in enumerate(self.strands):
                for pos, (aid, role) in enumerate(strand):
                    ends[(aid, role)] = (i, pos)
            self._ends = ends
        return self._ends

    def tail_of(self, aid):
        """(strand, position) of the arrow's tail."""
        return self._end_map()[(aid, TAIL)]

    def head_of(self, aid):
        return self._end_map()[(aid, HEAD)]

    def sign_of(self, aid):
        return self.signs[aid]

    def tail_strand(self, aid):
        return self.tail_of(aid)[0]

    def head_strand(self, aid):
        return self.head_of(aid)[0]

    def is_self_arrow(self, aid):
        return self.tail_strand(aid) == self.head_strand(aid)

    def fresh_id(self, k=1):
        """k arrow ids unused in this diagram."""
        top = max(self.signs, default=0)
        return list(range(top + 1, top + 1 + k))

    # -- construction helpers ---------------------------------------------

    @classmethod
    def trivial(cls, n, kind=OPEN):
        return cls(n, kind, [()] * n, {})

    def replace_strands(self, strands, signs=None):
        return GaussDiagram(self.n, self.kind,
                            strands,
                            self.signs if signs is None else signs)

    # -- serialization -----------------------------------------------------

    def _renumbering(self):
        """Map old arrow ids -> 1..m by first endpoint occurrence."""
        order = {}
        for strand in self.strands:
            for aid, _role in strand:
                if aid not in order:
                    order[aid] = len(order) + 1
        return order

    def canonical(self):
        """Same diagram with arrows renumbered 1..m in scan order; closed
        circles rotated to the joint lexicographically minimal form."""
        if self.kind == OPEN:
            return self._renumber()
        best = None
        rotations = [range(max(len(s), 1)) for s in self.strands]
        for rots in itertools.product(*rotations):
            strands = [s[r:] + s[:r] for s, r in zip(self.strands, rots)]
            cand = GaussDiagram(self.n, self.kind, strands, self.signs,
                                validate=False)._renumber()
            text = cand.serialize()
            if best is None or text < best[0]:
                best = (text, cand)
        return best[1]

    def _renumber(self):
        ren = self._renumbering()
        strands = [tuple((ren[a], r) for a, r in s) for s in self.strands]
        signs = {ren[a]: s for a, s in self.signs.items()}
        return GaussDiagram(self.n, self.kind, strands, signs, validate=False)

    def serialize(self):
        """Canonical WGD text (arrows renumbered; open diagrams as-is,
        rotation canonicalization is applied by canonical())."""
        d = self._renumber()
        lines = ["wgd 1", "kind %s" % d.kind, "strands %d" % d.n,
                 "arrows %d" % d.num_arrows()]
        for aid in sorted(d.signs):
            lines.append("sign %d %s" % (aid, "+" if d.signs[aid] > 0 else "-"))
        for i, strand in enumerate(d.strands):
            toks = " ".join("%s%d" % (r, a) for a, r in strand)
            lines.append("strand %d:%s" % (i + 1, " " + toks if toks else ""))
        return "\n".join(lines) + "\n"

    def fingerprint(self):
        if self._canon is None:
            self._canon = self.canonical().serialize()
        return hashlib.sha1(self._canon.encode()).hexdigest()[:16]

    def canonical_key(self):
        if self._canon is None:
            self._canon = self.canonical().serialize()
        return self._canon

    def __repr__(self):
        body = "; ".join(
            "%d: %s" % (i + 1, " ".join("%s%s" % (r, a) for a, r in s))
            for i, s in enumerate(self.strands))
        return "<GaussDiagram %s n=%d %s>" % (self.kind, self.n, body)


# -- parsing ----------------------------------------------------------------

def parse_gauss_code(text):
    """Parse WGD text into a validated GaussDiagram."""
    lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0].strip()
        if stripped:
            lines.append((lineno, stripped))
    if not lines:
        raise ParseError("empty input")

    def expect(idx, what):
        if idx >= len(lines):
            raise ParseError("unexpected end of input, expected %s" % what)
        return lines[idx]

    lineno, header = expect(0, "wgd header")
    if header != "wgd 1":
        raise ParseError("expected 'wgd 1'", lineno)
    lineno, kind_l = expect(1, "kind line")
    parts = kind_l.split()
    if len(parts) != 2 or parts[0] != "kind" or parts[1] not in (OPEN, CLOSED):
        raise ParseError("expected 'kind open' or 'kind closed'", lineno)
    kind = parts[1]
    lineno, n_l = expect(2, "strands line")
    parts = n_l.split()
    if len(parts) != 2 or parts[0] != "strands" or not parts[1].isdigit():
        raise ParseError("expected 'strands <n>'", lineno)
    n = int(parts[1])
    if n < 1:
        raise ParseError("need at least one strand", lineno)
    lineno, m_l = expect(3, "arrows line")
    parts = m_l.split()
    if len(parts) != 2 or parts[0] != "arrows" or not parts[1].isdigit():
        raise ParseError("expected 'arrows <m>'", lineno)
    m = int(parts[1])

    signs = {}
    idx = 4
    for _ in range(m):
        lineno, sign_l = expect(idx, "sign line")
        parts = sign_l.split()
        if len(parts) != 3 or parts[0] != "sign" or parts[2] not in "+-":
            raise ParseError("expected 'sign <id> <+|->'", lineno)
        try:
            aid = int(parts[1])
        except ValueError:
            raise ParseError("bad arrow id %r" % parts[1], lineno)
        if aid in signs:
            raise ParseError("duplicate sign for arrow %d" % aid, lineno)
        signs[aid] = 1 if parts[2] == "+" else -1
        idx += 1

    strands = []
    for i in range(1, n + 1):
        lineno, s_l = expect(idx, "strand line")
        head, _, rest = s_l.partition(":")
        parts = head.split()
        if len(parts) != 2 or parts[0] != "strand" or not parts[1].isdigit() \
                or int(parts[1]) != i or not s_l.startswith("strand"):
            raise ParseError("expected 'strand %d: ...'" % i, lineno)
        seq = []
        for tok in rest.split():
            role, num = tok[:1], tok[1:]
            if role not in (TAIL, HEAD) or not num.isdigit():
                raise ParseError("bad endpoint token %r" % tok, lineno)
            aid = int(num)
            if aid not in signs:
                raise ParseError("endpoint %s has no sign line" % tok, lineno)
            seq.append((aid, role))
        strands.append(tuple(seq))
        idx += 1
    if idx != len(lines):
        raise ParseError("trailing content", lines[idx][0])

    try:
        return GaussDiagram(n, kind, strands, signs)
    except DiagramError as exc:
        raise ParseError(str(exc)) from exc


def serialize(d):
    return d.canonical().serialize() if d.kind == CLOSED else d.serialize()


# -- structural operations ---------------------------------------------------

def equal_raw(d1, d2):
    """Combinatorial identity up to arrow renaming (and, for closed
    diagrams, independent rotation of each circle)."""
    if d1.n != d2.n or d1.kind != d2.kind:
        raise DiagramError("incomparable diagrams: n or kind differ")
    if d1.num_arrows() != d2.num_arrows():
        return False
    return d1.canonical_key() == d2.canonical_key()


def stack(d1, d2):
    """Stacking product: strand i of d2 appended after strand i of d1."""
    if d1.kind != OPEN or d2.kind != OPEN:
        raise DiagramError("stacking needs open diagrams")
    if d1.n != d2.n:
        raise DiagramError("strand count mismatch")
    shift = max(d1.signs, default=0)
    strands = []
    for s1, s2 in zip(d1.strands, d2.strands):
        strands.append(s1 + tuple((a + shift, r) for a, r in s2))
    signs = dict(d1.signs)
    signs.update({a + shift: s for a, s in d2.signs.items()})
    return GaussDiagram(d1.n, OPEN, strands, signs)


def close(d):
    """Closure: each interval becomes a circle based at the former start."""
    if d.kind != OPEN:
        raise DiagramError("already closed")
    return GaussDiagram(d.n, CLOSED, d.strands, d.signs)


def open_at(d, cuts=None):
    """Cut each circle just before the given cyclic position (default: the
    basepoint), producing an open diagram."""
    if d.kind != CLOSED:
        raise DiagramError("not a closed diagram")
    if cuts is None:
        cuts = [0] * d.n
    if len(cuts) != d.n:
        raise DiagramError("need one cut per circle")
    strands = []
    for s, c in zip(d.strands, cuts):
        if s:
            if not isinstance(c, int) or not 0 <= c <= len(s):
                raise DiagramError("cut must be a gap index in 0..len")
            c = c % len(s)
        else:
            c = 0
        strands.append(s[c:] + s[:c])
    return GaussDiagram(d.n, OPEN, strands, d.signs)


def is_braid_form(d):
    """True iff no self-arrows and the 'appears strictly before' relation on
    arrows is acyclic, so arrows can be stacked as horizontal levels."""
    if d.kind != OPEN:
        raise DiagramError("braid form is for open diagrams")
    for aid in d.signs:
        if d.is_self_arrow(aid):
            return False
    ids = d.arrow_ids
    before = {a: set() for a in ids}  # a -> arrows strictly after a somewhere
    for strand in d.strands:
        for i, (a, _r) in enumerate(strand):
            for b, _r2 in strand[i + 1:]:
                if a != b:
                    before[a].add(b)
    # Kahn's algorithm on the precedence relation.
    indeg = {a: 0 for a in ids}
    for a in ids:
        for b in before[a]:
            indeg[b] += 1
    queue = [a for a in ids if indeg[a] == 0]
    seen = 0
    while queue:
        a = queue.pop()
        seen += 1
        for b in before[a]:
            indeg[b] -= 1
            if indeg[b] == 0:
                queue.append(b)
    return seen == len(ids)


def relabel_strands(d, perm):
    """Push the diagram forward along a strand relabeling.

    perm[i] = j means old strand index i+1 becomes new index j (1-based),
    i.e. new strand j carries old strand i+1's endpoint sequence.
    """
    if sorted(perm) != list(range(1, d.n + 1)):
        raise DiagramError("not a permutation of 1..n")
    strands = [None] * d.n
    for i, j in enumerate(perm):
        strands[j - 1] = d.strands[i]
    return GaussDiagram(d.n, d.kind, strands, d.signs)
