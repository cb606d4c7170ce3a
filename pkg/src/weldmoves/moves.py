"""Elementary local moves on Gauss diagrams.

Each move kind is a local rewrite of endpoint slots: pattern moves act on
portions (contiguous runs of slots, cyclic on closed strands), single-arrow
moves act on an arrow's two slots, and insertion/deletion moves change the
arrow count.  `enumerate_moves` lists every applicable forward instance in a
deterministic order; `apply_move` re-validates and rewrites.

Matches are canonically oriented (delta is always +1 in emitted matches):
the admissibility predicates below are the figures' sign conditions with the
portion directions already substituted, expressed through the order bits of
the matched slot pairs, so reversed-portion matches never need to be listed
separately.  The table of move shapes lives in MOVE_SHAPES; the three-arrow
and band predicates are checked against a brute-force planar-configuration
oracle in the test suite.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .diagram import CLOSED, HEAD, OPEN, TAIL, DiagramError, GaussDiagram

R1 = "R1"
R2 = "R2"
R3 = "R3"
OC = "OC"
UC = "UC"
CC = "CC"
SC = "SC"
V = "V"
SV = "SV"
VC = "VC"
SR = "SR"
F = "F"
DELTA = "DELTA"
BP = "BP"
WBP = "WBP"
MIXED4 = "MIXED4"
M = "M"

ALL_KINDS = (R1, R2, R3, OC, UC, CC, SC, V, SV, VC, SR, F,
             DELTA, BP, WBP, MIXED4, M)
WELDED_REIDEMEISTER = (R1, R2, R3, OC)

# Arrow-count change of a forward application.
ARROW_DELTA = {R1: -1, R2: -2, V: -1, SV: -1, MIXED4: -4}

# Declarative move shapes: portion roles and arrow routing, used by the
# generic matcher.  ("T","T") means a portion carrying two tails, etc.
MOVE_SHAPES = {
    OC: {"portions": [("T", "T")]},
    UC: {"portions": [("H", "H")]},
    F: {"portions": [("*", "*")], "mixed": True},
    R3: {"portions": [("T", "T"), ("H", "T"), ("H", "H")],
         "arrows": [("u", 0, 1), ("v", 0, 2), ("w", 1, 2)]},
    DELTA: {"portions": [("T", "H"), ("H", "T"), ("H", "T")],
            "arrows": [("u", 0, 1), ("v", 1, 2), ("w", 2, 0)]},
    BP: {"portions": [("T", "T"), ("T", "T"), ("H", "H"), ("H", "H")],
         "arrows": [("u1", 0, 2), ("u2", 0, 3), ("u3", 1, 2), ("u4", 1, 3)]},
}


class MoveError(Exception):
    """An application that does not match or cannot be performed."""


@dataclass(frozen=True)
class Portion:
    """A contiguous run of slots on one strand (cyclic on closed strands)."""
    strand: int          # 0-based
    slots: tuple         # slot indices, consecutive along orientation

    def spec(self):
        return "(%d,%d,%d,+1)" % (self.strand + 1, self.slots[0], self.slots[-1])


@dataclass(frozen=True)
class MoveApplication:
    kind: str
    direction: str       # "fwd" | "bwd"
    portions: tuple      # tuple[Portion, ...]
    params: tuple        # sorted tuple of (key, value) pairs

    def param(self, key, default=None):
        for k, v in self.params:
            if k == key:
                return v
        return default

    def spec(self):
        parts = [self.kind, self.direction]
        parts.append("".join(p.spec() for p in self.portions) or "-")
        for k, v in self.params:
            parts.append("%s=%s" % (k, v))
        return " ".join(parts)

    def __str__(self):
        return self.spec()


def app(kind, direction, portions=(), **params):
    norm = tuple(sorted((k, _param_str(v)) for k, v in params.items()))
    return MoveApplication(kind, direction, tuple(portions), norm)


def _param_str(v):
    if isinstance(v, bool):
        return "1" if v else "0"
    return str(v)


_PORTION_RE = re.compile(r"\((\d+),(\d+),(\d+),([+-]1)\)")


def parse_application(text):
    parts = text.split()
    if len(parts) < 3:
        raise MoveError("bad application line: %r" % text)
    kind, direction, pspec = parts[0], parts[1], parts[2]
    if kind not in ALL_KINDS:
        raise MoveError("unknown move kind %r" % kind)
    if direction not in ("fwd", "bwd"):
        raise MoveError("bad direction %r" % direction)
    portions = []
    if pspec != "-":
        pos = 0
        for m in _PORTION_RE.finditer(pspec):
            if m.start() != pos:
                raise MoveError("bad portion spec %r" % pspec)
            pos = m.end()
            strand, start, end = int(m.group(1)) - 1, int(m.group(2)), int(m.group(3))
            portions.append((strand, start, end))
        if pos != len(pspec):
            raise MoveError("bad portion spec %r" % pspec)
    params = {}
    for kv in parts[3:]:
        k, _, v = kv.partition("=")
        params[k] = v
    return kind, direction, portions, params


def resolve_application(d, text):
    """Parse a trace line against a concrete diagram (expands slot runs)."""
    kind, direction, raw_portions, params = parse_application(text)
    portions = []
    for strand, start, end in raw_portions:
        if strand >= d.n:
            raise MoveError("strand out of range in %r" % text)
        L = len(d.strands[strand])
        if start == end:
            slots = (start,)
        elif d.kind == CLOSED and start > end:
            slots = tuple(range(start, start + (end - start) % L + 1))
            slots = tuple(s % L for s in slots)
        else:
            slots = tuple(range(start, end + 1))
        portions.append(Portion(strand, slots))
    norm = tuple(sorted(params.items()))
    return MoveApplication(kind, direction, tuple(portions), norm)


# -- slot arithmetic ---------------------------------------------------------

def _succ(d, strand, pos):
    L = len(d.strands[strand])
    if d.kind == CLOSED:
        return (pos + 1) % L
    return pos + 1 if pos + 1 < L else None


def adjacent_pair(d, end_a, end_b):
    """If the two (strand,pos) ends are cyclically consecutive on one strand,
    return (strand, (first,second), a_is_second); else None."""
    (s1, p1), (s2, p2) = end_a, end_b
    if s1 != s2:
        return None
    if _succ(d, s1, p1) == p2:
        return Portion(s1, (p1, p2)), False
    if _succ(d, s1, p2) == p1:
        return Portion(s1, (p2, p1)), True
    return None


def _portions_disjoint(portions):
    seen = set()
    for p in portions:
        for s in p.slots:
            if (p.strand, s) in seen:
                return False
            seen.add((p.strand, s))
    return True


def _slot(d, strand, pos):
    return d.strands[strand][pos]


# -- structural edits --------------------------------------------------------

def _delete(d, slots, dead_arrows):
    doomed = set(slots)
    strands = []
    for i, strand in enumerate(d.strands):
        strands.append(tuple(e for p, e in enumerate(strand)
                             if (i, p) not in doomed))
    signs = {a: s for a, s in d.signs.items() if a not in dead_arrows}
    return GaussDiagram(d.n, d.kind, strands, signs)


def _insert(d, inserts, new_signs):
    """inserts: list of (strand, gap, [(aid, role), ...]); gaps refer to the
    original sequences.  Multiple inserts on one strand are applied from the
    highest gap down; equal gaps are applied in list order (later entries end
    up after earlier ones at the same gap)."""
    per_strand = {}
    for order, (strand, gap, seq) in enumerate(inserts):
        per_strand.setdefault(strand, []).append((gap, order, seq))
    strands = []
    for i, strand in enumerate(d.strands):
        seq = list(strand)
        if i in per_strand:
            L = len(strand)
            for gap, _order, chunk in sorted(per_strand[i],
                                             key=lambda t: (-t[0], -t[1])):
                if not 0 <= gap <= L:
                    raise MoveError("gap %d out of range" % gap)
                seq[gap:gap] = list(chunk)
        strands.append(tuple(seq))
    signs = dict(d.signs)
    signs.update(new_signs)
    return GaussDiagram(d.n, d.kind, strands, signs)


def _transpose(d, portion):
    i = portion.strand
    a, b = portion.slots
    seq = list(d.strands[i])
    seq[a], seq[b] = seq[b], seq[a]
    strands = list(d.strands)
    strands[i] = tuple(seq)
    return GaussDiagram(d.n, d.kind, strands, d.signs, validate=False)


def _rewrite_arrows(d, role_flips, sign_flips):
    """role_flips: arrow ids whose two endpoints swap roles (tail<->head);
    sign_flips: arrow ids whose sign flips."""
    flips = set(role_flips)
    strands = []
    for strand in d.strands:
        strands.append(tuple(
            (a, (HEAD if r == TAIL else TAIL) if a in flips else r)
            for a, r in strand))
    signs = dict(d.signs)
    for a in sign_flips:
        signs[a] = -signs[a]
    return GaussDiagram(d.n, d.kind, strands, signs)


# -- per-kind matching -------------------------------------------------------

def _adjacent_runs(d, strand, width):
    """All cyclic windows of `width` consecutive slots on the strand."""
    L = len(d.strands[strand])
    if L < width:
        return
    if d.kind == CLOSED:
        span = L if L > width else (1 if L == width else 0)
        for start in range(span):
            yield Portion(strand, tuple((start + k) % L for k in range(width)))
        if L == width and L > 1:
            # rotations of the full circle are distinct windows
            for start in range(1, L):
                yield Portion(strand, tuple((start + k) % L for k in range(width)))
    else:
        for start in range(L - width + 1):
            yield Portion(strand, tuple(range(start, start + width)))


def _enum_r1(d):
    out = []
    for i in range(d.n):
        for portion in _adjacent_runs(d, i, 2):
            (a, _), (b, _) = (_slot(d, i, p) for p in portion.slots)
            if a == b:
                out.append(app(R1, "fwd", [portion]))
    return out


def _enum_r2(d):
    out = []
    ids = d.arrow_ids
    for ai in range(len(ids)):
        for bi in range(ai + 1, len(ids)):
            a, b = ids[ai], ids[bi]
            if d.signs[a] != -d.signs[b]:
                continue
            tp = adjacent_pair(d, d.tail_of(a), d.tail_of(b))
            hp = adjacent_pair(d, d.head_of(a), d.head_of(b))
            if tp is None or hp is None:
                continue
            if not _portions_disjoint([tp[0], hp[0]]):
                continue
            out.append(app(R2, "fwd", [tp[0], hp[0]]))
    return out


def _enum_commute(d, kind):
    want_mixed = kind == F
    out = []
    for i in range(d.n):
        for portion in _adjacent_runs(d, i, 2):
            (a, ra), (b, rb) = (_slot(d, i, p) for p in portion.slots)
            if want_mixed:
                ok = {ra, rb} == {TAIL, HEAD}
            elif kind == OC:
                ok = ra == rb == TAIL and a != b
            else:
                ok = ra == rb == HEAD and a != b
            if ok:
                out.append(app(kind, "fwd", [portion]))
    return out


def _arrow_portions(d, aid):
    ts, tp = d.tail_of(aid)
    hs, hp = d.head_of(aid)
    return (Portion(ts, (tp,)), Portion(hs, (hp,)))


def _enum_single_arrow(d, kind):
    self_only = kind in (SC, SV)
    out = []
    for aid in d.arrow_ids:
        if self_only and not d.is_self_arrow(aid):
            continue
        out.append(app(kind, "fwd", _arrow_portions(d, aid), arrow=aid))
    return out


def _r3_orders(d, u, v, w):
    """Portions and order bits for the transitive triple, or None."""
    if len({u, v, w}) != 3:
        return None
    if d.head_strand(u) != d.tail_strand(w):
        return None
    if d.tail_strand(v) != d.tail_strand(u) or d.head_strand(v) != d.head_strand(w):
        return None
    pT = adjacent_pair(d, d.tail_of(u), d.tail_of(v))
    pM = adjacent_pair(d, d.head_of(u), d.tail_of(w))
    pB = adjacent_pair(d, d.head_of(v), d.head_of(w))
    if pT is None or pM is None or pB is None:
        return None
    portions = [pT[0], pM[0], pB[0]]
    if not _portions_disjoint(portions):
        return None
    o_t = 1 if pT[1] else -1          # +1 iff tail(u) is second
    o_m = -1 if pM[1] else 1          # +1 iff tail(w) is second
    o_b = -1 if pB[1] else 1          # +1 iff head(w) is second
    return portions, o_t, o_m, o_b


def r3_admissible(d, u, v, w):
    got = _r3_orders(d, u, v, w)
    if got is None:
        return None
    portions, o_t, o_m, o_b = got
    if o_t * o_b != -d.signs[u] * d.signs[w]:
        return None
    if o_t * o_m != -d.signs[v] * d.signs[w]:
        return None
    return portions


def _delta_orders(d, u, v, w):
    if len({u, v, w}) != 3:
        return None
    if d.head_strand(u) != d.tail_strand(v):
        return None
    if d.head_strand(v) != d.tail_strand(w):
        return None
    if d.head_strand(w) != d.tail_strand(u):
        return None
    pA = adjacent_pair(d, d.tail_of(u), d.head_of(w))
    pB = adjacent_pair(d, d.head_of(u), d.tail_of(v))
    pC = adjacent_pair(d, d.head_of(v), d.tail_of(w))
    if pA is None or pB is None or pC is None:
        return None
    portions = [pA[0], pB[0], pC[0]]
    if not _portions_disjoint(portions):
        return None
    o_a = -1 if pA[1] else 1          # +1 iff head(w) is second
    o_b = 1 if pB[1] else -1          # +1 iff head(u) is second
    o_c = -1 if pC[1] else 1          # +1 iff tail(w) is second
    return portions, o_a, o_b, o_c


def delta_admissible(d, u, v, w):
    got = _delta_orders(d, u, v, w)
    if got is None:
        return None
    portions, o_a, o_b, o_c = got
    if o_a * o_b != d.signs[v] * d.signs[w]:
        return None
    if o_a * o_c != -d.signs[u] * d.signs[v]:
        return None
    return portions


def _enum_triple(d, kind):
    import itertools
    admis = r3_admissible if kind == R3 else delta_admissible
    out = []
    seen = set()
    for u, v, w in itertools.permutations(d.arrow_ids, 3):
        portions = admis(d, u, v, w)
        if portions is None:
            continue
        a = app(kind, "fwd", portions)
        if a not in seen:
            seen.add(a)
            out.append(a)
    return out


def _band_shape(d, u1, u2, u3, u4):
    """Band portions for arrows p->r, p->s, q->r, q->s, or None."""
    pp = adjacent_pair(d, d.tail_of(u1), d.tail_of(u2))
    pq = adjacent_pair(d, d.tail_of(u3), d.tail_of(u4))
    pr = adjacent_pair(d, d.head_of(u1), d.head_of(u3))
    ps = adjacent_pair(d, d.head_of(u2), d.head_of(u4))
    if pp is None or pq is None or pr is None or ps is None:
        return None
    portions = [pp[0], pq[0], pr[0], ps[0]]
    if not _portions_disjoint(portions):
        return None
    w_p = -1 if pp[1] else 1          # +1 iff tail(u1) first
    w_q = -1 if pq[1] else 1
    w_r = -1 if pr[1] else 1          # +1 iff head(u1) first
    w_s = -1 if ps[1] else 1
    return portions, w_p, w_q, w_r, w_s


def bp_admissible(d, u1, u2, u3, u4):
    got = _band_shape(d, u1, u2, u3, u4)
    if got is None:
        return None
    portions, w_p, w_q, w_r, w_s = got
    s1, s2, s3, s4 = (d.signs[a] for a in (u1, u2, u3, u4))
    if s1 * s3 != w_p * w_q:
        return None
    if s1 * s2 != w_r * w_s:
        return None
    if s1 * s2 * s3 * s4 != 1:
        return None
    return portions


def _enum_band(d, kind):
    import itertools
    out = []
    seen = set()
    for quad in itertools.permutations(d.arrow_ids, 4):
        if len(set(quad)) != 4:
            continue
        u1, u2, u3, u4 = quad
        if kind == BP:
            portions = bp_admissible(d, *quad)
            if portions is None:
                continue
            a = app(BP, "fwd", portions)
            if a not in seen:
                seen.add(a)
                out.append(a)
        else:
            got = _band_shape(d, *quad)
            if got is None:
                continue
            portions = got[0]
            for vc in ("pr", "ps", "qr", "qs"):
                a = app(WBP, "fwd", portions, vc=vc)
                if a not in seen:
                    seen.add(a)
                    out.append(a)
    return out


def _window_arrows(d, portion):
    return [_slot(d, portion.strand, p) for p in portion.slots]


def _enum_mixed4(d):
    out = []
    seen = set()
    for i in range(d.n):
        for wa in _adjacent_runs(d, i, 4):
            ends = _window_arrows(d, wa)
            arrows = [a for a, _ in ends]
            roles = [r for _, r in ends]
            if len(set(arrows)) != 4:
                continue
            if roles != [roles[0], _flip(roles[0])] * 2:
                continue
            sgns = {d.signs[a] for a in arrows}
            if len(sgns) != 1:
                continue
            others = []
            for a, r in ends:
                s, p = (d.tail_of(a) if r == HEAD else d.head_of(a))
                others.append((s, p, a))
            strands = {s for s, _, _ in others}
            if len(strands) != 1:
                continue
            j = strands.pop()
            got = _contiguous_window(d, j, [(p, a) for _, p, a in others])
            if got is None:
                continue
            wb, order = got
            if order not in ("par", "rev"):
                continue
            if not _portions_disjoint([wa, wb]):
                continue
            key = frozenset([(wa.strand, wa.slots), (wb.strand, wb.slots)])
            if key in seen:
                continue
            seen.add(key)
            first = min([wa, wb], key=lambda p: (p.strand, p.slots))
            second = wa if first is wb else wb
            out.append(app(MIXED4, "fwd", [first, second]))
    return out


def _contiguous_window(d, strand, pos_arrows):
    """Given [(pos, arrow)...] on one strand, check the positions form a
    cyclic 4-window and the arrow order is the input order or its reverse."""
    positions = [p for p, _ in pos_arrows]
    for w in _adjacent_runs(d, strand, len(pos_arrows)):
        if set(w.slots) == set(positions):
            order_arrows = []
            for s in w.slots:
                for p, a in pos_arrows:
                    if p == s:
                        order_arrows.append(a)
            want = [a for _, a in pos_arrows]
            if order_arrows == want:
                return w, "par"
            if order_arrows == want[::-1]:
                return w, "rev"
            return None
    return None


def _flip(role):
    return HEAD if role == TAIL else TAIL


def _enum_m(d):
    import itertools
    out = []
    seen = set()
    for a, b in itertools.permutations(d.arrow_ids, 2):
        if d.signs[a] != d.signs[b]:
            continue
        if d.tail_strand(a) != d.head_strand(b) or d.head_strand(a) != d.tail_strand(b):
            continue
        pP = adjacent_pair(d, d.tail_of(a), d.head_of(b))
        pQ = adjacent_pair(d, d.head_of(a), d.tail_of(b))
        if pP is None or pQ is None:
            continue
        portions = (pP[0], pQ[0])
        if not _portions_disjoint(portions):
            continue
        key = frozenset((p.strand, p.slots) for p in portions)
        if key in seen:
            continue
        seen.add(key)
        out.append(app(M, "fwd", sorted(portions, key=lambda p: (p.strand, p.slots))))
    return out


_ENUMERATORS = {
    R1: _enum_r1,
    R2: _enum_r2,
    OC: lambda d: _enum_commute(d, OC),
    UC: lambda d: _enum_commute(d, UC),
    F: lambda d: _enum_commute(d, F),
    CC: lambda d: _enum_single_arrow(d, CC),
    SC: lambda d: _enum_single_arrow(d, SC),
    V: lambda d: _enum_single_arrow(d, V),
    SV: lambda d: _enum_single_arrow(d, SV),
    VC: lambda d: _enum_single_arrow(d, VC),
    SR: lambda d: _enum_single_arrow(d, SR),
    R3: lambda d: _enum_triple(d, R3),
    DELTA: lambda d: _enum_triple(d, DELTA),
    BP: lambda d: _enum_band(d, BP),
    WBP: lambda d: _enum_band(d, WBP),
    MIXED4: _enum_mixed4,
    M: _enum_m,
}


def enumerate_moves(d, kind):
    """Every applicable forward instance, deterministically ordered."""
    if kind not in ALL_KINDS:
        raise MoveError("unknown move kind %r" % kind)
    out = _ENUMERATORS[kind](d)
    out.sort(key=lambda a: a.spec())
    return out


# -- application -------------------------------------------------------------

def _check_portion(d, portion):
    L = len(d.strands[portion.strand])
    if portion.strand >= d.n:
        raise MoveError("portion strand out of range")
    for s in portion.slots:
        if not 0 <= s < L:
            raise MoveError("portion slot out of range")
    for a, b in zip(portion.slots, portion.slots[1:]):
        if _succ(d, portion.strand, a) != b:
            raise MoveError("portion slots not consecutive")


def _portion_ends(d, portion):
    return [(_slot(d, portion.strand, p), (portion.strand, p)) for p in portion.slots]


def _single_arrow_ok(d, a):
    aid = a.param("arrow")
    if aid is None:
        raise MoveError("missing arrow parameter")
    aid = int(aid)
    if aid not in d.signs:
        raise MoveError("arrow %d not in diagram" % aid)
    if a.kind in (SC, SV) and not d.is_self_arrow(aid):
        raise MoveError("%s needs a self-arrow" % a.kind)
    return aid


def apply_move(d, a):
    """Apply a MoveApplication, re-validating the pattern."""
    for p in a.portions:
        _check_portion(d, p)
    if a.direction == "bwd" and a.kind in (R1, R2, V, SV, MIXED4):
        return _apply_insertion(d, a)
    if a.direction not in ("fwd", "bwd"):
        raise MoveError("bad direction")

    k = a.kind
    if k == R1:
        (p,) = a.portions
        ends = _window_arrows(d, p)
        if len(ends) != 2 or ends[0][0] != ends[1][0]:
            raise MoveError("not an isolated self-arrow pair")
        aid = ends[0][0]
        return _delete(d, [(p.strand, s) for s in p.slots], {aid})

    if k == R2:
        tp, hp = a.portions
        tends, hends = _window_arrows(d, tp), _window_arrows(d, hp)
        if {r for _, r in tends} != {TAIL} or {r for _, r in hends} != {HEAD}:
            raise MoveError("R2 needs a tail pair and a head pair")
        arrows = {a0 for a0, _ in tends}
        if arrows != {a0 for a0, _ in hends} or len(arrows) != 2:
            raise MoveError("R2 pairs must share the same two arrows")
        x, y = sorted(arrows)
        if d.signs[x] != -d.signs[y]:
            raise MoveError("R2 needs opposite signs")
        slots = [(tp.strand, s) for s in tp.slots] + [(hp.strand, s) for s in hp.slots]
        return _delete(d, slots, arrows)

    if k in (OC, UC, F):
        (p,) = a.portions
        ends = _window_arrows(d, p)
        roles = {r for _, r in ends}
        if k == OC and (roles != {TAIL} or ends[0][0] == ends[1][0]):
            raise MoveError("OC needs two tails of distinct arrows")
        if k == UC and (roles != {HEAD} or ends[0][0] == ends[1][0]):
            raise MoveError("UC needs two heads of distinct arrows")
        if k == F and roles != {TAIL, HEAD}:
            raise MoveError("F needs one tail and one head")
        return _transpose(d, p)

    if k in (CC, SC):
        aid = _single_arrow_ok(d, a)
        return _rewrite_arrows(d, [aid], [aid])
    if k == VC:
        aid = _single_arrow_ok(d, a)
        return _rewrite_arrows(d, [aid], [])
    if k == SR:
        aid = _single_arrow_ok(d, a)
        return _rewrite_arrows(d, [], [aid])
    if k in (V, SV):
        aid = _single_arrow_ok(d, a)
        return _delete(d, [d.tail_of(aid), d.head_of(aid)], {aid})

    if k in (R3, DELTA):
        got = _resolve_triple(d, a)
        if got is None:
            raise MoveError("%s pattern does not match" % k)
        out = d
        for p in a.portions:
            out = _transpose(out, p)
        return out

    if k in (BP, WBP):
        arrows = _resolve_band(d, a)
        if arrows is None:
            raise MoveError("%s pattern does not match" % k)
        u1, u2, u3, u4 = arrows
        if k == BP:
            return _rewrite_arrows(d, [u1, u2, u3, u4], [u1, u2, u3, u4])
        vc = a.param("vc")
        keep = {"pr": u1, "ps": u2, "qr": u3, "qs": u4}.get(vc)
        if keep is None:
            raise MoveError("wBP needs vc in pr/ps/qr/qs")
        return _rewrite_arrows(d, [u1, u2, u3, u4],
                               [x for x in (u1, u2, u3, u4) if x != keep])

    if k == MIXED4:
        wa, wb = a.portions
        arrows = {x for x, _ in _window_arrows(d, wa)}
        if len(arrows) != 4 or arrows != {x for x, _ in _window_arrows(d, wb)}:
            raise MoveError("4-move windows must share four arrows")
        if not _recheck_mixed4(d, wa, wb):
            raise MoveError("4-move pattern does not match")
        slots = [(wa.strand, s) for s in wa.slots] + [(wb.strand, s) for s in wb.slots]
        return _delete(d, slots, arrows)

    if k == M:
        got = _resolve_m(d, a)
        if got is None:
            raise MoveError("M pattern does not match")
        x, y = got
        out = d
        for p in a.portions:
            out = _transpose(out, p)
        return _rewrite_arrows(out, [], [x, y])

    raise MoveError("unknown move kind %r" % k)


def _resolve_triple(d, a):
    pats = enumerate_moves(d, a.kind)
    probe = app(a.kind, "fwd", a.portions)
    return probe if probe in pats else None


def _resolve_band(d, a):
    pp, pq, pr, ps = a.portions
    tails_p = {x for x, r in _window_arrows(d, pp)}
    tails_q = {x for x, r in _window_arrows(d, pq)}
    heads_r = {x for x, r in _window_arrows(d, pr)}
    heads_s = {x for x, r in _window_arrows(d, ps)}

    def pick(p, q):
        both = p & q
        return both.pop() if len(both) == 1 else None

    u1, u2 = pick(tails_p, heads_r), pick(tails_p, heads_s)
    u3, u4 = pick(tails_q, heads_r), pick(tails_q, heads_s)
    if None in (u1, u2, u3, u4) or len({u1, u2, u3, u4}) != 4:
        return None
    for x in (u1, u3):
        if d.head_of(x) not in [(pr.strand, s) for s in pr.slots]:
            return None
    for x, p in ((u1, pp), (u2, pp), (u3, pq), (u4, pq)):
        if d.tail_of(x) not in [(p.strand, s) for s in p.slots]:
            return None
    if a.kind == BP and bp_admissible(d, u1, u2, u3, u4) is None:
        return None
    if a.kind == WBP and _band_shape(d, u1, u2, u3, u4) is None:
        return None
    return u1, u2, u3, u4


def _recheck_mixed4(d, wa, wb):
    for cand in _enum_mixed4(d):
        if set(cand.portions) == {wa, wb}:
            return True
    return False


def _resolve_m(d, a):
    pP, pQ = a.portions
    endsP, endsQ = _window_arrows(d, pP), _window_arrows(d, pQ)
    arrows = {x for x, _ in endsP}
    if arrows != {x for x, _ in endsQ} or len(arrows) != 2:
        return None
    rolesP = {(x, r) for x, r in endsP}
    x = y = None
    for cand in arrows:
        if (cand, TAIL) in rolesP:
            x = cand
        if (cand, HEAD) in rolesP:
            y = cand
    if x is None or y is None or x == y:
        return None
    if d.signs[x] != d.signs[y]:
        return None
    if d.tail_strand(x) != d.head_strand(y) or d.head_strand(x) != d.tail_strand(y):
        return None
    if {(x, HEAD), (y, TAIL)} != {(e, r) for e, r in endsQ}:
        return None
    return x, y


# -- insertions (backward applications) --------------------------------------

def _gapcheck(d, strand, gap):
    if not 0 <= strand < d.n:
        raise MoveError("strand out of range")
    L = len(d.strands[strand])
    top = L if d.kind == OPEN else max(L, 1)
    if not 0 <= int(gap) <= top:
        raise MoveError("gap out of range")
    return int(gap)


def _apply_insertion(d, a):
    k = a.kind
    P = a.param
    if k == R1:
        strand = int(P("strand")) - 1
        gap = _gapcheck(d, strand, P("gap"))
        sign = int(P("sign"))
        order = P("order", "TH")
        (aid,) = d.fresh_id()
        seq = [(aid, TAIL), (aid, HEAD)] if order == "TH" else [(aid, HEAD), (aid, TAIL)]
        return _insert(d, [(strand, gap, seq)], {aid: sign})

    if k in (V, SV):
        ts, hs = int(P("tail_strand")) - 1, int(P("head_strand")) - 1
        if k == SV and ts != hs:
            raise MoveError("SV inserts a self-arrow")
        tg, hg = _gapcheck(d, ts, P("tail_gap")), _gapcheck(d, hs, P("head_gap"))
        sign = int(P("sign"))
        (aid,) = d.fresh_id()
        if ts == hs and tg == hg:
            order = P("order", "TH")
            seq = [(aid, TAIL), (aid, HEAD)] if order == "TH" else [(aid, HEAD), (aid, TAIL)]
            return _insert(d, [(ts, tg, seq)], {aid: sign})
        return _insert(d, [(ts, tg, [(aid, TAIL)]), (hs, hg, [(aid, HEAD)])],
                       {aid: sign})

    if k == R2:
        ts, hs = int(P("tail_strand")) - 1, int(P("head_strand")) - 1
        tg, hg = _gapcheck(d, ts, P("tail_gap")), _gapcheck(d, hs, P("head_gap"))
        sign = int(P("sign"))
        t_order = P("tails", "ab")
        h_order = P("heads", "ab")
        x, y = d.fresh_id(2)
        tails = [(x, TAIL), (y, TAIL)] if t_order == "ab" else [(y, TAIL), (x, TAIL)]
        heads = [(x, HEAD), (y, HEAD)] if h_order == "ab" else [(y, HEAD), (x, HEAD)]
        if ts == hs and tg == hg:
            cluster = P("cluster", "TH")
            seq = tails + heads if cluster == "TH" else heads + tails
            return _insert(d, [(ts, tg, seq)], {x: sign, y: -sign})
        return _insert(d, [(ts, tg, tails), (hs, hg, heads)], {x: sign, y: -sign})

    if k == MIXED4:
        sa, sb = int(P("strand_a")) - 1, int(P("strand_b")) - 1
        ga, gb = _gapcheck(d, sa, P("gap_a")), _gapcheck(d, sb, P("gap_b"))
        if sa == sb and ga == gb:
            raise MoveError("4-move windows need distinct gaps")
        sign = int(P("sign"))
        lead = P("lead", TAIL)
        pairing = P("pairing", "par")
        ids = d.fresh_id(4)
        seq_a = [(ids[i], lead if i % 2 == 0 else _flip(lead)) for i in range(4)]
        if pairing == "par":
            seq_b = [(e, _flip(r)) for e, r in seq_a]
        else:
            seq_b = [(e, _flip(r)) for e, r in reversed(seq_a)]
        return _insert(d, [(sa, ga, seq_a), (sb, gb, seq_b)],
                       {e: sign for e in ids})

    raise MoveError("%s has no backward insertion" % k)


def inverse_application(d_before, a):
    """The application undoing `a` when applied to apply_move(d_before, a)."""
    k = a.kind
    if k in (OC, UC, F, CC, SC, VC, SR, R3, DELTA, BP, WBP, M):
        return a
    if a.direction == "fwd":
        return _deletion_inverse(d_before, a)
    return _insertion_inverse(d_before, a)


def _deletion_inverse(d, a):
    k = a.kind
    if k == R1:
        (p,) = a.portions
        (aid, r0), _ = (_slot(d, p.strand, s) for s in p.slots)
        return app(R1, "bwd", [], strand=p.strand + 1, gap=p.slots[0],
                   sign=d.signs[aid], order="TH" if r0 == TAIL else "HT")
    if k in (V, SV):
        aid = int(a.param("arrow"))
        ts, tp = d.tail_of(aid)
        hs, hp = d.head_of(aid)
        params = dict(tail_strand=ts + 1, head_strand=hs + 1,
                      sign=d.signs[aid])
        if ts == hs:
            if tp < hp:
                params.update(tail_gap=tp, head_gap=hp - 1)
                if hp - 1 == tp:
                    params.update(order="TH")
            else:
                params.update(head_gap=hp, tail_gap=tp - 1)
                if tp - 1 == hp:
                    params.update(order="HT")
        else:
            params.update(tail_gap=tp, head_gap=hp)
        return app(k, "bwd", [], **params)
    if k == R2:
        tp, hp = a.portions
        (x, _), (y, _) = (_slot(d, tp.strand, s) for s in tp.slots)
        hx = _slot(d, hp.strand, hp.slots[0])[0]
        return app(R2, "bwd", [],
                   tail_strand=tp.strand + 1, tail_gap=_gap_after_removal(d, tp, a.portions),
                   head_strand=hp.strand + 1, head_gap=_gap_after_removal(d, hp, a.portions),
                   sign=d.signs[x], tails="ab",
                   heads="ab" if hx == x else "ba")
    if k == MIXED4:
        wa, wb = a.portions
        ends_a = _window_arrows(d, wa)
        arrows_a = [x for x, _ in ends_a]
        ends_b = _window_arrows(d, wb)
        arrows_b = [x for x, _ in ends_b]
        pairing = "par" if arrows_a == arrows_b else "rev"
        return app(MIXED4, "bwd", [],
                   strand_a=wa.strand + 1, gap_a=_gap_after_removal(d, wa, a.portions),
                   strand_b=wb.strand + 1, gap_b=_gap_after_removal(d, wb, a.portions),
                   sign=d.signs[arrows_a[0]], lead=ends_a[0][1], pairing=pairing)
    raise MoveError("no inverse for %s" % k)


def _gap_after_removal(d, portion, removed):
    """Gap index where the portion's slots sat, once all removed slots on the
    same strand vanish."""
    start = portion.slots[0]
    lost_before = sum(1 for p in removed if p.strand == portion.strand
                      for s in p.slots if s < start and p is not portion)
    return start - lost_before


def _insertion_inverse(d, a):
    after = _apply_insertion(d, a)
    k = a.kind
    new_ids = sorted(set(after.signs) - set(d.signs))
    if k == R1:
        aid = new_ids[0]
        pair = adjacent_pair(after, after.tail_of(aid), after.head_of(aid))
        return app(R1, "fwd", [pair[0]])
    if k in (V, SV):
        aid = new_ids[0]
        return app(k, "fwd", _arrow_portions(after, aid), arrow=aid)
    if k == R2:
        x, y = new_ids
        tp = adjacent_pair(after, after.tail_of(x), after.tail_of(y))
        hp = adjacent_pair(after, after.head_of(x), after.head_of(y))
        return app(R2, "fwd", [tp[0], hp[0]])
    if k == MIXED4:
        for cand in _enum_mixed4(after):
            arrows = {x for x, _ in _window_arrows(after, cand.portions[0])}
            if arrows == set(new_ids):
                return cand
        raise MoveError("inserted 4-move pattern not found")
    raise MoveError("no inverse for %s" % k)


# -- sequences ----------------------------------------------------------------

class MoveSequence:
    """A replayable list of applications with the start fingerprint."""

    def __init__(self, start, steps=(), note=None):
        self.start_fingerprint = (start.fingerprint()
                                  if isinstance(start, GaussDiagram) else start)
        self.steps = list(steps)
        self.note = note

    def __len__(self):
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)

    def append(self, step):
        self.steps.append(step)

    def extend(self, steps):
        self.steps.extend(steps)

    def kinds(self):
        return {s.kind for s in self.steps}

    def to_text(self):
        lines = []
        if self.note:
            lines.append("# macro: %s" % self.note)
        lines.append("# start: %s" % self.start_fingerprint)
        lines.extend(s.spec() for s in self.steps)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text, diagram_for=None):
        note = None
        start = None
        raw_steps = []
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            if line.startswith("# macro:"):
                note = line.split(":", 1)[1].strip()
            elif line.startswith("# start:"):
                start = line.split(":", 1)[1].strip()
            elif not line.startswith("#"):
                raw_steps.append(line)
        if start is None:
            raise MoveError("trace missing start fingerprint")
        seq = cls(start, note=note)
        if diagram_for is None:
            raise MoveError("need the starting diagram to resolve slot runs")
        d = diagram_for
        for line in raw_steps:
            step = resolve_application(d, line)
            seq.append(step)
            d = apply_move(d, step)
        return seq


class SequenceError(MoveError):
    def __init__(self, index, cause):
        super().__init__("step %d failed: %s" % (index, cause))
        self.index = index
        self.cause = cause


def apply_sequence(d, seq, check_fingerprint=True, collect=False):
    """Left-to-right fold of apply_move; optionally keep intermediates."""
    if check_fingerprint and seq.start_fingerprint != d.fingerprint():
        raise MoveError("fingerprint mismatch: sequence is for another diagram")
    states = [d]
    cur = d
    for i, step in enumerate(seq.steps):
        try:
            cur = apply_move(cur, step)
        except (MoveError, DiagramError) as exc:
            raise SequenceError(i, exc) from exc
        if collect:
            states.append(cur)
    return (cur, states) if collect else cur
