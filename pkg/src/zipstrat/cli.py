"""Command line front end.

Output is machine readable by default (JSON, CSV or DOT); ``--pretty``
switches to aligned text tables.  Exit codes: 0 on success, 1 when
``verify`` finds a violation, 2 on input errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from math import gcd

from .rootdata import RootDataError
from .zipdatum import CocharacterDatum, cocharacter_from_spec

DATUM_KEYS = ("type", "rank", "d", "form", "frobenius", "signature")


class UsageError(RootDataError):
    pass


# ---------------------------------------------------------------------------
# Datum input


def _spec_text(args) -> str:
    lines = []
    if args.spec:
        if args.spec == "-":
            lines.append(sys.stdin.read())
        else:
            with open(args.spec, encoding="utf-8") as fh:
                lines.append(fh.read())
    if args.datum:
        lines.extend(part.strip() for part in args.datum.split(";"))
    for key in DATUM_KEYS:
        val = getattr(args, key, None)
        if val is not None:
            lines.append(f"{key}={val}")
    if not any(line.strip() for line in lines):
        raise UsageError("no datum given: use --spec FILE, --datum 'type=A;rank=2' or --type/--rank flags")
    return "\n".join(lines)


def load_datum(args) -> CocharacterDatum:
    return cocharacter_from_spec(_spec_text(args), p=getattr(args, "p", None))


def _add_datum_args(sp: argparse.ArgumentParser) -> None:
    g = sp.add_argument_group("datum")
    g.add_argument("--spec", metavar="FILE", help="datum specification file ('-' for stdin)")
    g.add_argument("--datum", metavar="TEXT", help="inline specification, entries separated by ';'")
    g.add_argument("--type", dest="type")
    g.add_argument("--rank")
    g.add_argument("--d")
    g.add_argument("--form")
    g.add_argument("--frobenius")
    g.add_argument("--signature")


def _subset(text: str | None, cd: CocharacterDatum):
    """1-based comma list of simple roots; 'I' for the Hodge type, '' for the empty set."""
    if text is None or text.strip().upper() == "I":
        return cd.I
    items = [t for t in text.replace(" ", "").split(",") if t]
    try:
        out = frozenset(int(t) - 1 for t in items)
    except ValueError:
        raise UsageError(f"bad simple root list {text!r}") from None
    for a in out:
        cd.datum.check_simple(a)
    return out


def _fmt_set(S) -> str:
    return "{" + ",".join(str(a + 1) for a in sorted(S)) + "}"


# ---------------------------------------------------------------------------
# Output helpers


def _emit_json(obj, out) -> None:
    out.write(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _emit_table(header: list[str], rows: list[list], out, pretty: bool) -> None:
    if pretty:
        cells = [header] + [[str(c) for c in row] for row in rows]
        widths = [max(len(r[k]) for r in cells) for k in range(len(header))]
        for t, row in enumerate(cells):
            out.write("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() + "\n")
            if t == 0:
                out.write("  ".join("-" * w for w in widths) + "\n")
        return
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(header)
    wr.writerows(rows)
    out.write(buf.getvalue())


# ---------------------------------------------------------------------------
# Commands


def cmd_datum(args, out) -> int:
    cd = load_datum(args)
    info = cd.describe()
    info["label"] = cd.label
    if args.pretty:
        _emit_table(["field", "value"], [[k, info[k]] for k in sorted(info)], out, True)
    else:
        _emit_json(info, out)
    return 0


def cmd_poset(args, out) -> int:
    from .zipdatum import strata_poset

    cd = load_datum(args)
    poset = strata_poset(cd, _subset(args.flag, cd))
    if args.format == "dot":
        out.write(poset.to_dot())
    elif args.pretty:
        from .weyl import format_element

        rows = []
        for w in sorted(poset.elements, key=lambda v: (v.length, v.perm)):
            covers = " ".join(format_element(nb.element) for nb in poset.covers[w.perm])
            rows.append([format_element(w), w.length, covers])
        _emit_table(["element", "length", "covers"], rows, out, True)
    else:
        _emit_json(poset.to_json(), out)
    return 0


def cmd_canonical(args, out) -> int:
    from .canonical import canonical_type, is_bruhat_stratum
    from .weyl import format_element

    cd = load_datum(args)
    rows = []
    for w in sorted(cd.coset(), key=lambda v: (v.length, v.perm)):
        ct = canonical_type(cd, w)
        rows.append([format_element(w), w.length, _fmt_set(ct.I_w), is_bruhat_stratum(cd, w)])
    _emit_table(["w", "length", "I_w", "bruhat_stratum"], rows, out, args.pretty)
    return 0


def cmd_analyze(args, out) -> int:
    from .strata import classify, closure_open, make_w_open

    cd = load_datum(args)
    w = cd.element(args.w)
    if args.gamma:
        gamma = [cd.element(t) for t in args.gamma]
        if w.perm not in {v.perm for v in gamma}:
            gamma.append(w)
        u = make_w_open(cd, w, gamma)
    else:
        u = closure_open(cd, w)
    verdict = classify(u)
    if args.pretty:
        data = verdict.to_json()
        for key in ("w", "gamma", "has_cover", "w_bounded", "separating", "conclusion"):
            out.write(f"{key:11} {data[key]}\n")
        out.write("trace:\n")
        for line in data["trace"]:
            out.write(f"  {line}\n")
    else:
        out.write(verdict.dumps(indent=2) + "\n")
    return 0


def _closed_form_for(cd: CocharacterDatum):
    """A length one closed form for type A data with the standard Frobenius, else None.

    Returns a function alpha -> bool (smooth) on 0-based simple indices.
    """
    from .closedform import length_one_orbit

    facs = cd.datum.factors
    if any(f.kind != "A" for f in facs) or len({f.rank for f in facs}) != 1:
        return None
    kind = cd.sigma.description
    unitary = {"factor-shift": False, "unitary-inert": True, "factor-shift-with-flip": True}.get(kind)
    if kind == "trivial" and len(facs) == 1:
        unitary = False
    if unitary is None:
        return None
    n = facs[0].rank + 1
    rs = []
    for f in facs:
        out = [a - f.offset + 1 for a in range(f.offset, f.offset + f.rank) if a not in cd.I]
        if len(out) > 1:
            return None
        rs.append(out[0] if out else 0)

    def smooth(alpha: int) -> bool:
        return length_one_orbit(n, rs, cd.datum.factor_of(alpha) + 1, unitary)

    return smooth


def _survey_row(payload):
    spec, w_text, w1_text = payload
    cd = cocharacter_from_spec(spec)
    return _survey_eval(cd, cd.element(w_text), cd.element(w1_text))


def _survey_eval(cd, w, w1):
    from .canonical import canonical_type
    from .strata import classify, elementary
    from .weyl import bruhat_leq, format_element

    v = classify(elementary(cd, w, w1))
    return [
        format_element(w),
        format_element(w1),
        w.length,
        _fmt_set(canonical_type(cd, w).I_w),
        _fmt_set(canonical_type(cd, w1).I_w),
        bruhat_leq(w1, w),
        v.has_cover,
        v.w_bounded,
        v.separating,
        v.conclusion,
    ]


def cmd_survey(args, out) -> int:
    from .strata import SMOOTH, elementary_pairs
    from .weyl import format_element

    spec = _spec_text(args)
    cd = load_datum(args)
    pairs = elementary_pairs(cd)
    if args.jobs > 1 and len(pairs) > 1:
        payloads = [(spec, format_element(w), format_element(w1)) for w, w1 in pairs]
        with ProcessPoolExecutor(max_workers=args.jobs) as ex:
            rows = list(ex.map(_survey_row, payloads, chunksize=max(1, len(payloads) // (4 * args.jobs))))
    else:
        rows = [_survey_eval(cd, w, w1) for w, w1 in pairs]
    cf = _closed_form_for(cd)
    for (w, w1), row in zip(pairs, rows):
        cell = ""
        if cf is not None and w.length == 1 and w1.length == 0:
            (alpha,) = w.reduced_word()
            pred = cf(alpha)
            cell = "agree" if pred == (row[-1] == SMOOTH) else "DISAGREE"
            cell = f"{'Smooth' if pred else 'NotSmooth'} ({cell})"
        row.append(cell)
    header = ["w", "w1", "length", "I_w", "I_w1", "bruhat", "has_cover", "w_bounded", "separating",
              "conclusion", "closed_form"]
    _emit_table(header, rows, out, args.pretty)
    return 0


def cmd_bn_table(args, out) -> int:
    from .oddorth import bn_canonical_types, bn_smooth_locus, cycle_class, hasse_walls, xj_element
    from .zipdatum import bn_datum, lower_neighbors

    n, p = args.n, args.p
    cd = bn_datum(n)
    types = bn_canonical_types(n)
    rows = []
    for j in range(2 * n):
        x = xj_element(n, j)
        nbs = len(lower_neighbors(cd, types[j], x))
        locus = "x_" + ",".join(str(i) for i in sorted(bn_smooth_locus(n, j)))
        if j <= n - 1:
            rep = hasse_walls(n, j, p)
            m, cyc, mult = rep.character.m, cycle_class(j, p), str(rep.beta_multiplicity)
        else:
            m = cyc = mult = ""
        rows.append([j, x.length, _fmt_set(types[j]), nbs, locus, m, cyc, mult])
    header = ["j", "length", "I_j", "lower_neighbours_at_I_j", "smooth_locus", "m_j", "cycle_class",
              "beta_wall_multiplicity"]
    _emit_table(header, rows, out, args.pretty)
    return 0


def cmd_hasse_weight(args, out) -> int:
    from .oddorth import cycle_class, hasse_eta_formula, hasse_walls

    rep = hasse_walls(args.n, args.j, args.p)
    data = rep.to_json()
    data["eta_matches_formula"] = tuple(rep.character.eta) == hasse_eta_formula(
        args.n, args.j, args.p, rep.character.m
    )
    data["cycle_class"] = cycle_class(args.j, args.p)
    if args.pretty:
        _emit_table(["field", "value"], [[k, data[k]] for k in sorted(data)], out, True)
    else:
        _emit_json(data, out)
    return 0


def cmd_dieudonne(args, out) -> int:
    from .dieudonne import NotCoprime, common_flag, extension_holds, trajectories, verify_extension

    r, s = args.r, args.s
    if gcd(r, s) != 1:
        raise NotCoprime(
            f"gcd({r}, {s}) = {gcd(r, s)}; the closure is singular and the filtration does not extend "
            f"(extension over all proper indices: {extension_holds(r, s)})"
        )
    tr = trajectories(r, s)
    data = tr.to_json()
    data.update(
        r=r,
        s=s,
        extends=verify_extension(r, s),
        common_words={str(i): list(wd) for i, wd in sorted(common_flag(r, s).items())},
    )
    if args.pretty:
        out.write(f"word        {' '.join(tr.word)}\n")
        out.write(f"core        {' '.join(map(str, tr.core))}\n")
        out.write(f"almost-core {' '.join(map(str, tr.almost_core))}\n")
        out.write(f"extends     {data['extends']}\n")
    else:
        _emit_json(data, out)
    return 0


def cmd_verify(args, out) -> int:
    from .suites import run_suite

    checks = run_suite(args.suite)
    failed = [c for c in checks if not c.ok]
    if args.pretty:
        for c in checks:
            out.write(f"{'PASS' if c.ok else 'FAIL'}  {c.suite:10} {c.name}  {c.detail}\n")
        out.write(f"{len(checks) - len(failed)} passed, {len(failed)} failed\n")
    else:
        _emit_json(
            {
                "suite": args.suite,
                "passed": len(checks) - len(failed),
                "failed": len(failed),
                "failures": [{"suite": c.suite, "name": c.name, "detail": c.detail} for c in failed],
            },
            out,
        )
    return 1 if failed else 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="zipstrat", description="Closures of zip strata: exact combinatorics.")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, help_, datum=True):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--pretty", action="store_true", help="human readable table output")
        if datum:
            _add_datum_args(sp)
        sp.set_defaults(func=fn)
        return sp

    add("datum", cmd_datum, "print Delta, I, sigma, z, J and the number of strata")
    sp = add("poset", cmd_poset, "the order on ^{I0}W")
    sp.add_argument("--flag", metavar="I0", help="1-based simple roots of I0 (default I; '' for empty)")
    sp.add_argument("--format", choices=("json", "dot"), default="json")
    add("canonical", cmd_canonical, "canonical types I_w of all strata")
    sp = add("analyze", cmd_analyze, "classify an open union of strata")
    sp.add_argument("--w", required=True, help="element in window or word notation")
    sp.add_argument("--gamma", action="append", help="a member of gamma (repeatable; default the closure)")
    sp = add("survey", cmd_survey, "classify all two-stratum opens as CSV")
    sp.add_argument("--jobs", type=int, default=1, help="worker processes")
    sp = add("bn-table", cmd_bn_table, "odd orthogonal strata table", datum=False)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--p", type=int, default=2)
    sp = add("hasse-weight", cmd_hasse_weight, "Hasse character of an odd orthogonal stratum", datum=False)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--j", type=int, required=True)
    sp.add_argument("--p", type=int, default=2)
    sp = add("dieudonne", cmd_dieudonne, "F and V^-1 index dynamics for GL_n", datum=False)
    sp.add_argument("--r", type=int, required=True)
    sp.add_argument("--s", type=int, required=True)
    sp = add("verify", cmd_verify, "run invariant suites", datum=False)
    sp.add_argument("--suite", default="all", help="orders, bruhat, oddorth, hasse, closedform, dieudonne or all")
    return ap


def main(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except (RootDataError, OSError) as exc:
        sys.stderr.write(f"zipstrat: error: {type(exc).__name__}: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
