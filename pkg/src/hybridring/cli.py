"""Command-line front end: hybridring <subcommand> [options].

Every subcommand emits one report object (JSON or markdown).  Exit codes:
0 success, 2 bad input or domain error, 1 internal error.
"""
from __future__ import annotations

import argparse
import json
from importlib import resources
import os
import sys
import time
from pathlib import Path

from . import __version__
from .characters import character_table
from .constructors import build_group, shortcut_spec
from .eimc import (
    CensusRow,
    EimcCase,
    audit,
    best_hybrid_witness,
    case_from_json,
    census,
    census_summary,
    evaluate,
    replay,
)
from .errors import DomainError
from .frobenius import frobenius_structure
from .groups import FiniteGroup, Subgroup, automorphism_from_images, describe, normal_subgroups
from .hybrid import group_ring_shape, idempotent_completeness, is_N_hybrid
from .iwasawa import (
    commutator_and_commutativity,
    finite_normal_subgroups,
    gamma_orbits,
    is_lambda_N_hybrid,
    lambda_idempotent_completeness,
    lambda_shape,
    make_lie_group,
)

SCHEMA_VERSION = 1


def load_report_schema() -> dict:
    """JSON Schema (draft 2020-12) that every report validates against."""
    text = resources.files(__package__).joinpath("schemas", "report.schema.json").read_text(encoding="utf-8")
    return json.loads(text)


class InputError(DomainError):
    """Unreadable or malformed input; carries an optional source position."""

    def __init__(self, message: str, position: dict | None = None):
        super().__init__(message)
        self.position = position


# ---------------------------------------------------------------------------
# input parsing


def _load_json_text(text: str, source: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON in {source}: {exc.msg}",
                         {"source": source, "line": exc.lineno, "column": exc.colno, "offset": exc.pos}) from None


def _load_json_arg(value: str, what: str):
    """Inline JSON (starting with '{' or '[') or a path to a JSON file."""
    v = value.strip()
    if v.startswith("{") or v.startswith("["):
        return _load_json_text(v, f"inline {what}")
    path = Path(value)
    if not path.exists():
        raise InputError(f"{what} file not found: {value}")
    return _load_json_text(path.read_text(), str(path))


def parse_group(value: str, cap: int | None) -> FiniteGroup:
    """A shortcut name (S4, Aff(5), ...), inline JSON spec, or path to a spec file."""
    v = value.strip()
    if v.startswith("{") or v.endswith(".json") or os.sep in v:
        data = _load_json_arg(v, "group spec")
        if isinstance(data, str):
            return build_group(shortcut_spec(data), cap)
        return build_group(data, cap)
    return build_group(shortcut_spec(v), cap)


def resolve_normal(G: FiniteGroup, text: str, candidates: list[Subgroup] | None = None) -> Subgroup:
    """Normal subgroup from 'trivial', 'whole', an order, 'order:k', 'members:a,b,..' or a type name."""
    normals = candidates if candidates is not None else normal_subgroups(G)
    t = text.strip()
    if t in ("1", "trivial"):
        return normals[0]
    if t in ("G", "whole"):
        hit = [N for N in normals if N.order == G.order]
        if hit:
            return hit[0]
        raise DomainError("the whole group is not an eligible subgroup here")
    if t.startswith("members:"):
        try:
            members = sorted({int(x) for x in t[8:].split(",") if x})
        except ValueError:
            raise DomainError(f"bad member list {t!r}") from None
        for N in normals:
            if list(N.members) == members:
                return N
        raise DomainError(f"{t!r} is not an eligible normal subgroup")
    order = None
    if t.startswith("order:"):
        t = t[6:]
    if t.isdigit():
        order = int(t)
        hits = [N for N in normals if N.order == order]
    else:
        hits = [N for N in normals if describe(N.as_group()[0]) == t]
    if len(hits) == 1:
        return hits[0]
    what = f"of order {order}" if order is not None else f"of type {t!r}"
    if not hits:
        avail = ", ".join(f"{N.order}:{describe(N.as_group()[0])}" for N in normals)
        raise DomainError(f"no eligible normal subgroup {what}; available: {avail}")
    raise DomainError(f"{len(hits)} normal subgroups {what}; pick one with members:...")


def parse_alpha(H: FiniteGroup, text: str | None):
    """'g:img,g:img' or a JSON object mapping generators of H to images."""
    if text is None:
        return None
    t = text.strip()
    if t.startswith("{"):
        data = _load_json_text(t, "inline alpha")
        pairs = data.items()
    else:
        try:
            pairs = [tuple(part.split(":")) for part in t.split(",") if part]
        except ValueError:
            raise DomainError(f"bad alpha {text!r}") from None
    try:
        images = {int(k): int(v) for k, v in pairs}
    except (TypeError, ValueError):
        raise DomainError(f"alpha must map element indices to element indices, got {text!r}") from None
    return automorphism_from_images(H, images)


def _parse_primes(text: str) -> list[int]:
    try:
        return sorted({int(x) for x in text.split(",") if x.strip()})
    except ValueError:
        raise DomainError(f"primes must be a comma-separated list of integers, got {text!r}") from None


def _subgroup_json(N: Subgroup) -> dict:
    return {"order": N.order, "type": describe(N.as_group()[0]), "members": list(N.members)}


# ---------------------------------------------------------------------------
# subcommands; each returns (request echo, result payload)


def cmd_chartable(args) -> tuple[dict, dict]:
    G = parse_group(args.group, args.cap)
    T = character_table(G, cap=args.cap)
    result = T.to_json()
    result["type"] = describe(G)
    result["degrees"] = [c.degree for c in T.chars]
    result["checks"] = {
        "row_orthogonality": T.check_row_orthogonality(),
        "column_orthogonality": T.check_column_orthogonality(),
        "degree_sum": sum(c.degree ** 2 for c in T.chars) == G.order,
    }
    return {"group": G.spec}, result


def cmd_hybrid(args) -> tuple[dict, dict]:
    G = parse_group(args.group, args.cap)
    p = args.p
    Ns = [resolve_normal(G, args.N)] if args.N else normal_subgroups(G)
    entries = []
    for N in Ns:
        cert = is_N_hybrid(G, N, p)
        entry = {"N": _subgroup_json(N), "certificate": cert.to_json(), "shape": None, "idempotents_complete": None}
        if cert.verdict:
            entry["shape"] = group_ring_shape(G, N, p).to_json()
            entry["idempotents_complete"] = idempotent_completeness(G, N, p)[0]
        entries.append(entry)
    best = best_hybrid_witness(G, p)
    result = {"group": G.label, "type": describe(G), "order": G.order, "p": p, "entries": entries,
              "best_witnesses": [_subgroup_json(N) for N in best]}
    return {"group": G.spec, "N": args.N, "p": p}, result


def cmd_frobenius(args) -> tuple[dict, dict]:
    G = parse_group(args.group, args.cap)
    S = frobenius_structure(G)
    result = {"group": G.label, "type": describe(G), "order": G.order, "is_frobenius": S is not None,
              "structure": None}
    if S is not None:
        body = S.to_json()
        body["kernel_type"] = describe(S.kernel.as_group()[0])
        body["complement_type"] = describe(S.complement.as_group()[0])
        body["all_checks_pass"] = S.all_checks_pass
        result["structure"] = body
    return {"group": G.spec}, result


def cmd_iwasawa(args) -> tuple[dict, dict]:
    H = parse_group(args.group, args.cap)
    alpha = parse_alpha(H, args.alpha)
    gd = make_lie_group(H, alpha, args.p, cap=args.cap)
    normals = finite_normal_subgroups(gd)
    Ns = [resolve_normal(H, args.N, normals)] if args.N else normals
    entries = []
    for N in Ns:
        cert = is_lambda_N_hybrid(gd, N)
        entry = {"N": _subgroup_json(N), "certificate": cert.to_json(), "shape": None, "idempotents_complete": None}
        if cert.verdict:
            entry["shape"] = lambda_shape(gd, N, refine=not args.coarse).to_json()
            entry["idempotents_complete"] = lambda_idempotent_completeness(gd, N)[0]
        entries.append(entry)
    result = {"lie_group": gd.to_json(), "label": gd.label, "orbits": gamma_orbits(gd).to_json(),
              "commutator": commutator_and_commutativity(gd).to_json(), "entries": entries}
    request = {"group": H.spec, "alpha": [int(x) for x in gd.alpha.images], "N": args.N, "p": args.p,
               "coarse": bool(args.coarse)}
    return request, result


def _case_from_args(args) -> tuple[EimcCase, dict]:
    if args.case:
        data = _load_json_arg(args.case, "case")
        return case_from_json(data, args.cap), data
    if not args.group or args.p is None:
        raise DomainError("eimc needs --case FILE or both --group and -p")
    G = parse_group(args.group, args.cap)
    assertions = {}
    for item in args.assertion or []:
        if "=" not in item:
            raise DomainError(f"--assert takes KEY=yes|no|unknown, got {item!r}")
        k, v = item.split("=", 1)
        assertions[k.strip()] = v.strip()
    data = {"group": G.spec, "p": args.p, "base_field_is_Q": args.base_q, "assertions": assertions,
            "mu_zero_known": args.mu, "no_skewfields_assertion": args.no_skewfields, "h_index": args.h_index}
    case = EimcCase(args.p, "finite", G, assertions=assertions, mu_zero_known=args.mu,
                    base_field_is_Q=args.base_q, no_skewfields_assertion=args.no_skewfields,
                    h_index=args.h_index)
    return case, data


def cmd_eimc(args) -> tuple[dict, dict]:
    case, data = _case_from_args(args)
    v = evaluate(case)
    result = {
        "verdict": v.to_json(),
        "replayed_level": replay(v.trace).label,
        "audit_problems": audit(case, v),
        "trace_text": v.render(),
    }
    if case.mode == "finite":
        result["best_witnesses"] = [_subgroup_json(N) for N in best_hybrid_witness(case.G, case.p)]
    return {"case": data}, result


def _family_arg(value: str):
    v = value.strip()
    if v.startswith("{") or v.endswith(".json") or os.sep in v:
        return _load_json_arg(v, "family spec")
    return {"family": v}


def cmd_census(args) -> tuple[dict, dict]:
    family = _family_arg(args.family)
    primes = _parse_primes(args.primes)
    rows = census(family, primes, cap=args.cap)
    summary = census_summary(rows)
    files = []
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        header = "\t".join(CensusRow.COLUMNS)
        for p in primes:
            path = out / f"census_p{p}.tsv"
            body = [r.tsv() for r in rows if r.p == p]
            path.write_text("\n".join([header] + body) + "\n")
            files.append(str(path))
        per_prime = {str(p): census_summary([r for r in rows if r.p == p]) for p in primes}
        spath = out / "summary.json"
        spath.write_text(json.dumps({"family": family, "primes": primes, "overall": summary,
                                     "per_prime": per_prime}, indent=2, sort_keys=True) + "\n")
        files.append(str(spath))
    result = {"rows": [r.to_json() for r in rows], "summary": summary, "files": files}
    return {"family": family, "primes": primes}, result


COMMANDS = {
    "chartable": cmd_chartable,
    "hybrid": cmd_hybrid,
    "frobenius": cmd_frobenius,
    "iwasawa-shape": cmd_iwasawa,
    "eimc": cmd_eimc,
    "census": cmd_census,
}


# ---------------------------------------------------------------------------
# rendering


def _md_table(header: list[str], rows: list[list]) -> list[str]:
    def cell(c):
        return "" if c is None else str(c).replace("|", "\\|")

    out = ["| " + " | ".join(header) + " |", "|" + "---|" * len(header)]
    for r in rows:
        out.append("| " + " | ".join(cell(c) for c in r) + " |")
    return out


def render_markdown(report: dict) -> str:
    kind = report["kind"]
    res = report.get("result", {})
    lines = [f"# hybridring {kind}", ""]
    if kind == "error":
        err = report["error"]
        lines.append(f"**{err['type']} error**: {err['message']}")
        if err.get("position"):
            pos = err["position"]
            lines.append(f"at line {pos.get('line')}, column {pos.get('column')}")
    elif kind == "chartable":
        lines.append(f"{res['label']} ({res['type']}), order {res['order']}")
        lines.append("")
        hdr = ["χ"] + [f"{c['representative']} ({c['size']})" for c in res["classes"]]
        rows = [[i] + ch["values"] for i, ch in enumerate(res["characters"])]
        lines += _md_table(hdr, rows)
    elif kind == "hybrid":
        lines.append(f"{res['group']} ({res['type']}), p = {res['p']}")
        lines.append("")
        rows = []
        for e in res["entries"]:
            shape = " ⊕ ".join(e["shape"]["labels"]) if e["shape"] else ""
            rows.append([e["N"]["order"], e["N"]["type"], e["certificate"]["verdict"],
                         e["certificate"]["reason"], shape])
        lines += _md_table(["order of N", "N", "hybrid", "reason", "Z_p[G]"], rows)
    elif kind == "frobenius":
        lines.append(f"{res['group']} ({res['type']}): " + ("Frobenius" if res["is_frobenius"] else "not Frobenius"))
        st = res["structure"]
        if st:
            lines.append("")
            lines.append(f"kernel {st['kernel_type']} (order {st['kernel_order']}), "
                         f"complement {st['complement_type']} (order {st['complement_order']})")
            lines.append("")
            lines += _md_table(["check", "value"], [[k, v] for k, v in sorted(st["checks"].items())])
    elif kind == "iwasawa-shape":
        lines.append(f"{res['label']} with |H| = {res['lie_group']['H_order']}, p = {res['lie_group']['p']}")
        lines.append("")
        rows = []
        for e in res["entries"]:
            shape = " ⊕ ".join(e["shape"]["labels"]) if e["shape"] else ""
            rows.append([e["N"]["order"], e["N"]["type"], e["certificate"]["verdict"], shape])
        lines += _md_table(["order of N", "N", "Λ hybrid", "Λ(𝒢)"], rows)
    elif kind == "eimc":
        lines.append("```")
        lines.append(res["trace_text"])
        lines.append("```")
    elif kind == "census":
        rows = [[r["group"], r["order"], r["p"], r["status"], r["best_N_order"], r["best_N_type"], r["verdict"]]
                for r in res["rows"]]
        lines += _md_table(["group", "order", "p", "status", "best N order", "best N", "verdict"], rows)
        lines.append("")
        lines.append(f"summary: {json.dumps(res['summary'], sort_keys=True)}")
    return "\n".join(lines) + "\n"


def _envelope(kind: str, request: dict) -> dict:
    return {"schema_version": SCHEMA_VERSION, "tool": "hybridring", "version": __version__,
            "kind": kind, "request": request}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hybridring", description="Hybrid group rings, Iwasawa algebras and EIMC verdicts.")
    ap.add_argument("--version", action="version", version=f"hybridring {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--format", choices=("json", "markdown"), default="json")
        sp.add_argument("--cap", type=int, default=None, help="order cap (default: HYBRIDRING_ORDER_CAP or 2000)")
        sp.add_argument("--timing", action="store_true", help="include wall-clock timing (breaks byte identity)")
        sp.add_argument("-o", "--output", help="write the report here instead of stdout")

    sp = sub.add_parser("chartable", help="character table of a finite group")
    sp.add_argument("--group", required=True)
    common(sp)

    sp = sub.add_parser("hybrid", help="N-hybrid certificates and Z_p[G] shapes")
    sp.add_argument("--group", required=True)
    sp.add_argument("--N", help="normal subgroup: type name, order, order:k, members:... (default: all)")
    sp.add_argument("-p", type=int, required=True)
    common(sp)

    sp = sub.add_parser("frobenius", help="Frobenius kernel and complement")
    sp.add_argument("--group", required=True)
    common(sp)

    sp = sub.add_parser("iwasawa-shape", help="Λ(H ⋊ Γ) hybrid certificates and shapes")
    sp.add_argument("--group", required=True, help="the finite group H")
    sp.add_argument("--alpha", help="automorphism of H as g:img,... on generators (default: identity)")
    sp.add_argument("--N", help="normal subgroup of H (default: all alpha-stable ones)")
    sp.add_argument("-p", type=int, required=True)
    sp.add_argument("--coarse", action="store_true", help="keep the Z_p[[H/N ⋊ Γ]] factor even when p ∤ |H|")
    common(sp)

    sp = sub.add_parser("eimc", help="EIMC verdict with rule trace")
    sp.add_argument("--case", help="case JSON (file or inline)")
    sp.add_argument("--group")
    sp.add_argument("-p", type=int)
    sp.add_argument("--base-Q", dest="base_q", action="store_true", help="base field is Q")
    sp.add_argument("--assert", dest="assertion", action="append", metavar="KEY=VALUE",
                    help="abelian-over-Q assertion, KEY one of sylow, normal:i, order:k, with optional *sylow")
    sp.add_argument("--mu", choices=("yes", "no", "unknown"), default="unknown")
    sp.add_argument("--no-skewfields", choices=("yes", "no", "unknown"), default="unknown")
    sp.add_argument("--h-index", type=int, default=1)
    common(sp)

    sp = sub.add_parser("census", help="verdict table over a group family")
    sp.add_argument("--family", required=True, help="family name or JSON family spec")
    sp.add_argument("--primes", default="3,5,7")
    sp.add_argument("--out-dir")
    common(sp)
    return ap


def run(argv: list[str] | None = None) -> tuple[dict, int]:
    """Parse arguments and execute; returns (report, exit code)."""
    ap = build_parser()
    args = ap.parse_args(argv)
    start = time.perf_counter()
    try:
        request, result = COMMANDS[args.command](args)
        report = _envelope(args.command, request)
        report["result"] = result
        code = 0
    except InputError as exc:
        report = _envelope("error", {"subcommand": args.command})
        report["error"] = {"type": "input", "message": str(exc), "position": exc.position}
        code = 2
    except DomainError as exc:
        report = _envelope("error", {"subcommand": args.command})
        report["error"] = {"type": "domain", "message": str(exc), "position": None}
        code = 2
    except Exception as exc:  # noqa: BLE001 - reported as an internal failure
        report = _envelope("error", {"subcommand": args.command})
        report["error"] = {"type": "internal", "message": f"{type(exc).__name__}: {exc}", "position": None}
        code = 1
    if args.timing:
        report["timing"] = {"seconds": round(time.perf_counter() - start, 6)}
    report["_format"] = args.format
    report["_output"] = args.output
    return report, code


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def main(argv: list[str] | None = None) -> int:
    report, code = run(argv)
    fmt = report.pop("_format")
    output = report.pop("_output")
    text = render_markdown(report) if fmt == "markdown" else dumps(report)
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)
    if code:
        sys.stderr.write(f"hybridring: {report['error']['message']}\n")
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
