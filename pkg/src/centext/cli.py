"""Command-line front end.  Each subcommand resolves its inputs, makes one
library call and prints the serialized result.

Exit codes: 0 all checks pass, 1 a verification failed (witness in the
output), 2 input error or bad usage, 3 resource cap exceeded.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import extensions as ext_mod
from . import quasimorphisms as qm
from .cocycles import build_extension, cocycle_from_table, cocycle_law_table, euler_cocycle
from .errors import CentextError, InputError, ResourceCapError
from .groups import DEFAULT_BALL_CAP, FreeGroup, element, group_from_config, parse_word
from .hhs import builders, check_axioms, min_delta, quotient_model, restrict_to_unbounded
from .reports import FORMATS, render
from .triangle import verify_triangle_remark


def parse_radii(text: str) -> list[int]:
    """'a..b' (inclusive), 'a,b,c' or a single integer."""
    try:
        if ".." in text:
            a, b = text.split("..", 1)
            a, b = int(a), int(b)
            if a > b:
                raise ValueError
            return list(range(a, b + 1))
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad radii {text!r}; use a..b or a,b,c") from None


def parse_ints(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad integer list {text!r}") from None


# ---------------------------------------------------------------------------
# input resolution


def load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from None


def resolve_bundle(args):
    if args.config:
        doc = load_json(args.config)
        try:
            K, G = group_from_config(doc["kernel"]), group_from_config(doc["base"])
            omega = cocycle_from_table(G, K, doc["table"], provenance=args.config)
        except KeyError as exc:
            raise InputError(f"extension config is missing {exc}") from None
        return build_extension(K, G, omega, name=doc.get("name", args.config))
    table = ext_mod.registry_bundles()
    if args.bundle not in table:
        raise InputError(f"unknown bundle {args.bundle!r}; known: {', '.join(sorted(table))}")
    return table[args.bundle]()


def resolve_qce(name: str):
    table = ext_mod.registry_qces()
    if name not in table:
        raise InputError(f"unknown QCE {name!r}; known: {', '.join(sorted(table))}")
    return table[name]()


def resolve_qm(spec: str, args):
    """brooks:WORD, brooks-hom:WORD (on Free(2) = <a, b>), chi:BUNDLE, busemann:s1,s2."""
    kind, _, rest = spec.partition(":")
    if kind in ("brooks", "brooks-hom"):
        F = FreeGroup(2)
        w = parse_word(F, rest)
        phi = qm.brooks(F, w) if kind == "brooks" else qm.brooks_homogeneous(F, w)
        return phi, qm.brooks_defect_radius(w)
    if kind == "chi":
        table = ext_mod.registry_bundles()
        if rest not in table:
            raise InputError(f"unknown bundle {rest!r}")
        ext = ext_mod.product_form(table[rest]())
        chi = ext_mod.chi_from_cocycle(ext)
        if args.noise:
            chi = ext_mod.noisy_chi(ext, chi, args.noise, args.seed)
        return chi, None
    if kind == "busemann":
        shifts = parse_ints(rest)
        return qm.busemann_map(qm.LineAction(FreeGroup(len(shifts)), shifts), args.T), None
    raise InputError(f"unknown quasimorphism spec {spec!r}")


# ---------------------------------------------------------------------------
# handlers: each returns a result object for render()


def cmd_cocycle_check(args):
    return cocycle_law_table(euler_cocycle(resolve_bundle(args)), args.radii or [1, 2], args.cap, args.jobs)


def cmd_cocycle_sup_norm(args):
    return ext_mod.boundedness_probe(resolve_bundle(args), args.radii or [1, 2, 3, 4], args.cap, args.jobs)


def cmd_extension_build(args):
    r = max(args.radii) if args.radii else 4
    return ext_mod.extension_summary(resolve_bundle(args), 2, r)


def cmd_extension_probe(args):
    ext = resolve_bundle(args)
    if args.noise:
        return ext_mod.noise_round_trip(ext, args.noise, args.seed, max(args.radii or [4]), args.cap, args.jobs)
    return ext_mod.boundedness_probe(ext, args.radii or [1, 2, 3, 4], args.cap, args.jobs)


def cmd_qm_defect(args):
    phi, _ = resolve_qm(args.qm, args)
    return {"map": phi.name, "rows": qm.defect_growth(phi, args.radii or [1, 2, 3], args.cap, args.jobs)}


def cmd_qm_homogenize(args):
    phi, radius = resolve_qm(args.qm, args)
    D, _ = qm.defect_on_ball(phi, radius if radius is not None else args.defect_radius, args.cap, args.jobs)
    return qm.homogenization_table(phi, element(phi.domain, args.element), args.powers, D)


def cmd_qm_busemann(args):
    G = FreeGroup(len(args.shifts))
    action = qm.LineAction(G, args.shifts)
    elems = [element(G, t) for t in args.elements.split(";")]
    return qm.busemann_report(action, elems, args.T)


def cmd_qce_pullback(args):
    return ext_mod.pullback_check(resolve_qce(args.qce), args.radius, args.cap)


def cmd_qce_boundary(args):
    qce = resolve_qce(args.qce)
    omega = qce.top.cocycle if qce.top.product_form else euler_cocycle(qce.top)
    return ext_mod.boundary_identity_check(qce, ext_mod.qce_chi(qce), omega, args.radius, args.cap)


def cmd_qce_extendability(args):
    qce = resolve_qce(args.qce)
    F = qce.top.base
    if not isinstance(F, FreeGroup) or F.rank != 2:
        raise InputError(f"{qce.name}: the commutator probe needs a rank-2 free base")
    return ext_mod.commutator_power_slack(qce, ext_mod.qce_chi(qce), args.images, args.radii or list(range(1, 9)))


def cmd_examples_heisenberg(args):
    return ext_mod.heisenberg_example(args.radii or list(range(1, 9)), args.cap, args.jobs)


def cmd_examples_triangle(args):
    return verify_triangle_remark(args.orders, args.radius)


def _theta(args):
    if not args.theta:
        return None
    doc = load_json(args.theta)
    try:
        return {int(k): int(v) for k, v in doc.items()}
    except (AttributeError, ValueError):
        raise InputError("theta must be a JSON object mapping r to theta(r)") from None


def cmd_hhs_check(args):
    m = builders.resolve_model(args.model)
    return check_axioms(m, args.delta, _theta(args), args.containers, args.large_links, jobs=args.jobs)


def cmd_hhs_min_delta(args):
    m = builders.resolve_model(args.model)
    value = min_delta(m, args.delta, args.containers, args.large_links, jobs=args.jobs)
    return {"model": m.name, "delta_max": args.delta, "min_delta": value, "passed": value is not None}


def cmd_hhs_restrict(args):
    m = builders.resolve_model(args.model)
    return restrict_to_unbounded(m, args.threshold, args.delta, jobs=args.jobs)


def cmd_hhs_quotient(args):
    m = builders.resolve_model(args.model)
    if args.delta is None:
        raise InputError("hhs quotient needs --delta")
    return quotient_model(m, None, args.delta, jobs=args.jobs)


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=FORMATS, default="table")
    common.add_argument("--jobs", type=int, default=1, help="worker threads (output does not depend on it)")
    common.add_argument("--cap", type=int, default=DEFAULT_BALL_CAP, help="largest ball to enumerate")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--radii", type=parse_radii, default=None, help="a..b inclusive, or a,b,c")

    p = argparse.ArgumentParser(prog="centext", description="Central extensions, quasimorphisms and finite HHS models.")
    top = p.add_subparsers(dest="group", required=True)

    def sub(group, name, fn, help_text):
        sp = group.add_parser(name, parents=[common], help=help_text)
        sp.set_defaults(fn=fn)
        return sp

    def bundle_args(sp):
        sp.add_argument("--bundle", default="heisenberg", help="registry bundle name")
        sp.add_argument("--config", help="JSON with kernel, base and a cocycle table")

    g = top.add_parser("cocycle").add_subparsers(dest="cmd", required=True)
    bundle_args(sub(g, "check", cmd_cocycle_check, "cocycle law on ball(r)^3"))
    bundle_args(sub(g, "sup-norm", cmd_cocycle_sup_norm, "sup norm of the Euler cocycle per radius"))

    g = top.add_parser("extension").add_subparsers(dest="cmd", required=True)
    bundle_args(sub(g, "build", cmd_extension_build, "build and round-trip an extension"))
    sp = sub(g, "probe", cmd_extension_probe, "boundedness probe, or the noisy round trip with --noise")
    bundle_args(sp)
    sp.add_argument("--noise", type=int, default=0)

    g = top.add_parser("qm").add_subparsers(dest="cmd", required=True)
    for name, fn in (("defect", cmd_qm_defect), ("homogenize", cmd_qm_homogenize)):
        sp = sub(g, name, fn, f"quasimorphism {name}")
        sp.add_argument("--qm", required=True, help="brooks:WORD, brooks-hom:WORD, chi:BUNDLE or busemann:s1,s2")
        sp.add_argument("--noise", type=int, default=0)
        sp.add_argument("--T", type=int, default=64)
    g.choices["homogenize"].add_argument("--element", required=True)
    g.choices["homogenize"].add_argument("--powers", type=parse_ints, default=[8, 16, 32, 64])
    g.choices["homogenize"].add_argument("--defect-radius", type=int, default=3)
    sp = sub(g, "busemann", cmd_qm_busemann, "Busemann values for a translation action on the line")
    sp.add_argument("--shifts", type=parse_ints, required=True)
    sp.add_argument("--elements", required=True, help="words separated by ';'")
    sp.add_argument("--T", type=int, default=64)

    g = top.add_parser("qce").add_subparsers(dest="cmd", required=True)
    for name, fn, r in (("pullback", cmd_qce_pullback, 3), ("boundary", cmd_qce_boundary, 4)):
        sp = sub(g, name, fn, f"QCE {name} check")
        sp.add_argument("--qce", default="heisenberg")
        sp.add_argument("--radius", type=int, default=r)
    sp = sub(g, "extendability", cmd_qce_extendability, "slack of a homomorphism at [x,y]^k (k from --radii)")
    sp.add_argument("--qce", default="heisenberg")
    sp.add_argument("--images", type=parse_ints, default=[0, 0])

    g = top.add_parser("examples").add_subparsers(dest="cmd", required=True)
    sub(g, "heisenberg", cmd_examples_heisenberg, "sup norm of the Heisenberg cocycle against r^2")
    sp = sub(g, "triangle", cmd_examples_triangle, "exact checks on the (3,3,3) triangle group")
    sp.add_argument("--orders", type=int, default=100)
    sp.add_argument("--radius", type=int, default=6)

    g = top.add_parser("hhs").add_subparsers(dest="cmd", required=True)
    for name, fn, needs_delta in (
        ("check", cmd_hhs_check, True),
        ("min-delta", cmd_hhs_min_delta, True),
        ("restrict", cmd_hhs_restrict, False),
        ("quotient", cmd_hhs_quotient, False),
    ):
        sp = sub(g, name, fn, f"hhs {name}")
        sp.add_argument("--model", required=True, help="model JSON path or builtin:NAME")
        sp.add_argument("--delta", type=int, required=needs_delta, default=None)
        sp.add_argument("--containers", choices=("containers", "finite-dimension"), default="containers")
        sp.add_argument("--large-links", choices=("large-links", "passing-up"), default="large-links")
    g.choices["check"].add_argument("--theta", help="JSON object r -> theta(r); default: derived")
    g.choices["restrict"].add_argument("--threshold", type=int, required=True)
    return p


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        result = args.fn(args)
        text = render(result, args.format)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except ResourceCapError as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return 3
    except CentextError as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        w = getattr(exc, "witness", None)
        if w is not None:
            print(f"witness: {w!r}", file=sys.stderr)
        return 1
    out.write(text)
    if isinstance(result, dict):
        passed = result.get("passed", True)
    else:
        passed = getattr(result, "passed", True)
    return 0 if passed else 1


def main(argv=None) -> int:
    try:
        return run(argv)
    except SystemExit as exc:  # argparse usage errors
        return int(exc.code) if isinstance(exc.code, int) else 2


if __name__ == "__main__":
    sys.exit(main())
