"""Command-line front end.

Every command prints one JSON document (or DOT for volcano graphs) and exits
with 0 on success, 2 on a negative mathematical answer (not divisible, no
solution, no shift) and 1 on any failure.
"""
from __future__ import annotations

import argparse
import json
import random
import sys

from .config import using
from .curve import stable_seed
from .errors import NoShift, NoSolution, NotDivisible, OrisogenyError, VerificationFailed

SCHEMA = 1
EXIT_OK, EXIT_FAIL, EXIT_NEGATIVE = 0, 1, 2


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1) + "\n"


def _emit(args, text: str):
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load(path: str):
    with open(path) as fh:
        return json.load(fh)


def _result(kind: str, **fields):
    return {"schema": SCHEMA, "result": kind, **fields}


def _oriented(args):
    """The oriented curve named on the command line: --in file or --disc."""
    from .construct import oriented_curve
    from .orientation import OrientedCurve
    if getattr(args, "input", None):
        return OrientedCurve.from_json(_load(args.input))
    if args.disc is None:
        raise ValueError("give --in or --disc")
    return oriented_curve(args.p, args.disc, args.seed)


def _form(O, abc):
    from .quadratic import QuadForm
    f = QuadForm(*abc)
    if f.disc != O.disc:
        raise ValueError(f"form {abc} has discriminant {f.disc}, expected {O.disc}")
    return f


# ---------------------------------------------------------------------------
# commands


def cmd_divide(args):
    from .division import divide_by_integer
    from .isogeny import IsogenyChain, as_expr
    from .samples import divisible_instance
    if args.demo:
        phi, _ = divisible_instance(args.p, args.n, random.Random(stable_seed("cli-divide", args.seed)))
    else:
        phi = IsogenyChain.from_json(_load(args.input))
    try:
        q = as_expr(divide_by_integer(phi, args.n, args.verify))
    except NotDivisible:
        return EXIT_NEGATIVE, _result("not_divisible", n=args.n)
    return EXIT_OK, _result("divided", n=args.n, degree=q.degree(), verified=bool(args.verify),
                            quotient=q.to_json())


def cmd_divide_general(args):
    from .division import divide_general
    from .isogeny import IsogenyChain, as_expr
    obj = _load(args.input)
    phi = IsogenyChain.from_json(obj["phi"])
    eta = IsogenyChain.from_json(obj["eta"])
    try:
        q = as_expr(divide_general(phi, eta, args.verify))
    except NotDivisible:
        return EXIT_NEGATIVE, _result("not_divisible")
    return EXIT_OK, _result("divided", degree=q.degree(), verified=bool(args.verify),
                            quotient=q.to_json())


def cmd_primitivise(args):
    from .construct import element, e0
    from .isogeny import IsogenyExpr
    from .orientation import enc, primitivise
    if args.element:
        E = e0(args.p)
        theta = element(args.p, *args.element)
    else:
        theta = IsogenyExpr.from_json(_load(args.input))
        E = theta.domain
    X = primitivise(E, theta, verify=args.verify)
    if args.verify and not X.check():
        raise VerificationFailed("primitive orientation fails its minimal polynomial")
    return EXIT_OK, _result("primitive", disc=X.order.disc, key=enc(X).to_json(),
                            key_hex=enc(X).hex(), oriented=X.to_json())


def cmd_act(args):
    from .orientation import enc, ideal_action
    X = _oriented(args)
    f = _form(X.order, args.form)
    Y = ideal_action(X, f, args.verify)
    return EXIT_OK, _result("action", form=f.to_json(), source=enc(X).hex(), key=enc(Y).to_json(),
                            key_hex=enc(Y).hex(), oriented=Y.to_json())


def _pair(args):
    from .orientation import ideal_action
    X = _oriented(args)
    f = _form(X.order, args.form)
    base = X.twist() if args.twisted else X
    return X, ideal_action(base, f, args.verify)


def cmd_vectorise(args):
    from .vectorisation import vectorise
    X, X2 = _pair(args)
    res = vectorise(X, X2, args.epsilon, args.seed, verify=args.verify)
    return EXIT_OK, _result("vectorised", **res.to_json())


def cmd_vectorise_effective(args):
    from .orientation import enc, ideal_action
    from .vectorisation import vectorise_effective
    X, X2 = _pair(args)
    F = X if args.f_form is None else ideal_action(X, _form(X.order, args.f_form), args.verify)
    try:
        res, chain = vectorise_effective(X, X2, F, args.epsilon, args.seed, verify=args.verify)
    except NoSolution as exc:
        return EXIT_NEGATIVE, _result("no_solution", reason=str(exc))
    return EXIT_OK, _result("vectorised", **res.to_json(), chain_degree=chain.degree(),
                            codomain_j=list(chain.codomain.j_invariant().c),
                            source=enc(F).hex(), chain=chain.to_json())


def cmd_volcano(args):
    from .construct import crater_curve
    from .quadratic import QuadOrder
    from .volcano import export_volcano, walk_to_crater
    if args.action == "walk":
        X = _oriented(args)
        tr = walk_to_crater(X, args.ell, args.verify)
        return EXIT_OK, _result("walk", ell=args.ell, length=len(tr), end_disc=tr.end.order.disc,
                                **tr.to_json())
    O = QuadOrder(args.disc)
    X = crater_curve(args.p, O.fundamental_disc)
    text = export_volcano(X, args.ell, args.depth, args.format, args.verify)
    return EXIT_OK, text


def cmd_classgroup(args):
    from .quadratic import class_group
    G = class_group(args.disc)
    return EXIT_OK, _result("classgroup", **G.to_json())


def cmd_enc(args):
    from .orientation import enc
    X = _oriented(args)
    k = enc(X)
    return EXIT_OK, _result("key", key=k.to_json(), key_hex=k.hex())


def cmd_hidden_shift_demo(args):
    from .orientation import ideal_action
    from .quadratic import class_group
    from .vectorisation import hidden_shift_instance, solve_hidden_shift_bruteforce
    X = _oriented(args)
    G = class_group(X.order.disc)
    rng = random.Random(stable_seed("cli-shift", args.seed))
    planted = tuple(rng.randrange(n) for _, n in G.decomposition())
    a = G.from_vector(planted)
    X2 = ideal_action(X, a, args.verify)
    inst = hidden_shift_instance(X, X2, planted, args.verify)
    try:
        s = solve_hidden_shift_bruteforce(inst)
    except NoShift:
        return EXIT_NEGATIVE, _result("no_shift")
    return EXIT_OK, _result("shift", group=list(inst.group), planted=list(planted), found=list(s),
                            recovered=tuple(s) == planted)


# ---------------------------------------------------------------------------
# parser


def _common() -> argparse.ArgumentParser:
    c = argparse.ArgumentParser(add_help=False)
    c.add_argument("--p", type=int, default=419, help="characteristic (default 419)")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--epsilon", type=float, default=1.0)
    c.add_argument("--threads", type=int, default=1, help="accepted; computations run single-threaded")
    c.add_argument("--max-ext-degree", type=int, default=24)
    c.add_argument("--prime-cap", type=int, default=64)
    c.add_argument("--out", default=None, help="output file (default stdout)")
    c.add_argument("--format", choices=["json", "dot"], default="json")
    c.add_argument("--verify", action=argparse.BooleanOptionalAction, default=True)
    return c


def _forms(p):
    p.add_argument("--form", type=int, nargs=3, required=True, metavar=("A", "B", "C"))


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="orisogeny", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    s = sub.add_parser("divide", parents=[common], help="divide an isogeny chain by an integer")
    s.add_argument("--in", dest="input")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--demo", action="store_true", help="use a forward-built divisible instance")
    s.set_defaults(func=cmd_divide)

    s = sub.add_parser("divide-general", parents=[common], help="divide phi by eta on the right")
    s.add_argument("--in", dest="input", required=True)
    s.set_defaults(func=cmd_divide_general)

    s = sub.add_parser("primitivise", parents=[common], help="primitive orientation of an endomorphism")
    s.add_argument("--in", dest="input")
    s.add_argument("--element", type=int, nargs=4, metavar=("A", "B", "C", "D"),
                   help="(A + Bi + Cj + Dk)/2 on y^2 = x^3 + x")
    s.set_defaults(func=cmd_primitivise)

    oriented = [
        ("act", cmd_act, False, "apply an ideal class to an oriented curve"),
        ("vectorise", cmd_vectorise, True, "find the ideal class between two oriented curves"),
        ("vectorise-effective", cmd_vectorise_effective, True,
         "vectorise and evaluate the class on a third curve"),
        ("enc", cmd_enc, None, "canonical key of an oriented curve"),
        ("hidden-shift-demo", cmd_hidden_shift_demo, None, "plant and recover a hidden shift"),
    ]
    for name, func, extra, text in oriented:
        s = sub.add_parser(name, parents=[common], help=text)
        s.add_argument("--in", dest="input")
        s.add_argument("--disc", type=int)
        if extra is not None:
            _forms(s)
        if extra:
            s.add_argument("--twisted", action="store_true", help="target lies in the twisted orbit")
        if name == "vectorise-effective":
            s.add_argument("--f-form", type=int, nargs=3, metavar=("A", "B", "C"),
                           help="third curve F as the image of X under this form")
        s.set_defaults(func=func)

    s = sub.add_parser("volcano", parents=[common], help="volcano walk or graph export")
    s.add_argument("action", choices=["walk", "graph"])
    s.add_argument("--in", dest="input")
    s.add_argument("--disc", type=int)
    s.add_argument("--ell", type=int, required=True)
    s.add_argument("--depth", type=int, default=1)
    s.set_defaults(func=cmd_volcano)

    s = sub.add_parser("classgroup", parents=[common], help="class group by reduced forms")
    s.add_argument("--disc", type=int, required=True)
    s.set_defaults(func=cmd_classgroup)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        with using(prime_cap=args.prime_cap, max_ext_degree=args.max_ext_degree,
                   verify=args.verify, seed=args.seed):
            code, out = args.func(args)
    except VerificationFailed as exc:
        _emit(args, _dump(_result("error", error="verification_failed", reason=str(exc))))
        return EXIT_FAIL
    except (OrisogenyError, ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        _emit(args, _dump(_result("error", error=type(exc).__name__, reason=str(exc))))
        return EXIT_FAIL
    _emit(args, out if isinstance(out, str) else _dump(out))
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
