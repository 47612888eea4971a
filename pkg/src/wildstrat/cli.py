"""Command-line interface.

Subcommands: levi, parabolic, classify, character, shapovalov, simplicity,
quantize.  All numeric inputs are exact rationals ("p/q" strings or ints);
floats are rejected.  Outputs are deterministic JSON (and DOT for Hasse
diagrams).  Exit codes: 0 success, 2 validation error, 3 claim violation
(a verified statement of the theory failed on data - should never happen).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

from .linalg import frac, frac_str
from .rootdata import RootDatumError, parse_type
from .elements import GElement, TcElement
from . import strat, parab, orbit, singmod, quant
from .parab import (ClaimViolation, FormalType, InadmissibleCharacter,
                    ParabolicFiltration, SingularCharacterError)
from .singmod import FactorisationError, SingularityModule


class ValidationError(ValueError):
    pass


def _to_frac(x):
    if isinstance(x, float):
        raise ValidationError(f"floats are not accepted: {x!r}")
    try:
        return frac(x)
    except (TypeError, ValueError) as exc:
        raise ValidationError(str(exc)) from exc


def _load_config(path):
    with open(path) as fh:
        data = json.load(fh, parse_float=_reject_float)
    return data


def _reject_float(s):
    raise ValidationError(f"floats are not accepted in config files: {s}")


def _emit(args, payload, suffix=None):
    text = json.dumps(payload, indent=2, sort_keys=True)
    out = getattr(args, "out", None)
    if out:
        path = out if suffix is None else out + suffix
        with open(path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _emit_text(args, text, suffix):
    out = getattr(args, "out", None)
    if out:
        with open(out + suffix, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


# -- cache ------------------------------------------------------------------


def _cache_path(key):
    root = os.environ.get("WILDSTRAT_CACHE_DIR")
    if not root:
        return None
    os.makedirs(root, exist_ok=True)
    digest = hashlib.sha256(key.encode()).hexdigest()[:24]
    return os.path.join(root, f"wildstrat-{digest}.json")


def _cached(key, compute):
    path = _cache_path(key)
    if path and os.path.exists(path):
        with open(path) as fh:
            stored = json.load(fh)
        if stored.get("key") == key:
            return stored["value"]
    value = compute()
    if path:
        with open(path, "w") as fh:
            json.dump({"key": key, "value": value}, fh, sort_keys=True)
    return value


# -- shared parsing ------------------------------------------------------------


def _root_datum(args):
    try:
        return parse_type(args.type)
    except RootDatumError as exc:
        raise ValidationError(str(exc)) from exc


def _parse_filtration(rd, spec, depth, parabolic=True):
    """spec: list of root-index lists, or the preset 'borel'."""
    if spec == "borel" or spec is None:
        masks = [strat.mask_from_indices(rd.positive)] * depth
    else:
        if not isinstance(spec, list) or not all(isinstance(x, list) for x in spec):
            raise ValidationError("filtration must be a list of root-index lists")
        masks = [strat.mask_from_indices(ix) for ix in spec]
        if depth and len(masks) != depth:
            raise ValidationError("filtration length does not match the depth")
    try:
        if parabolic:
            return ParabolicFiltration(rd, masks)
        return strat.LeviFiltration(rd, masks)
    except ValueError as exc:
        raise ValidationError(str(exc)) from exc


def _parse_formal_type(rd, data, depth):
    if data is None:
        raise ValidationError("a formal_type is required")
    lams = [[_to_frac(x) for x in lam] for lam in data.get("lambdas", [])]
    for lam in lams:
        if len(lam) != rd.dim_t:
            raise ValidationError("lambda entries must match the Cartan rank")
    if depth and len(lams) != depth:
        raise ValidationError("formal type depth does not match the filtration depth")
    return FormalType(lams)


def _parse_element(rd, data):
    try:
        if "coeffs" in data:
            return TcElement.from_json(rd, data)
        tup = data["tuple"]
        coeffs = [GElement.cartan_vec(rd, tuple(_to_frac(x) for x in row)) for row in tup]
        return TcElement(rd, len(coeffs), coeffs)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"bad element spec: {exc}") from exc


# -- subcommands -----------------------------------------------------------------


def cmd_levi(args):
    rd = _root_datum(args)

    def compute():
        poset = strat.LeviPoset(rd)
        payload = {
            "type": rd.label,
            "nodes": len(poset.elements),
            "ranks": sorted(poset.rank.values()),
            "covers": len(poset.covers()),
        }
        if args.depth:
            filts = strat.enumerate_filtrations(rd, args.depth)
            payload["depth"] = args.depth
            payload["filtration_count"] = len(filts)
            payload["cardinality_bound"] = strat.cardinality_bound(rd, args.depth)
            strata, _ = strat.weyl_orbits_and_quotient(rd, args.depth)
            payload["strata"] = [{
                "filtration": [sorted(strat.indices(m)) for m in s.orbit[0].masks],
                "dimension": s.orbit[0].dimension(),
                "orbit_size": len(s.orbit),
                "stabilizer_order": s.setwise_order,
                "out_order": s.out_order,
            } for s in strata]
        return payload

    payload = _cached(f"levi:{rd.label}:{args.depth}", compute)
    _emit(args, payload, suffix=".json" if args.out else None)
    if args.dot or args.out:
        _emit_text(args, strat.LeviPoset(rd).hasse_dot(), ".dot")
    return 0


def cmd_parabolic(args):
    rd = _root_datum(args)

    def compute():
        ps = parab.enumerate_parabolic(rd)
        payload = {
            "type": rd.label,
            "parabolic_subsets": len(ps),
            "weyl_classes": len(parab.weyl_classes(rd, ps)),
        }
        if args.depth:
            payload["depth"] = args.depth
            payload["filtration_count"] = len(parab.enumerate_parabolic_filtrations(rd, args.depth))
        return payload

    _emit(args, _cached(f"parabolic:{rd.label}:{args.depth}", compute))
    return 0


def cmd_classify(args):
    rd = _root_datum(args)
    config = _load_config(args.config) if args.config else {}
    data = config.get("element") or config
    x = _parse_element(rd, data)
    nf = orbit.birkhoff_normalize(x)
    rep = orbit.centralizer(x)
    payload = {
        "input": x.to_json(),
        "depth": x.depth,
        "strictness": nf.strictness,
        "normal_form": nf.normal.to_json(),
        "gauge_log": nf.gauge_log.to_json(),
        "centralizer": {
            "dim": rep.dim,
            "basis": [v.to_json() for v in rep.basis],
            "predicted_dim": rep.predicted_dim,
        },
        "marking_index": rep.marking_s,
        "filtration": ([sorted(strat.indices(m)) for m in rep.filtration.masks]
                       if rep.filtration else None),
        "conventions": {
            "filtration": "orbit side: phi_i collects roots vanishing on "
                          "X_0..X_{s-1-i}",
            "stratum_filtration": "stratification side: phi_i collects roots "
                                  "vanishing on X_j for j >= i (tuples are "
                                  "related by the swap X_i = A_{r-i})",
        },
    }
    if all(g.is_cartan() for g in x.coeffs):
        filt = strat.stratum_of_tuple(rd, [g.cartan for g in x.coeffs])
        payload["stratum_filtration"] = [sorted(strat.indices(m)) for m in filt.masks]
    _emit(args, payload)
    return 0


def cmd_character(args):
    rd = _root_datum(args)
    config = _load_config(args.config) if args.config else {}
    depth = args.depth or config.get("depth")
    pf = _parse_filtration(rd, config.get("filtration"), depth)
    payload = {
        "type": rd.label,
        "depth": pf.depth,
        "character_space_dim": parab.character_space_dim(pf),
        "balanced": pf.is_balanced(),
    }
    if config.get("formal_type"):
        ft = _parse_formal_type(rd, config["formal_type"], pf.depth)
        payload["admissible"] = parab.is_admissible(pf, ft)
        if payload["admissible"]:
            payload["nonsingular"] = parab.is_nonsingular(pf, ft)
    _emit(args, payload)
    return 0


def cmd_shapovalov(args):
    rd = _root_datum(args)
    config = _load_config(args.config) if args.config else {}
    depth = args.depth or config.get("depth")
    pf = _parse_filtration(rd, config.get("filtration"), depth)
    ft = _parse_formal_type(rd, config.get("formal_type"), pf.depth)
    mod = SingularityModule(pf, ft)
    weights = mod.weights_up_to(args.height)
    # the zero-weight block is the line through the cyclic vector
    zero_block = {
        "weight": ["0"] * rd.dim_t,
        "dim": 1, "rank": 1, "radical_dim": 0,
        "determinant": "1", "matrix": [["1"]],
    }
    blocks = []

    def handle(mu):
        blk = mod.shapovalov_block(mu)
        entry = {
            "weight": [frac_str(x) for x in mu],
            "dim": blk.dim(),
            "rank": blk.rank(),
            "radical_dim": blk.dim() - blk.rank(),
            "determinant": frac_str(blk.determinant()) if blk.dim() else "1",
            "matrix": [[frac_str(v) for v in row] for row in blk.matrix],
        }
        return entry

    if args.workers > 1:
        with ThreadPoolExecutor(max_workers=args.workers) as pool:
            blocks = list(pool.map(handle, weights))
    else:
        blocks = [handle(mu) for mu in weights]
    blocks.insert(0, zero_block)
    payload = {
        "type": rd.label,
        "depth": pf.depth,
        "height": args.height,
        "blocks": blocks,
        "first_singular_weight": next((b["weight"] for b in blocks if b["radical_dim"]), None),
    }
    if parab.is_nonsingular(pf, ft):
        dil = SingularityModule(pf, ft, dilated=True)
        duals = dil.dual_letters()
        facts = []
        for mu in weights:
            blk = dil.dual_block(mu, duals)
            d, c, q = singmod.factorize_block(blk)
            ok = singmod.reassemble(d, c, q) == blk.matrix
            if not ok:
                raise ClaimViolation("factorisation does not reproduce the block")
            facts.append({
                "weight": [frac_str(x) for x in mu],
                "diagonal": [str(d[i][i]) for i in range(blk.dim())],
                "exact": ok,
            })
        payload["factorisation"] = facts
    _emit(args, payload)
    if args.out:
        # CSV determinant table for Kac-Kazhdan-style inspection
        lines = ["weight,dim,rank,radical_dim,determinant"]
        for b in blocks:
            lines.append('"%s",%d,%d,%d,%s' % (
                " ".join(b["weight"]), b["dim"], b["rank"], b["radical_dim"],
                b["determinant"]))
        _emit_text(args, "\n".join(lines), ".csv")
    return 0


def cmd_simplicity(args):
    rd = _root_datum(args)
    config = _load_config(args.config) if args.config else {}
    depth = args.depth or config.get("depth")
    pf = _parse_filtration(rd, config.get("filtration"), depth)
    ft = _parse_formal_type(rd, config.get("formal_type"), pf.depth)
    probe = singmod.conjecture_probe(pf, ft, args.height)
    _emit(args, {"type": rd.label, "height": args.height, **probe})
    return 0


def cmd_quantize(args):
    rd = _root_datum(args)
    config = _load_config(args.config) if args.config else {}
    depth = args.depth or config.get("depth")
    pf = _parse_filtration(rd, config.get("filtration"), depth)
    ft = _parse_formal_type(rd, config.get("formal_type"), pf.depth)
    series = quant.inverse_shapovalov_series(pf, ft, args.height, args.order)
    poisson_ok = quant.first_order_check(series)
    bid = quant.star_bidiff(series)
    assoc_ok, left, right = quant.associativity_check(bid, args.order, return_sides=True)
    payload = {
        "type": rd.label,
        "depth": pf.depth,
        "order": args.order,
        "height": args.height,
        "poisson_check": poisson_ok,
        "associativity": assoc_ok,
        "terms": [
            {"hdeg": h, "weight": _left_weight(rd, lw), "left": _word_json(lw),
             "right": _word_json(rw), "coeff": frac_str(c)}
            for h, lw, rw, c in series.term_items()
        ],
    }
    if not assoc_ok:
        payload["first_difference"] = repr(quant.first_difference(left, right))
    _emit(args, payload)
    return 0


def _word_json(word):
    return [[k, i, d] for (k, i, d) in word]


def _left_weight(rd, word):
    """Weight of a u^- monomial word: the positive combination it lowers by."""
    tot = [Fraction(0)] * rd.dim_t
    for kind, b, _ in word:
        if kind == "E":
            tot = [x - y for x, y in zip(tot, rd.roots[b])]
    return [frac_str(x) for x in tot]


# -- entry point -------------------------------------------------------------------


def build_parser():
    p = argparse.ArgumentParser(prog="wildstrat", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, height_default=4, order=False):
        sp.add_argument("--type", required=True, help="Lie type label, e.g. gl3, sl2, B2")
        sp.add_argument("--depth", type=int, default=0)
        sp.add_argument("--height", "-K", dest="height", type=int, default=height_default)
        if order:
            sp.add_argument("--order", "-N", dest="order", type=int, default=2)
        sp.add_argument("--config", help="JSON config file (rationals as 'p/q' strings)")
        sp.add_argument("--out", help="output path prefix")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--workers", type=int, default=1)

    sp = sub.add_parser("levi", help="Levi poset and filtration counts")
    common(sp)
    sp.add_argument("--dot", action="store_true", help="print the Hasse diagram as DOT")
    sp.set_defaults(func=cmd_levi)

    sp = sub.add_parser("parabolic", help="parabolic subsets and filtrations")
    common(sp)
    sp.set_defaults(func=cmd_parabolic)

    sp = sub.add_parser("classify", help="Birkhoff normal form and centraliser")
    common(sp)
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("character", help="character spaces and admissibility")
    common(sp)
    sp.set_defaults(func=cmd_character)

    sp = sub.add_parser("shapovalov", help="Shapovalov blocks, ranks, factorisation")
    common(sp)
    sp.set_defaults(func=cmd_shapovalov)

    sp = sub.add_parser("simplicity", help="simplicity conjecture probe")
    common(sp)
    sp.set_defaults(func=cmd_simplicity)

    sp = sub.add_parser("quantize", help="inverse Shapovalov series and star product")
    common(sp, order=True)
    sp.set_defaults(func=cmd_quantize)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.workers < 1:
        print("error: --workers must be positive", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except (ValidationError, InadmissibleCharacter, SingularCharacterError,
            quant.UnbalancedFiltration, quant.TruncationError, RootDatumError,
            FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ClaimViolation, FactorisationError) as exc:
        print(f"claim violation: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
