"""Command line front end.

Commands: ``odometer analyze``, ``subgroup report``, ``factor build``,
``extend build`` and ``verify all``.  Each writes a JSON report and exits with
0 (no exact failure), 1 (some exact check failed) or 2 (bad configuration).
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction
from pathlib import Path

from .config import ConfigError, RunConfig, bundled_config_text, parse_config, parse_levels
from .constructions import (auto_candidates, block_gset, build_extension, build_factor,
                            fiber_lemma_check, find_free_complement, round_trip,
                            sufficient_condition_shadow, verify_universal_property)
from .groups import IndexCapExceeded, ball, subgroup_from_json
from .odometer import (Cylinder, GroupChain, LevelSystem, ShiftSystem, act_on_prefix,
                       build_level_system, cylinder_measure, prefix_of, refinements,
                       shift_periodic_points)
from .perm import EnumerationCapExceeded
from .report import EVIDENCE, INCONCLUSIVE, Check, Report, exact
from .stabilizers import (Fixed, Witness, almost_normality_report, family_conjugate_orbit,
                          holonomy_check, level_cylinders, lqa_separation_level,
                          odometer_block_map, replay_witness, shift_xh_report,
                          stabilization_depth, stabilizer_ball_profile, subgroup_in_gset,
                          translation_property, urs_irs_report, xh_partition)

COMMANDS = {
    ("odometer", "analyze"), ("subgroup", "report"), ("factor", "build"),
    ("extend", "build"), ("verify", "all"),
}


class Context:
    """Lazily built objects shared by the checks of one run."""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.family = cfg.family
        self.chain = GroupChain.from_levels(cfg.family, cfg.chain) if cfg.system == "odometer" else None
        self._ls: LevelSystem | None = None
        self._conjugates = None

    @property
    def ls(self) -> LevelSystem:
        if self._ls is None:
            self._ls = build_level_system(self.chain, self.cfg.depth, self.cfg.cap)
        return self._ls

    @property
    def H_elements(self) -> list:
        if self.cfg.H is None:
            raise ConfigError(["H is required for this command"])
        elems = self.cfg.H.elements()
        if elems is None:
            raise ConfigError(["H must be a finite subgroup with enumerable elements"])
        return elems

    @property
    def conjugates(self):
        if self._conjugates is None:
            self._conjugates = family_conjugate_orbit(self.family, self.H_elements, self.cfg.cap)
        return self._conjugates

    def fmt(self, g) -> str:
        return self.family.format(g)


# -- odometer analyze -------------------------------------------------------------------

def odometer_checks(ctx: Context, report: Report) -> None:
    cfg, ls, fam = ctx.cfg, ctx.ls, ctx.family
    sizes = ls.sizes()
    report.results["level_sizes"] = sizes
    report.add(exact("level sizes multiply by relative indices", "coset tower index product",
                     ls.check_index_multiplicativity(), {"sizes": sizes}))
    report.add(exact("coset tables satisfy the relations", "left action on cosets is a group action",
                     ls.check_relations(), {"levels": ls.depth + 1}))
    report.add(exact("projections commute with the action", "coset inclusions are equivariant",
                     ls.check_equivariance(), {"levels": ls.depth + 1}))
    trans = [ls.level_gset(i).is_transitive() for i in range(ls.depth + 1)]
    report.add(exact("every level is transitive", "odometer minimality", all(trans),
                     {"transitive": trans}))

    measures = [cylinder_measure(ls, Cylinder(i, 0)) for i in range(ls.depth + 1)]
    sums = [measures[i] * ls.size(i) for i in range(ls.depth + 1)]
    consistent = all(
        cylinder_measure(ls, Cylinder(i, c)) == sum((cylinder_measure(ls, Cylinder(i + 1, d))
                                                     for d in refinements(ls, Cylinder(i, c), i + 1)), Fraction(0))
        for i in range(ls.depth) for c in range(ls.size(i)))
    report.results["cylinder_measures"] = measures
    report.add(exact("cylinder measures", "cylinder measure is one over the index",
                     all(s == 1 for s in sums) and consistent,
                     {"measures": measures, "level_sums": sums, "refinement_consistent": consistent}))

    rng = random.Random(cfg.seed)
    b3 = ball(fam, min(cfg.radius, 3))
    pairs = [(rng.choice(b3), rng.choice(b3)) for _ in range(200)]
    d = min(4, ls.depth)
    x = prefix_of(ls, b3[-1], d)
    bad = [(g, h) for g, h in pairs
           if act_on_prefix(ls, fam.mul(g, h), x) != act_on_prefix(ls, g, act_on_prefix(ls, h, x))]
    report.add(exact("prefix action is a homomorphism", "action on the inverse limit",
                     not bad, {"sampled_pairs": len(pairs), "depth": d, "seed": cfg.seed},
                     [[ctx.fmt(g), ctx.fmt(h)] for g, h in bad[:3]] or None))

    profile = stabilizer_ball_profile(ls, cfg.radius)
    balls = ball(fam, cfg.radius)
    oracle_ok = all(profile[n] == [g for g in balls if ls.chain.specs[n].contains(g)] for n in profile)
    monotone = all(set(profile[n + 1]) <= set(profile[n]) for n in range(ls.depth))
    shown = {str(n): [ctx.fmt(g) for g in v] for n, v in profile.items()}
    report.results["basepoint_stabilizer_ball"] = shown
    report.add(exact("basepoint stabilizer ball equals ball inside G_n", "basepoint stabilizer is the chain intersection",
                     oracle_ok, {"radius": cfg.radius}))
    report.add(exact("basepoint stabilizer ball shrinks with depth", "stabilizer balls are nested",
                     monotone, {"radius": cfg.radius}))
    stable = stabilization_depth(profile)
    report.add(Check("basepoint stabilizer ball stabilizes", "finite shadow of the chain intersection",
                     EVIDENCE, {"radius": cfg.radius, "stable_from_depth": stable,
                                "stable_ball": shown[str(ls.depth)]}))


# -- subgroup report --------------------------------------------------------------------

def subgroup_checks(ctx: Context, report: Report):
    cfg, ls, fam = ctx.cfg, ctx.ls, ctx.family
    H = ctx.H_elements
    levels = cfg.levels or list(range(1, ls.depth + 1))
    rep = almost_normality_report(fam, cfg.H, ctx.chain, ls, levels, cap=cfg.cap)
    report.results["almost_normality"] = rep.to_json(fam)
    if rep.verdict == "yes":
        report.add(exact("H has finitely many conjugates", "almost normal subgroup", True,
                         {"conjugates": rep.conjugate_count, "normalizer_index": rep.normalizer_index,
                          "certificate_level": rep.certificate_level,
                          "coset_reps": [ctx.fmt(r) for r in rep.coset_reps]}))
    elif rep.verdict == "evidence_no":
        report.add(Check("H has finitely many conjugates", "almost normal subgroup", EVIDENCE,
                         {"status": "not almost normal", "level_counts": rep.level_counts,
                          "reason": rep.reason}))
    else:
        report.add(Check("H has finitely many conjugates", "almost normal subgroup", INCONCLUSIVE,
                         {"reason": rep.reason, "level_counts": rep.level_counts}))

    # brute-force oracle for the per-level counts: conjugate by every element of the image group
    oracle = {}
    for i in levels:
        A = ls.image_group(i)
        q = ls.quotients[i]
        K = frozenset(q.image(h) for h in H)
        oracle[i] = len({frozenset(a * k * a.inverse() for k in K) for a in A.elements})
    report.add(exact("per-level conjugate counts", "conjugates in finite quotients",
                     oracle == rep.level_counts, {"counts": rep.level_counts, "oracle": oracle}))

    traces = []
    ok = True
    for h in H:
        if h == fam.identity:
            continue
        for n in levels:
            v = holonomy_check(ls, h, Cylinder(n, 0), min(n + 2, ls.depth))
            if isinstance(v, Witness):
                ok &= replay_witness(ls, v)
                traces.append({"element": fam.word(h), "cylinder": [n, 0],
                               "refined": [v.refined.level, v.refined.index],
                               "moved_to": [v.moved_to.level, v.moved_to.index]})
            elif isinstance(v, Fixed):
                traces.append({"element": fam.word(h), "cylinder": [n, 0], "fixed_through": v.checked_level})
            else:
                traces.append({"element": fam.word(h), "cylinder": [n, 0], "inconclusive": v.reason})
    report.add(exact("holonomy witnesses replay", "points of X_H lack trivial holonomy in the odometer", ok,
                     {"checked": len(traces)}, traces))

    if rep.verdict == "yes" and rep.certificate_level is not None:
        fc = ctx.conjugates
        for n in [i for i in levels if i >= rep.certificate_level]:
            bm = odometer_block_map(ls, n, fc)
            lqa = lqa_separation_level(bm.labels, level_cylinders(ls, n))
            report.add(exact(f"block map at level {n}", "factor map to G/N_G(H)",
                             bm.equivariant and len(set(bm.labels)) == bm.block_count,
                             {"blocks": bm.block_count, "equivariant": bm.equivariant,
                              "separation_level": lqa}))
    return rep


# -- factor build -------------------------------------------------------------------------

def factor_at(ctx: Context, level: int):
    ls, fam = ctx.ls, ctx.family
    X = ls.level_gset(level)
    fc = ctx.conjugates
    bm = odometer_block_map(ls, level, fc)
    conjs = [subgroup_in_gset(X, fam, C) for C in fc.conjugates]
    return X, bm, conjs, build_factor(X, bm.labels, conjs)


def factor_checks(ctx: Context, report: Report, level: int, with_output: bool = True):
    X, bm, conjs, f = factor_at(ctx, level)
    tag = f"level {level}"
    h = f.h_order
    report.add(exact(f"factor block map factors ({tag})", "the block map factors through the quotient", f.phi_factors,
                     {"factor_size": f.Y.size, "source_size": X.size}))
    report.add(exact(f"factor stabilizers ({tag})", "G_y = gHg^-1 G_x",
                     f.stabilizer_product_ok, {"points": f.Y.size},
                     None if f.stabilizer_product_ok else [a.point for a in f.audits if not a.product_matches][:5]))
    report.add(exact(f"factor fiber sizes ({tag})", "fiber size |H| / |gHg^-1 cap G_x|",
                     f.fiber_formula_ok, {"fiber_sizes": sorted(set(f.fiber_sizes)), "H_order": h}))
    part = xh_partition(f.Y, conjs[0])
    report.add(exact(f"blocks of the factor ({tag})", "closed covering by blocks; E empty on transitive systems",
                     part.block_count == len(conjs) and not part.exceptional and part.phi is not None
                     and part.phi.equivariant and translation_property(f.Y, part),
                     part.to_json()))
    u = urs_irs_report(f.Y, conjs[0])
    weights = sorted(set(u.irs.weights.values()))
    report.add(exact(f"stabilizer measure of the factor ({tag})", "atomic IRS supported on Conj(H)",
                     len(u.urs_atoms) == len(conjs) and weights == [Fraction(1, len(conjs))] and u.irs_invariant,
                     {"atoms": len(u.urs_atoms), "weights": weights, "invariant": u.irs_invariant}))
    report.add(exact(f"summary flags on the factor ({tag})", "finite summary equivalences",
                     all(u.flags.values()), {"flags": u.flags}))
    B = block_gset(X, conjs)
    up = verify_universal_property(f, B, bm.labels, list(range(len(conjs))))
    report.add(exact(f"universal property, target G/N_G(H) ({tag})", "maps collapsing the H-orbits factor through Y",
                     up.psi == f.phi_tilde and up.psi_equivariant, up.to_json()))
    up2 = verify_universal_property(f, X, list(range(X.size)), bm.labels)
    report.add(exact(f"universal property, target X fails ({tag})", "target stabilizers must contain the block conjugates",
                     up2.witness is not None and not up2.condition_ii,
                     {"witness": up2.witness, "condition_ii": up2.condition_ii}))
    if with_output:
        report.results[f"factor_level_{level}"] = f.to_json()
    return X, conjs, f


# -- extend build -------------------------------------------------------------------------

def gamma_candidates(ctx: Context):
    g = ctx.cfg.gamma
    if g == "auto":
        return auto_candidates(ctx.family, ctx.chain)
    return [(c.get("name", f"candidate {i}"), subgroup_from_json(ctx.family, c["subgroup"]))
            for i, c in enumerate(g)]


def extension_checks(ctx: Context, report: Report, level: int):
    fam = ctx.family
    search = find_free_complement(fam, ctx.H_elements, gamma_candidates(ctx), ctx.cfg.cap)
    report.results["gamma_search"] = search.to_json()
    if search.found is None:
        report.add(Check("free normal complement", "normal finite-index subgroup missing H",
                         INCONCLUSIVE, {"searched": [c.name for c in search.searched]}))
        return
    gamma = search.found
    report.add(exact("free normal complement", "normal finite-index subgroup missing H", gamma.valid,
                     gamma.to_json()))
    X, conjs, f = factor_checks(ctx, report, level, with_output=False)
    ext = build_extension(f.Y, 0, fam, ctx.H_elements, gamma.spec, ctx.cfg.cap)
    tag = f"level {level}"
    report.add(exact(f"extension is free over Y_H ({tag})", "extension: preimage of Y_H is free",
                     ext.free_over_yh, {"size": ext.X.size, "yh_size": len(ext.yh)}))
    report.add(exact(f"extension fibers bounded ({tag})", "extension: fibers at most [G:Gamma]",
                     ext.max_fiber <= gamma.index, {"max_fiber": ext.max_fiber, "gamma_index": gamma.index}))
    report.add(exact(f"lifted measure invariant ({tag})", "product with the uniform measure",
                     ext.measure_invariant and ext.product_measure_invariant, {}))
    rt = round_trip(ext, f, fam, ctx.conjugates)
    report.add(exact(f"round trip reproduces Y ({tag})", "re-factoring the free extension",
                     rt.isomorphism is not None and rt.preimage_equals_free,
                     {"isomorphic": rt.isomorphism is not None, "preimage_is_free_set": rt.preimage_equals_free}))
    report.add(exact(f"stabilizers over the identity block miss H ({tag})", "finite-index certificate inside G_y",
                     sufficient_condition_shadow(ext, f), {}))
    fl = fiber_lemma_check(ext.pi, 0)
    report.add(exact(f"fiber stabilizer bound on the extension ({tag})", "stabilizer index bounded by m!",
                     fl.bound_holds and (not fl.free_point or (fl.injective and fl.regular)),
                     {"m": fl.m, "indices": sorted(set(fl.indices)), "regular": fl.regular}))
    report.results[f"extension_level_{level}"] = ext.to_json()


# -- shift ----------------------------------------------------------------------------------

def shift_checks(ctx: Context, report: Report) -> None:
    opts = ctx.cfg.shift
    counts = {}
    oracle = {}
    ok_fixed = True
    for n in range(1, opts.max_period + 1):
        fixed, exact_pts = shift_periodic_points(n)
        counts[n] = [len(fixed), len(exact_pts)]
        ok_fixed &= len(fixed) == 2**n
        oracle[n] = 2**n - sum(oracle[d] for d in range(1, n) if n % d == 0)
    report.results["periodic_counts"] = {str(k): v for k, v in counts.items()}
    report.add(exact("fixed points of sigma^n", "Fix(sigma^n) has 2^n points", ok_fixed,
                     {"counts": {str(k): v[0] for k, v in counts.items()}}))
    report.add(exact("points with stabilizer exactly nZ", "divisor exclusion",
                     all(counts[n][1] == oracle[n] for n in counts),
                     {"counts": {str(k): v[1] for k, v in counts.items()},
                      "oracle": {str(k): v for k, v in oracle.items()}}))
    word = tuple(opts.witness_word)
    v = holonomy_check(ShiftSystem, opts.h_period, word, opts.horizon)
    ok = isinstance(v, Witness) and replay_witness(ShiftSystem, v)
    report.add(exact("holonomy of the shift on a periodic point", "periodic points lack trivial holonomy", ok,
                     {"shift": opts.h_period, "point": list(word), "horizon": opts.horizon},
                     v.trace if isinstance(v, Witness) else None))
    xr = shift_xh_report(opts.h_period, opts.windows)
    constant = len(set(xr.cover_counts)) == 1
    growing = all(a < b for a, b in zip(xr.cylinder_counts, xr.cylinder_counts[1:]))
    report.results["xh"] = xr.to_json()
    report.add(exact("X_H is covered by a bounded number of cylinders", "X_H finite, hence not dense",
                     constant and growing and not xr.dense, xr.to_json()))


# -- dispatch -------------------------------------------------------------------------------

def run(cfg: RunConfig, command: str) -> Report:
    report = Report(command, cfg.echo())
    try:
        if cfg.system == "shift":
            if command in ("verify all", "odometer analyze"):
                shift_checks(Context(cfg), report)
            else:
                report.add(Check(command, "command applies to odometer systems", INCONCLUSIVE,
                                 {"system": "shift"}))
            return report
        ctx = Context(cfg)
        if command == "odometer analyze":
            odometer_checks(ctx, report)
        elif command == "subgroup report":
            subgroup_checks(ctx, report)
        elif command == "factor build":
            if _require_almost_normal(ctx, report):
                factor_checks(ctx, report, cfg.level)
        elif command == "extend build":
            if _require_almost_normal(ctx, report):
                extension_checks(ctx, report, cfg.level)
        elif command == "verify all":
            odometer_checks(ctx, report)
            if cfg.H is not None:
                rep = subgroup_checks(ctx, report)
                if rep.verdict == "yes" and rep.certificate_level is not None:
                    for n in cfg.levels or [cfg.level]:
                        if n >= rep.certificate_level:
                            factor_checks(ctx, report, n, with_output=False)
                    extension_checks(ctx, report, cfg.level)
        else:
            raise ValueError(f"unknown command {command!r}")
    except (EnumerationCapExceeded, IndexCapExceeded) as exc:
        report.add(Check("enumeration cap", "finite computation horizon", INCONCLUSIVE,
                         {"cap": exc.cap, "message": str(exc)}))
    return report


def _require_almost_normal(ctx: Context, report: Report) -> bool:
    rep = almost_normality_report(ctx.family, ctx.cfg.H, ctx.chain, cap=ctx.cfg.cap)
    if rep.verdict == "yes" and rep.certificate_level is not None and ctx.cfg.level >= rep.certificate_level:
        return True
    report.add(Check("H admits a block map at this level", "chain level inside N_G(H)", INCONCLUSIVE,
                     {"verdict": rep.verdict, "certificate_level": rep.certificate_level,
                      "level": ctx.cfg.level, "reason": rep.reason}))
    return False


def load_config_text(path: str) -> str:
    if path.startswith("bundled:"):
        return bundled_config_text(path.split(":", 1)[1])
    return Path(path).read_text()


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="almostnormal",
                                description="Almost normal stabilizers on finite shadows of group actions.")
    p.add_argument("group", choices=sorted({g for g, _ in COMMANDS}))
    p.add_argument("action", choices=sorted({a for _, a in COMMANDS}))
    p.add_argument("--config", required=True, help="config JSON path, or bundled:NAME")
    p.add_argument("--depth", type=int, help="odometer truncation depth")
    p.add_argument("--radius", type=int, help="word-ball radius for stabilizer balls")
    p.add_argument("--cap", type=int, help="coset and enumeration cap")
    p.add_argument("--seed", type=int, help="seed for sampled checks")
    p.add_argument("--levels", help="e.g. 1..4")
    p.add_argument("--level", type=int, help="level used by factor and extend")
    p.add_argument("--H", dest="H", help="JSON file (or inline JSON) with the subgroup spec of H")
    p.add_argument("--gamma", help='"auto" or a JSON file with a list of candidates')
    p.add_argument("--output", help="write the report here instead of stdout")
    return p


def _json_arg(value: str | None):
    if value is None:
        return None
    if value == "auto":
        return "auto"
    text = value if value.lstrip().startswith(("{", "[")) else Path(value).read_text()
    return json.loads(text)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    command = f"{args.group} {args.action}"
    if (args.group, args.action) not in COMMANDS:
        print(f"unknown command: {command}", file=sys.stderr)
        return 2
    try:
        text = load_config_text(args.config)
        overrides = {"depth": args.depth, "radius": args.radius, "cap": args.cap, "seed": args.seed,
                     "level": args.level, "H": _json_arg(args.H), "gamma": _json_arg(args.gamma),
                     "levels": parse_levels(args.levels) if args.levels else None}
        cfg = parse_config(text, overrides)
    except ConfigError as exc:
        print(json.dumps({"schema": 1, "config_errors": exc.violations}, indent=2, ensure_ascii=False),
              file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(json.dumps({"schema": 1, "config_errors": [str(exc)]}, indent=2), file=sys.stderr)
        return 2
    report = run(cfg, command)
    out = report.dumps()
    if args.output:
        Path(args.output).write_text(out)
    else:
        sys.stdout.write(out)
    return report.exit_status


if __name__ == "__main__":
    sys.exit(main())
