"""Command-line front end.

Exit codes: 0 success / verdict true, 1 verdict false (witness printed),
2 usage or parse error, 3 budget refusal.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .errors import (
    BudgetExceededError,
    InconsistentRuleError,
    NonRegularGroupError,
    SymrefineError,
)
from .permgroup import (
    NO_REVERSAL,
    WITH_REVERSAL,
    GroupElement,
    PartitionSpec,
    generate,
    restricted_group,
)
from .preferences import DEFAULT_BUDGET, Profile, check_budget, profile_space_size
from .refinement import (
    build_refinement,
    choice_space,
    count_refinements,
    enumerate_refinements,
    export_refinement,
    import_refinement,
    refinement_at,
    verify_refinement,
)
from .reports import build_report
from .rules import (
    is_efficient,
    is_immune_reversal,
    is_immune_type3,
    is_resolute,
    rule_named,
)
from .symmetry import (
    impossibility_witness,
    is_consistent,
    is_regular,
    orbit_table,
    regular_arith,
)


def _env_budget() -> int:
    raw = os.environ.get("SYMREFINE_BUDGET")
    if raw is None:
        return DEFAULT_BUDGET
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"SYMREFINE_BUDGET must be an integer, got {raw!r}") from None


def _add_common(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--budget", type=int, default=None,
                    help="max profile visits (default: SYMREFINE_BUDGET or 10^8)")
    sp.add_argument("--workers", type=int, default=1,
                    help="worker pool size (outputs are worker-count independent)")
    sp.add_argument("--format", choices=("json", "text"), default="text")
    sp.add_argument("--out", help="write the JSON document to this path")


def _add_group(sp: argparse.ArgumentParser, need_sizes: bool = True) -> None:
    sp.add_argument("--h", type=int, required=need_sizes, help="number of individuals")
    sp.add_argument("--n", type=int, required=need_sizes, help="number of alternatives")
    sp.add_argument("--Y", help='individual partition, e.g. "1,2|3" (default: one block)')
    sp.add_argument("--Z", help='alternative partition (default: one block)')
    sp.add_argument("--R", choices=("id", "omega"), default="omega",
                    help="reversal factor: 'id' or 'omega' (default omega)")
    sp.add_argument("--generators",
                    help='explicit generators "(phi;psi;rho),..." e.g. "((12);(13);rev)"')


def _budget(args) -> int:
    if args.budget is not None:
        return args.budget
    return _env_budget()


def _group(args):
    if args.workers < 1:
        raise ValueError("--workers must be at least 1")
    h, n = args.h, args.n
    if args.generators:
        gens = [GroupElement.parse(tok, h, n)
                for tok in _split_generators(args.generators)]
        return generate(gens, h, n)
    Y = PartitionSpec.parse(args.Y, h) if args.Y else PartitionSpec.whole(h)
    Z = PartitionSpec.parse(args.Z, n) if args.Z else PartitionSpec.whole(n)
    flags = WITH_REVERSAL if args.R == "omega" else NO_REVERSAL
    return restricted_group(Y, Z, flags)


def _partitions(args):
    Y = PartitionSpec.parse(args.Y, args.h) if args.Y else PartitionSpec.whole(args.h)
    Z = PartitionSpec.parse(args.Z, args.n) if args.Z else PartitionSpec.whole(args.n)
    flags = WITH_REVERSAL if args.R == "omega" else NO_REVERSAL
    return Y, Z, flags


def _split_generators(text: str) -> list[str]:
    toks, depth, cur = [], 0, []
    for ch in text:
        if ch == "," and depth == 0:
            toks.append("".join(cur))
            cur = []
            continue
        depth += ch == "("
        depth -= ch == ")"
        cur.append(ch)
    if cur:
        toks.append("".join(cur))
    return [t for t in (t.strip() for t in toks) if t]


def _read_profile(args) -> Profile:
    if args.profile:
        with open(args.profile) as fh:
            return Profile.parse(fh.read())
    return Profile.parse(sys.stdin.read())


def _emit(args, doc: dict) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    elif args.format == "json":
        print(text)


def cmd_eval(args) -> int:
    p = _read_profile(args)
    if args.h and args.h != p.h or args.n and args.n != p.n:
        raise ValueError(f"profile is ({p.h},{p.n}), flags say ({args.h},{args.n})")
    rule = rule_named(args.rule, p.h, p.n)
    print(json.dumps({"winners": list(rule.winners(p))}))
    return 0


def _require_orbit_budget(args) -> int:
    # refuse before materializing a large group: the orbit sweep is the cost
    budget = _budget(args)
    check_budget(
        profile_space_size(args.h, args.n), budget, f"orbit table at ({args.h},{args.n})"
    )
    return budget


def cmd_orbits(args) -> int:
    budget = _require_orbit_budget(args)
    table = orbit_table(_group(args), budget)
    _emit(args, table.to_json())
    print(table.summary())
    return 0


def cmd_refine(args) -> int:
    budget = _budget(args)
    if args.action == "import":
        if not getattr(args, "infile", None):
            raise ValueError("refine import needs --in FILE")
        with open(args.infile) as fh:
            doc = json.load(fh)
        refined = import_refinement(doc, budget)
        print(json.dumps(export_refinement(refined), indent=2, sort_keys=True))
        return 0
    if args.h is None or args.n is None or not args.rule:
        raise ValueError("refine needs --h, --n and --rule")
    budget = _require_orbit_budget(args)
    group = _group(args)
    rule = rule_named(args.rule, args.h, args.n)
    table = orbit_table(group, budget)
    regular = is_regular(group, table)
    if not regular.ok:
        print(f"group is not regular (see orbit {regular.offender.orbit_id})",
              file=sys.stderr)
        return 1
    try:
        space = choice_space(rule, table, budget=budget)
    except InconsistentRuleError as exc:
        profile, element = exc.witness
        print(f"rule {rule.name} is not consistent with the group", file=sys.stderr)
        print(f"witness element: {element}", file=sys.stderr)
        print(profile.format(), file=sys.stderr, end="")
        return 1
    total = count_refinements(space)
    if args.action == "count":
        print(total)
        return 0
    if args.action == "enumerate":
        limit = args.limit if args.limit is not None else 20
        if args.index is not None:
            choices = [(args.index, refinement_at(space, args.index))]
        else:
            choices = zip(range(limit), enumerate_refinements(space))
        for i, choice in choices:
            print(json.dumps({"index": i, "selections": [
                list(s) if isinstance(s, tuple) else s for s in choice.selections
            ]}))
        return 0
    if args.action == "verify":
        if args.index is not None:
            targets = [refinement_at(space, args.index)]
        elif args.all:
            targets = list(enumerate_refinements(space))
        else:
            targets = [refinement_at(space, 0)]
        good = 0
        for choice in targets:
            refined = build_refinement(space, choice)
            verdict = verify_refinement(refined, rule, group, budget=budget)
            if verdict.ok:
                good += 1
            else:
                profile, element = verdict.witness
                print(f"FAILED ({verdict.reason}) at element {element}", file=sys.stderr)
                print(profile.format(), file=sys.stderr, end="")
        print(f"{good}/{len(targets)} verified")
        return 0 if good == len(targets) else 1
    if args.action == "export":
        index = args.index if args.index is not None else 0
        refined = build_refinement(space, refinement_at(space, index))
        doc = export_refinement(refined)
        text = json.dumps(doc, indent=2, sort_keys=True)
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(text + "\n")
        else:
            print(text)
        return 0
    raise ValueError(f"unknown refine action {args.action!r}")


def cmd_check(args) -> int:
    budget = _budget(args)
    what = args.predicate
    if what == "arith":
        Y, Z, flags = _partitions(args)
        ok = regular_arith(Y, Z, flags)
        print("true" if ok else "false")
        return 0 if ok else 1
    if what == "regular":
        try:
            budget = _require_orbit_budget(args)
            group = _group(args)
            verdict = is_regular(group, budget=budget)
        except BudgetExceededError:
            print("over budget; try `check arith` for product-form groups",
                  file=sys.stderr)
            return 3
        if verdict.ok:
            print("true")
            return 0
        print("false")
        rec = verdict.offender
        print(f"offending orbit {rec.orbit_id} with stabilizer "
              f"{[str(g) for g in rec.stabilizer]}")
        print(rec.rep.format(), end="")
        return 1
    if what == "consistent":
        group = _group(args)
        rule = rule_named(args.rule, args.h, args.n)
        verdict = is_consistent(rule, group, budget)
        if verdict.ok:
            print("true")
            return 0
        profile, element = verdict.witness
        print("false")
        print(f"witness element: {element}")
        print(profile.format(), end="")
        return 1
    rule = rule_named(args.rule, args.h, args.n)
    predicate = {
        "immune": is_immune_reversal,
        "immune3": is_immune_type3,
        "resolute": is_resolute,
        "efficient": is_efficient,
    }[what]
    verdict = predicate(rule, budget)
    if verdict.ok:
        print("true")
        return 0
    print("false")
    print(verdict.witness.format(), end="")
    return 1


def cmd_witness(args) -> int:
    Y, Z, flags = _partitions(args)
    if regular_arith(Y, Z, flags):
        raise ValueError("the arithmetic condition holds; nothing to witness")
    witness = impossibility_witness(Y, Z, flags)
    facts = witness.check()
    doc = {
        "kind": witness.kind,
        "prime": witness.prime,
        "phi": str(witness.phi),
        "psi": str(witness.psi) if witness.psi else None,
        "profile": [list(r) for r in witness.profile.rows()],
        "verified": facts,
    }
    _emit(args, doc)
    print(witness.profile.format(), end="")
    for fact in facts:
        print(f"certificate: {fact}: OK")
    return 0


def cmd_report(args) -> int:
    report = build_report(args.case, _budget(args))
    text = json.dumps(report, indent=2, sort_keys=True)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    if args.golden:
        with open(args.golden) as fh:
            golden = json.load(fh)
        if golden != report:
            print("report does not match the golden file", file=sys.stderr)
            return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="symrefine",
        description="Symmetry groups on preference profiles and symmetric tie-breaking.",
    )
    sub = top.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("eval", help="evaluate a rule on a profile file")
    sp.add_argument("--rule", required=True)
    sp.add_argument("--profile", help="profile file (default: stdin)")
    sp.add_argument("--h", type=int, help="expected individual count (optional check)")
    sp.add_argument("--n", type=int, help="expected alternative count (optional check)")
    _add_common(sp)
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("orbits", help="compute the orbit table of a group")
    _add_group(sp)
    _add_common(sp)
    sp.set_defaults(func=cmd_orbits)

    sp = sub.add_parser("refine", help="count / enumerate / verify / export refinements")
    sp.add_argument("action", choices=("count", "enumerate", "verify", "export", "import"))
    sp.add_argument("--rule")
    sp.add_argument("--limit", type=int, help="cap for enumerate (default 20)")
    sp.add_argument("--index", type=int, help="address one refinement by enumeration index")
    sp.add_argument("--all", action="store_true", help="verify every refinement")
    sp.add_argument("--in", dest="infile", help="input JSON for import")
    _add_group(sp, need_sizes=False)
    _add_common(sp)
    sp.set_defaults(func=cmd_refine)

    sp = sub.add_parser("check", help="evaluate an axiom or structural predicate")
    sp.add_argument("predicate",
                    choices=("regular", "consistent", "immune", "immune3",
                             "resolute", "efficient", "arith"))
    sp.add_argument("--rule")
    _add_group(sp)
    _add_common(sp)
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("witness", help="construct an impossibility certificate")
    _add_group(sp)
    _add_common(sp)
    sp.set_defaults(func=cmd_witness)

    sp = sub.add_parser("report", help="run a full case study")
    sp.add_argument("case", choices=("5x3", "3x3"))
    sp.add_argument("--golden", help="compare against this golden JSON file")
    _add_common(sp)
    sp.set_defaults(func=cmd_report)

    return top


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BudgetExceededError as exc:
        print(f"budget refusal: {exc}", file=sys.stderr)
        return 3
    except NonRegularGroupError as exc:
        print(f"group is not regular: {exc}", file=sys.stderr)
        return 1
    except (SymrefineError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
