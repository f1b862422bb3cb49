"""Command line entry points.

Subcommands: ca-run, ca-search, ca-enumerate, ann-train, codegen, verify,
demodulate. Results go to stdout; seeds, notes, and errors go to stderr.

Exit codes: 0 on success, 1 when a stated goal was not met, 2 on bad usage
or bad input, 3 when an external toolchain failed.

A config file (--config) holds one "key value" pair per line, with keys
named after long flags of the chosen subcommand; flags given on the command
line win over config values.
"""

from __future__ import annotations

import argparse
import secrets
import sys

import numpy as np

from . import ann, autoprog, ca, core, search
from .errors import CompileFailed, MetastableError, RunTimeout

SCORE = "%.9f"


def _fail(message: str) -> None:
    print("error: %s" % message, file=sys.stderr)


def _pick_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    seed = secrets.randbits(32)
    print("seed %d" % seed, file=sys.stderr)
    return seed


def _read_model(path: str) -> autoprog.Document:
    with open(path) as handle:
        return autoprog.parse(handle.read())


def _cmd_ca_run(args) -> int:
    system = ca.make_automaton(args.rule, args.init)
    rows = core.run(system, args.steps)
    for row in rows:
        print(core.render_state(row))
    if args.target is None:
        return 0
    target = core.parse_state_string(args.target)
    score = core.match(rows[-1], target)
    print("match %s" % (SCORE % score))
    return 0 if score == 1.0 else 1


def _cmd_ca_search(args) -> int:
    problem = search.Problem.from_strings(args.init, args.target, args.steps)
    seed = _pick_seed(args)

    def show(attempt: search.Attempt) -> None:
        print("attempt %d rule %d match %s" % (attempt.index, attempt.rule, SCORE % attempt.score))

    report = search.random_search(problem, budget=args.budget, seed=seed, log=show)
    if report.solved:
        print("solution %d attempts %d" % (report.solution, report.attempts))
        return 0
    print("exhausted best %d match %s" % (report.best_rule, SCORE % report.best_score))
    return 1


def _cmd_ca_enumerate(args) -> int:
    problem = search.Problem.from_strings(args.init, args.target, args.steps)
    solutions = search.exhaustive_search(problem)
    for rule in solutions:
        print(rule)
    print("count %d" % len(solutions))
    return 0


def _cmd_ann_train(args) -> int:
    seed = _pick_seed(args)
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    system = ann.make_network(args.layers, args.width, args.init, rng=rng)
    config = ann.TrainingConfig(
        rate=args.rate, epochs=args.epochs, budget=args.budget, strategy=args.strategy
    )
    _, report = ann.train(system, args.target, config)
    for epoch, score in enumerate(report.history, 1):
        print("epoch %d match %s" % (epoch, SCORE % score))
    print("best %s epoch %d" % (SCORE % report.best_match, report.best_epoch))
    if report.exact:
        print("exact epoch %d" % report.epochs_run)
    return 0 if report.best_match >= args.goal else 1


def _cmd_codegen(args) -> int:
    doc = _read_model(args.model)
    source = autoprog.generate(doc, args.backend)
    if args.output is None:
        sys.stdout.write(source)
    else:
        with open(args.output, "w") as handle:
            handle.write(source)
    return 0


def _cmd_verify(args) -> int:
    doc = _read_model(args.model)
    toolchain = None
    if args.toolchain is not None:
        toolchain = autoprog.ToolchainConfig(command=args.toolchain, timeout=args.timeout)
    elif args.timeout != 60.0:
        base = autoprog.default_toolchain(args.backend)
        toolchain = autoprog.ToolchainConfig(command=base.command, timeout=args.timeout)
    report = autoprog.verify(doc, args.backend, toolchain)
    if report.equal:
        print("equal")
        return 0
    print("mismatch line %d" % report.mismatch_line)
    return 1


def _cmd_demodulate(args) -> int:
    doc = _read_model(args.model)
    structural, operational = core.demodulate(doc.system)
    print("structural count %d" % structural.count)
    print("structural states %s" % "".join(str(s) for s in structural.states))
    print("structural init %s" % core.render_state(structural.init))
    print("structural current %s" % core.render_state(structural.current))
    print("operational kind %s" % doc.system.kind)
    schedule = operational.schedule
    if isinstance(schedule, core.Synchronous):
        print("operational schedule synchronous")
    else:
        print("operational schedule layered %d %d" % (schedule.layers, schedule.width))
    print("operational fan-in %d" % operational.fan_in)
    if doc.system.kind == "ca":
        print("operational update table %s" % " ".join(str(b) for b in operational.update.bits))
    else:
        print("operational update threshold")
    print("operational milieu nonzeros %d" % int(np.count_nonzero(operational.milieu)))
    return 0


def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    parser = argparse.ArgumentParser(
        prog="metastable",
        description="Bind, run, search, train, and translate entity populations.",
    )
    subs = parser.add_subparsers(dest="command", required=True)
    index: dict[str, argparse.ArgumentParser] = {}

    def sub(name: str, func, help_text: str) -> argparse.ArgumentParser:
        p = subs.add_parser(name, help=help_text)
        p.set_defaults(func=func)
        p.add_argument("--config", help="file of 'key value' defaults for this subcommand")
        index[name] = p
        return p

    p = sub("ca-run", _cmd_ca_run, "run one rule and print its trajectory")
    p.add_argument("--rule", type=int, required=True, help="rule number, 0 to 255")
    p.add_argument("--init", required=True, help="initial state, a string of 0s and 1s")
    p.add_argument("--steps", type=int, required=True, help="number of steps")
    p.add_argument("--target", help="compare the final state against this and set the exit code")

    p = sub("ca-search", _cmd_ca_search, "draw random rules until one hits the target")
    p.add_argument("--init", required=True, help="initial state")
    p.add_argument("--target", required=True, help="state the rule should reach")
    p.add_argument("--steps", type=int, required=True, help="steps between init and target")
    p.add_argument("--budget", type=int, default=1000, help="attempt budget (default 1000)")
    p.add_argument("--seed", type=int, help="search seed (default: fresh, echoed to stderr)")

    p = sub("ca-enumerate", _cmd_ca_enumerate, "try all 256 rules and list the exact hits")
    p.add_argument("--init", required=True, help="initial state")
    p.add_argument("--target", required=True, help="state a rule should reach")
    p.add_argument("--steps", type=int, required=True, help="steps between init and target")

    p = sub("ann-train", _cmd_ann_train, "fit a layered perceptron system to a target pattern")
    p.add_argument("--layers", type=int, required=True, help="layer count, input layer included")
    p.add_argument("--width", type=int, required=True, help="units per layer")
    p.add_argument("--init", required=True, help="input pattern, width characters of 0s and 1s")
    p.add_argument("--target", required=True, help="wanted output pattern, width characters")
    p.add_argument("--rate", type=float, default=0.1, help="learning rate (default 0.1)")
    p.add_argument("--epochs", type=int, default=200, help="epoch cap (default 200)")
    p.add_argument("--budget", type=int, default=100000, help="correction cap (default 100000)")
    p.add_argument("--strategy", default="output", help="which layer to correct (default output)")
    p.add_argument("--goal", type=float, default=1.0, help="match that counts as success (default 1.0)")
    p.add_argument("--seed", type=int, help="weight seed (default: fresh, echoed to stderr)")

    p = sub("codegen", _cmd_codegen, "translate a model program into C or Python source")
    p.add_argument("--model", required=True, help="model-program file")
    p.add_argument("--backend", required=True, help="c or python")
    p.add_argument("--output", help="write source here instead of stdout")

    p = sub("verify", _cmd_verify, "check a generated program against the interpreter")
    p.add_argument("--model", required=True, help="model-program file")
    p.add_argument("--backend", required=True, help="c or python")
    p.add_argument("--toolchain", help="build-and-run command template; must mention {src}")
    p.add_argument("--timeout", type=float, default=60.0, help="toolchain timeout in seconds")

    p = sub("demodulate", _cmd_demodulate, "split a model program into its two halves")
    p.add_argument("--model", required=True, help="model-program file")

    return parser, index


def _load_config(path: str) -> list[tuple[str, str]]:
    pairs = []
    with open(path) as handle:
        for raw in handle:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split(None, 1)
            if len(parts) != 2:
                raise MetastableError("config line needs a key and a value: %r" % raw.strip())
            pairs.append((parts[0], parts[1].strip()))
    return pairs


def _apply_config(argv: list[str], index: dict[str, argparse.ArgumentParser]) -> bool:
    """Install config-file values as defaults on the chosen subparser."""
    if not argv or argv[0] not in index:
        return True
    command = argv[0]
    path = None
    rest = argv[1:]
    for k, token in enumerate(rest):
        if token == "--config" and k + 1 < len(rest):
            path = rest[k + 1]
        elif token.startswith("--config="):
            path = token.split("=", 1)[1]
    if path is None:
        return True
    subparser = index[command]
    options = {}
    for action in subparser._actions:
        for option in action.option_strings:
            if option.startswith("--"):
                options[option[2:]] = action
    try:
        pairs = _load_config(path)
    except (OSError, MetastableError) as err:
        _fail("cannot read config: %s" % err)
        return False
    defaults = {}
    for key, value in pairs:
        if key == "config" or key not in options:
            _fail("unknown config key '%s' for %s" % (key, command))
            return False
        action = options[key]
        try:
            defaults[action.dest] = action.type(value) if action.type else value
        except ValueError:
            _fail("bad value for config key '%s': %r" % (key, value))
            return False
        # A config value satisfies a required flag.
        action.required = False
    subparser.set_defaults(**defaults)
    return True


def main(argv: list[str] | None = None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    parser, index = build_parser()
    if not _apply_config(list(argv), index):
        return 2
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return int(err.code or 0)
    try:
        return args.func(args)
    except OSError as err:
        _fail(str(err))
        return 2
    except (CompileFailed, RunTimeout) as err:
        _fail(str(err))
        if isinstance(err, CompileFailed) and err.diagnostics:
            print(err.diagnostics, file=sys.stderr)
        return 3
    except MetastableError as err:
        _fail(str(err))
        return 2


def entry() -> None:
    sys.exit(main())
