"""``cohsim`` command line: run, protocol, sweep, verify.

Exit codes: 0 success, 1 bad input (parse diagnostics, bad parameters,
usage errors), 2 simulation error.  Diagnostics go to stderr; output data
(CSV, JSON, ``.qc`` text) goes to stdout or ``--output``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable

import numpy as np

from .circuit import Circuit, CoherenceProfile, simulate_stages
from .dsl import parse_with_diagnostics, serialize_circuit
from .errors import CohsimError, InvalidParams, TooLarge
from .protocols import (
    BlochState,
    RepeaterSchedule,
    build_repeater,
    build_superdense,
    build_swap,
    build_teleportation,
    ghz_circuit,
    prepare_ghz,
    prepare_w,
    repeater_run,
    resource_window_coherence,
    run_teleportation,
    teleportation_input,
    w_circuit,
)
from .protocols.network import MAX_QUBITS
from .protocols.teleport import werner_state
from .state import QuantumState, product, relative_entropy_of_coherence
from .verify import SUITES, run_suite

log = logging.getLogger("cohsim")

OK, BAD_INPUT, SIM_ERROR = 0, 1, 2
SEED_ENV = "COHSIM_SEED"
SIM_ERRORS = (CohsimError, np.linalg.LinAlgError, FloatingPointError, MemoryError)


class _Parser(argparse.ArgumentParser):
    """argparse with usage errors mapped to exit code 1 (2 means a failed simulation)."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(BAD_INPUT, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# number and input parsing

_PI = re.compile(r"([+-]?(?:[0-9]+\.?[0-9]*|\.[0-9]+)?)\s*\*?\s*pi(?:\s*/\s*([0-9]+\.?[0-9]*))?\Z")


def parse_number(text: str) -> float:
    """Float literal, or a multiple of pi such as ``pi/2``, ``3pi/4``, ``-0.5*pi``."""
    t = text.strip().lower()
    try:
        value = float(t)
    except ValueError:
        m = _PI.match(t)
        if not m:
            raise ValueError(f"not a number: {text!r}") from None
        coef = m.group(1)
        scale = {"": 1.0, "+": 1.0, "-": -1.0}.get(coef)
        value = (float(coef) if scale is None else scale) * math.pi
        if m.group(2):
            value /= float(m.group(2))
    if not math.isfinite(value):
        raise ValueError(f"not a finite number: {text!r}")
    return value


def _number_arg(text: str) -> float:
    try:
        return parse_number(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _seed_arg(text: str) -> int:
    try:
        seed = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {text!r}") from None
    if not 0 <= seed < 2**64:
        raise argparse.ArgumentTypeError(f"seed {seed} outside the unsigned 64-bit range")
    return seed


def split_top_level(text: str) -> list[str]:
    """Split on commas that are not inside parentheses."""
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise ValueError(f"unbalanced ')' in {text!r}")
        if ch == "," and depth == 0:
            parts.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
    if depth:
        raise ValueError(f"unbalanced '(' in {text!r}")
    parts.append("".join(cur).strip())
    return parts


_BLOCH = re.compile(r"bloch\((.*)\)\Z", re.DOTALL)


def qubit_initializer(item: str) -> QuantumState:
    key = item.strip().lower()
    if key in ("zero", "0"):
        return QuantumState.basis("0")
    if key in ("one", "1"):
        return QuantumState.basis("1")
    if key in ("plus", "+"):
        return BlochState(math.pi / 2).state()
    m = _BLOCH.match(key)
    if m:
        args = [parse_number(a) for a in m.group(1).split(",")]
        if len(args) not in (1, 2):
            raise ValueError(f"bloch takes theta[,gamma], got {item!r}")
        return BlochState(*args).state()
    raise ValueError(f"unknown qubit initializer {item!r} (zero, one, plus, bloch(theta,gamma))")


def build_input(spec: str, qubit_count: int) -> QuantumState:
    """Product input from a comma list; a single entry is used for every qubit."""
    items = [s for s in split_top_level(spec)]
    if any(not s for s in items):
        raise ValueError(f"empty entry in input spec {spec!r}")
    if len(items) == 1:
        items = items * qubit_count
    if len(items) != qubit_count:
        raise ValueError(f"input spec lists {len(items)} qubits, circuit has {qubit_count}")
    return product(*(qubit_initializer(s) for s in items))


# ---------------------------------------------------------------------------
# output


def fmt(x: float) -> str:
    s = f"{x:.12f}"
    if s.startswith("-") and float(s) == 0.0:
        s = s[1:]
    return s


def profile_rows(profile: CoherenceProfile) -> tuple[list[str], list[list[str]]]:
    n = len(profile.stages[0].per_qubit)
    header = ["stage_index", "label", "total_coherence", "is_post_measurement"]
    header += [f"q{k}" for k in range(n)]
    rows = [
        [str(s.index), s.label, fmt(s.total_coherence), "true" if s.is_post_measurement else "false"]
        + [fmt(c) for c in s.per_qubit]
        for s in profile.stages
    ]
    return header, rows


def to_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def profile_csv(profile: CoherenceProfile) -> str:
    return to_csv(*profile_rows(profile))


def profile_json(profile: CoherenceProfile) -> str:
    """JSON whose numbers print back to the CSV strings under ``fmt``."""

    def num(x):
        return float(fmt(x))

    peak = profile.peak
    doc = {
        "qubit_count": len(profile.stages[0].per_qubit),
        "stages": [
            {
                "stage_index": s.index,
                "label": s.label,
                "total_coherence": num(s.total_coherence),
                "is_post_measurement": bool(s.is_post_measurement),
                "per_qubit": [num(c) for c in s.per_qubit],
            }
            for s in profile.stages
        ],
        "peak": {"stage_index": peak.stage_index, "bits": num(peak.bits)},
    }
    return json.dumps(doc, indent=2) + "\n"


def _output_format(args) -> str:
    if args.format:
        return args.format
    if args.output and str(args.output).lower().endswith(".json"):
        return "json"
    return "csv"


def write_text(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def write_profile(profile: CoherenceProfile, args) -> None:
    render = profile_json if _output_format(args) == "json" else profile_csv
    write_text(render(profile), args.output)


def _err(msg: str) -> None:
    print(f"cohsim: {msg}", file=sys.stderr)


# ---------------------------------------------------------------------------
# run


def cmd_run(args) -> int:
    try:
        data = Path(args.file).read_bytes()
    except OSError as exc:
        _err(f"cannot read {args.file}: {exc.strerror or exc}")
        return BAD_INPUT
    circuit, diags = parse_with_diagnostics(data)
    for d in diags:
        print(f"{args.file}:{d}", file=sys.stderr)
    if circuit is None:
        return BAD_INPUT
    try:
        initial = build_input(args.input, circuit.qubit_count)
    except (ValueError, CohsimError) as exc:
        _err(f"bad --input: {exc}")
        return BAD_INPUT
    try:
        profile, _ = simulate_stages(circuit, initial, keep_states=False)
    except SIM_ERRORS as exc:
        _err(f"simulation error: {exc}")
        return SIM_ERROR
    write_profile(profile, args)
    return OK


# ---------------------------------------------------------------------------
# protocol


class ProtocolSetup:
    def __init__(self, circuit: Circuit, initial: QuantumState, header: str, coherence=None, estimate=None):
        self.circuit = circuit
        self.initial = initial
        self.header = header
        # value printed by --emit-coherence when it is not the run's peak
        self.coherence = coherence
        self.estimate = estimate


def _bloch_label(theta, gamma) -> str:
    return f"bloch({theta:.17g},{gamma:.17g})"


def _setup_protocol(args) -> ProtocolSetup:
    name = args.name
    if name == "teleport":
        n = 1 if args.n is None else args.n
        if n < 1:
            raise InvalidParams(f"--n must be at least 1, got {n}")
        b = BlochState(args.theta, args.gamma)
        message = product(*([b.state()] * n))
        circuit = build_teleportation(n, message, args.werner)
        initial = teleportation_input(message, args.werner)
        head = f"teleport n={n} theta={args.theta:.17g} gamma={args.gamma:.17g}"
        if args.werner == 1.0:
            per_gadget = [_bloch_label(args.theta, args.gamma), "zero", "zero"]
            head += "\ninput: " + ",".join(per_gadget * n)
        else:
            head += (
                f" werner={args.werner:.17g}\nthe Bell pairs on qubits (3g+1, 3g+2) are Werner"
                " states supplied with the input; plain --input cannot express them"
            )
        return ProtocolSetup(circuit, initial, head)
    if name == "superdense":
        bits = args.bits or "00"
        if not re.fullmatch(r"[01]{2}", bits):
            raise InvalidParams(f"--bits must be two binary digits, got {bits!r}")
        return ProtocolSetup(
            build_superdense((int(bits[0]), int(bits[1]))), QuantumState.zeros(2),
            f"superdense bits={bits}\ninput: zero",
        )
    if name == "swap":
        return ProtocolSetup(build_swap(), QuantumState.zeros(4), "entanglement swap A-B, C-D\ninput: zero")
    if name == "repeater":
        links = 3 if args.links is None else args.links
        sched = RepeaterSchedule(links, args.mode, args.s)
        circuit = build_repeater(sched)
        head = f"repeater links={links} mode={sched.mode} s={sched.s}\ninput: zero"
        estimate = resource_window_coherence(sched) + 2 * sched.s
        return ProtocolSetup(circuit, QuantumState.zeros(circuit.qubit_count), head, estimate=estimate)
    if name in ("w", "ghz"):
        n = (3 if name == "w" else 2) if args.n is None else args.n
        prepared = prepare_w(n) if name == "w" else prepare_ghz(n)
        circuit = w_circuit(n) if name == "w" else ghz_circuit(n)
        return ProtocolSetup(
            circuit, QuantumState.zeros(n), f"{name} n={n}\ninput: zero",
            coherence=relative_entropy_of_coherence(prepared),
        )
    raise InvalidParams(f"unknown protocol {name!r}")


def cmd_protocol(args) -> int:
    try:
        setup = _setup_protocol(args)
    except (ValueError, CohsimError) as exc:
        _err(str(exc))
        return BAD_INPUT
    circuit = setup.circuit
    if args.emit:
        write_text(serialize_circuit(circuit, setup.header), args.emit)
    if not (args.run or args.emit_coherence):
        if not args.emit:
            write_text(serialize_circuit(circuit, setup.header), None)
        return OK
    profile = None
    if args.run or setup.coherence is None:
        try:
            if circuit.qubit_count > MAX_QUBITS:
                raise TooLarge(f"{circuit.qubit_count} qubits exceeds the {MAX_QUBITS}-qubit simulation limit")
            profile, _ = simulate_stages(circuit, setup.initial, keep_states=False)
        except SIM_ERRORS as exc:
            _err(f"simulation error: {exc}")
            return SIM_ERROR
        peak = profile.peak
        label = profile.stages[peak.stage_index].label
        print(f"peak {fmt(peak.bits)} at stage {peak.stage_index} ({label})", file=sys.stderr)
        if setup.estimate is not None:
            print(f"estimate {fmt(setup.estimate)}", file=sys.stderr)
    if args.run:
        write_profile(profile, args)
    if args.emit_coherence:
        value = setup.coherence if setup.coherence is not None else profile.peak.bits
        print(fmt(value))
    return OK


# ---------------------------------------------------------------------------
# sweep


def _as_int(x: float, what: str) -> int:
    if x != int(x):
        raise InvalidParams(f"{what} must be an integer, got {x!r}")
    return int(x)


def _sweep_angle(args) -> tuple[list[str], Callable[[float], Callable[[], list[str]]]]:
    n = 1 if args.n is None else args.n
    if n < 1:
        raise InvalidParams(f"--n must be at least 1, got {n}")

    def prepare(phi):
        msg = product(*([BlochState.from_phi(phi).state()] * n))

        def row():
            peak = run_teleportation(n, msg)[0].peak.bits
            return [fmt(phi), fmt(peak), fmt(peak - 2 * n)]

        return row

    return ["phi", "peak", "message_term"], prepare


def _sweep_size(args):
    def prepare(x):
        n = _as_int(x, "size")
        w, ghz = prepare_w(n), prepare_ghz(n)

        def row():
            return [str(n), fmt(relative_entropy_of_coherence(w)), fmt(relative_entropy_of_coherence(ghz))]

        return row

    return ["n", "w", "ghz"], prepare


def _sweep_werner(args):
    n = 1 if args.n is None else args.n
    if n < 1:
        raise InvalidParams(f"--n must be at least 1, got {n}")
    msg = product(*([BlochState(args.theta, args.gamma).state()] * n))

    def prepare(lam):
        werner_state(lam)  # validates the range

        def row():
            return [fmt(lam), fmt(run_teleportation(n, msg, lam)[0].peak.bits)]

        return row

    return ["lambda", "peak"], prepare


def _sweep_schedule(args):
    def prepare(x):
        sched = RepeaterSchedule(_as_int(x, "link count"), args.mode, args.s)

        def row():
            res = repeater_run(sched)
            return [str(sched.links), sched.mode, str(sched.s), fmt(res.measured_peak), fmt(res.estimate)]

        return row

    return ["links", "mode", "s", "peak", "estimate"], prepare


SWEEPS = {"angle": _sweep_angle, "size": _sweep_size, "werner": _sweep_werner, "schedule": _sweep_schedule}


def sweep_values(args) -> list[float]:
    if args.values is not None:
        return [parse_number(v) for v in split_top_level(args.values)]
    start, stop, steps = args.range
    count = _as_int(parse_number(steps), "step count")
    if count < 1:
        raise InvalidParams(f"step count must be at least 1, got {count}")
    return [float(v) for v in np.linspace(parse_number(start), parse_number(stop), count)]


def cmd_sweep(args) -> int:
    try:
        header, prepare = SWEEPS[args.kind](args)
        tasks = [prepare(v) for v in sweep_values(args)]
    except (ValueError, CohsimError) as exc:
        _err(str(exc))
        return BAD_INPUT
    try:
        if args.jobs > 1:
            with ThreadPoolExecutor(max_workers=args.jobs) as pool:
                rows = list(pool.map(lambda t: t(), tasks))
        else:
            rows = [t() for t in tasks]
    except SIM_ERRORS as exc:
        _err(f"simulation error: {exc}")
        return SIM_ERROR
    write_text(to_csv(header, rows), args.output)
    return OK


# ---------------------------------------------------------------------------
# verify


def cmd_verify(args) -> int:
    seed = args.seed
    if seed is None:
        env = os.environ.get(SEED_ENV)
        try:
            seed = _seed_arg(env) if env else 0
        except argparse.ArgumentTypeError as exc:
            _err(f"{SEED_ENV}: {exc}")
            return BAD_INPUT
    print(f"# seed={seed} suite={args.suite}")
    try:
        results = run_suite(args.suite, seed)
    except SIM_ERRORS as exc:
        _err(f"simulation error: {exc}")
        return SIM_ERROR
    for r in results:
        print(r.line())
    passed = sum(r.passed for r in results)
    print(f"# {passed}/{len(results)} checks passed")
    return OK if passed == len(results) else BAD_INPUT


# ---------------------------------------------------------------------------


def _add_output(p, formats=True):
    p.add_argument("-o", "--output", help="write here instead of stdout")
    if formats:
        p.add_argument("--format", choices=("csv", "json"), help="default: json for *.json output, else csv")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cohsim", description="Stage-resolved coherence simulator.")
    parser.add_argument("--log-level", default="WARNING", choices=("DEBUG", "INFO", "WARNING", "ERROR"))
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("run", help="simulate a .qc circuit file")
    p.add_argument("file")
    p.add_argument("--input", default="zero", help="per-qubit list: zero|one|plus|bloch(theta,gamma)")
    _add_output(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("protocol", help="generate (and optionally run) a protocol circuit")
    p.add_argument("name", choices=("teleport", "superdense", "swap", "repeater", "w", "ghz"))
    p.add_argument("--n", type=int, help="gadgets (teleport) or qubits (w, ghz)")
    p.add_argument("--theta", type=_number_arg, default=0.0)
    p.add_argument("--gamma", type=_number_arg, default=0.0)
    p.add_argument("--werner", type=_number_arg, default=1.0)
    p.add_argument("--bits", help="superdense message, e.g. 10")
    p.add_argument("--links", type=int)
    p.add_argument("--mode", default="sequential", choices=("sequential", "parallel"))
    p.add_argument("--s", type=int, default=1, help="swaps per round in parallel mode")
    p.add_argument("--emit", metavar="PATH", help="write the .qc circuit ('-' for stdout)")
    p.add_argument("--run", action="store_true", help="simulate and write the profile")
    p.add_argument("--emit-coherence", action="store_true", help="print the prepared-state or peak coherence")
    _add_output(p)
    p.set_defaults(func=cmd_protocol)

    p = sub.add_parser("sweep", help="one CSV row per parameter value")
    p.add_argument("kind", choices=tuple(SWEEPS))
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--range", nargs=3, metavar=("START", "STOP", "STEPS"))
    g.add_argument("--values", help="comma list; numbers may use pi, e.g. pi/4")
    p.add_argument("--n", type=int)
    p.add_argument("--theta", type=_number_arg, default=0.0)
    p.add_argument("--gamma", type=_number_arg, default=0.0)
    p.add_argument("--mode", default="sequential", choices=("sequential", "parallel"))
    p.add_argument("--s", type=int, default=1)
    p.add_argument("--jobs", type=int, default=1)
    _add_output(p, formats=False)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="run a seeded invariant suite")
    p.add_argument("suite", choices=("all",) + tuple(SUITES))
    p.add_argument("--seed", type=_seed_arg, help=f"default: ${SEED_ENV} or 0")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=args.log_level, format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except OSError as exc:
        _err(f"{exc.filename or 'i/o'}: {exc.strerror or exc}")
        return BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
