"""Command-line front end.

Exit codes: 0 success, 1 completed with flags / failed check, 2 parse error,
3 incompatible inputs, 4 zero constant term in a divisor.
"""

from __future__ import annotations

import argparse
import json
import math
import random
import sys
from fractions import Fraction
from pathlib import Path

from .combinatorics import (
    Multiset,
    bell_number,
    enumerate_partitions,
    enumerate_subsets,
    multisets_of_size,
)
from .deconvolution import deconvolve, deconvolve_labeled, superpose
from .errors import DivisionByZeroConstantTerm, ModeMismatch, SpaceMismatch
from .fileformat import ProcessFormatError, dumps_process, format_scalar, load_process, save_process
from .process import JanossyProcess, StateSpace, janossy_consistency_check, pgfl_eval, random_process
from .series import MODES, RATIONAL, PowerSeries, quotient_nth, series_div

EXIT_OK = 0
EXIT_FLAGGED = 1
EXIT_PARSE = 2
EXIT_MISMATCH = 3
EXIT_ZERO_CONSTANT = 4


class CliError(Exception):
    def __init__(self, message: str, code: int) -> None:
        super().__init__(message)
        self.code = code


def _load(path: str, args) -> JanossyProcess:
    try:
        P = load_process(path)
    except OSError as exc:
        raise CliError(f"{path}: {exc.strerror}", EXIT_PARSE) from None
    except ProcessFormatError as exc:
        raise CliError(f"{path}: {exc}", EXIT_PARSE) from None
    if args.mode:
        P = P.with_mode(args.mode)
    if args.max_order is not None:
        P = P.truncated(args.max_order)
    return P


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_superpose(args) -> int:
    Q = _load(args.q_file, args)
    R = _load(args.r_file, args)
    try:
        P = superpose(Q, R)
    except (SpaceMismatch, ModeMismatch) as exc:
        raise CliError(str(exc), EXIT_MISMATCH) from None
    _emit(dumps_process(P), args.out)
    return EXIT_OK


def cmd_deconvolve(args) -> int:
    P = _load(args.p_file, args)
    Q = _load(args.q_file, args)
    try:
        R, report = deconvolve(P, Q)
    except (SpaceMismatch, ModeMismatch) as exc:
        raise CliError(str(exc), EXIT_MISMATCH) from None
    except DivisionByZeroConstantTerm as exc:
        raise CliError(str(exc), EXIT_ZERO_CONSTANT) from None
    _emit(dumps_process(R), args.out)
    doc = report.to_dict(R.mode)
    doc["r0"] = format_scalar(R.p0, R.mode)
    report_text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    report_path = args.report or (f"{args.out}.report.json" if args.out else None)
    if report_path:
        Path(report_path).write_text(report_text)
    else:
        sys.stderr.write(report_text)
    if not report.valid_process:
        print(
            f"warning: quotient is not a probability process "
            f"(negative_count={report.negative_count}, mass={format_scalar(report.mass, R.mode)})",
            file=sys.stderr,
        )
        return EXIT_FLAGGED
    return EXIT_OK


def _parse_psi(spec: str, P: JanossyProcess) -> dict:
    values = {}
    for item in filter(None, (s.strip() for s in spec.split(","))):
        label, sep, raw = item.partition("=")
        if not sep:
            raise CliError(f"--psi entry {item!r} is not label=value", EXIT_PARSE)
        try:
            values[label.strip()] = Fraction(raw.strip()) if P.mode == RATIONAL else float(Fraction(raw.strip()))
        except (ValueError, ZeroDivisionError):
            raise CliError(f"--psi value {raw!r} is not a number", EXIT_PARSE) from None
    unknown = set(values) - set(P.space.labels)
    missing = set(P.space.labels) - set(values)
    if unknown or missing:
        raise CliError(
            f"--psi must give every label exactly once (unknown {sorted(unknown)}, missing {sorted(missing)})",
            EXIT_PARSE,
        )
    return values


def cmd_eval(args) -> int:
    P = _load(args.p_file, args)
    value = pgfl_eval(P, _parse_psi(args.psi, P))
    _emit(f"{format_scalar(value, P.mode)}\n", args.out)
    return EXIT_OK


def _parse_coeffs(raw: str, mode: str) -> list:
    try:
        return [Fraction(s.strip()) if mode == RATIONAL else float(Fraction(s.strip())) for s in raw.split(",")]
    except (ValueError, ZeroDivisionError):
        raise CliError(f"bad coefficient list {raw!r}", EXIT_PARSE) from None


def cmd_scalar_quotient(args) -> int:
    mode = args.mode or RATIONAL
    n = args.n
    if n < 0:
        raise CliError("n must be non-negative", EXIT_PARSE)
    f = PowerSeries.from_coeffs(_parse_coeffs(args.f, mode), n, mode)
    g = PowerSeries.from_coeffs(_parse_coeffs(args.g, mode), n, mode)
    try:
        value = quotient_nth(f.derivatives(), g.derivatives(), n)
        oracle = series_div(f, g).coeffs[n] * math.factorial(n)
    except DivisionByZeroConstantTerm as exc:
        raise CliError(str(exc), EXIT_ZERO_CONSTANT) from None
    print(f"quotient_rule\t{format_scalar(value, mode)}")
    print(f"series_div\t{format_scalar(oracle, mode)}")
    if mode == RATIONAL:
        return EXIT_OK if value == oracle else EXIT_FLAGGED
    return EXIT_OK if math.isclose(value, oracle, rel_tol=1e-9, abs_tol=1e-12) else EXIT_FLAGGED


# --------------------------------------------------------------------- check


def _label_space(m: int) -> StateSpace:
    return StateSpace(tuple("abcdefghijklmnopqrstuvwxyz"[i] for i in range(m)))


class _Checker:
    def __init__(self, seed: int, points: int, order: int, trials: int, dump_dir: Path, corrupt: bool):
        self.seed = seed
        self.points = points
        self.order = order
        self.trials = trials
        self.dump_dir = dump_dir
        self.corrupt = corrupt
        self.failures = 0

    def report(self, name: str, passed: int, total: int) -> None:
        status = "ok" if passed == total else "FAIL"
        print(f"{name:<28} {passed}/{total} {status}")
        self.failures += total - passed

    def dump(self, name: str, processes: dict[str, JanossyProcess]) -> None:
        self.dump_dir.mkdir(parents=True, exist_ok=True)
        for role, P in processes.items():
            save_process(P, self.dump_dir / f"{name}.{role}.json")
        print(f"{name}: failing instance written to {self.dump_dir}/{name}.*.json", file=sys.stderr)

    def counts(self) -> None:
        ok = total = 0
        for n in range(13):
            total += 1
            ok += len(enumerate_subsets(n, max_order=12)) == 2**n
        for n in range(min(self.order + 2, 9)):
            total += 1
            ok += len(enumerate_partitions(range(n))) == bell_number(n)
            total += 1
            ok += sum(math.comb(n, k) * bell_number(k) for k in range(n + 1)) == bell_number(n + 1)
        self.report("subset/partition counts", ok, total)

    def round_trips(self) -> None:
        rng = random.Random(self.seed)
        space = _label_space(self.points)
        half = max(1, self.order // 2)
        ok = 0
        dumped = False
        for t in range(self.trials):
            # sizes grow with t so the first failure is a small instance
            cap = 1 + (half - 1) * t // max(1, self.trials - 1)
            Q = random_process(space, rng.randint(1, cap), rng.randrange(1 << 30))
            R = random_process(space, rng.randint(1, cap), rng.randrange(1 << 30))
            P = superpose(Q, R)
            out, report = deconvolve(P, Q)
            if self.corrupt and out.densities:
                first = next(iter(out.densities))
                bumped = dict(out.densities)
                bumped[first] += Fraction(1, 1000)
                out = JanossyProcess(out.space, out.max_order, out.p0, bumped, out.mode)
            good = out.p0 == R.p0 and out.densities == R.densities and report.valid_process
            if good and P.max_order <= 4:
                good = deconvolve_labeled(P, Q)[0] == out
            if good:
                ok += 1
            elif not dumped:
                self.dump(f"roundtrip-{t}", {"Q": Q, "R": R, "P": P, "recovered": out})
                dumped = True
        self.report("deconvolution round trips", ok, self.trials)

    def scalar_oracle(self) -> None:
        rng = random.Random(self.seed + 1)
        n_max = self.order
        ok = 0
        for _ in range(self.trials):
            f = PowerSeries.from_coeffs([Fraction(rng.randint(-3, 3)) for _ in range(n_max + 1)])
            g0 = rng.choice([-3, -2, -1, 1, 2, 3])
            g = PowerSeries.from_coeffs([g0] + [rng.randint(-3, 3) for _ in range(n_max)])
            h = series_div(f, g)
            fd, gd = f.derivatives(), g.derivatives()
            ok += all(
                quotient_nth(fd, gd, n) == h.coeffs[n] * math.factorial(n) for n in range(n_max + 1)
            )
        self.report("quotient rule vs division", ok, self.trials)

    def single_point(self) -> None:
        space = _label_space(1)
        n_max = max(self.order, 1)

        def pgf(X: JanossyProcess) -> PowerSeries:
            # one-point p.g.fl. as an ordinary generating function, c_k = p_k / k!
            return PowerSeries.from_coeffs(
                [X.at(Multiset(((0, k),)) if k else Multiset()) / math.factorial(k) for k in range(n_max + 1)]
            )

        ok = 0
        for t in range(self.trials):
            P = random_process(space, n_max, self.seed * 7919 + 2 * t)
            Q = random_process(space, n_max, self.seed * 7919 + 2 * t + 1)
            R, _ = deconvolve(P, Q)
            ok += pgf(R) == series_div(pgf(P), pgf(Q))
        self.report("single-point PGF division", ok, self.trials)

    def janossy_recovery(self) -> None:
        space = _label_space(min(self.points, 3))
        k_max = min(3, self.order)
        ok = total = 0
        for t in range(min(self.trials, 10)):
            P = random_process(space, k_max, self.seed + 31 * t)
            for k in range(k_max + 1):
                for ms in multisets_of_size(len(space), k):
                    total += 1
                    ok += janossy_consistency_check(P, ms.points()) == P.at(ms)
        self.report("Janossy recovery at psi=0", ok, total)

    def term_counts(self) -> None:
        space = _label_space(1)
        order = max(self.order, 5)
        P = random_process(space, order, self.seed)
        _, report = deconvolve(P, P)
        for n in range(order + 1):
            per_target = report.terms_by_order[n]
            print(f"terms at order {n}: {per_target} per multiset (Bell({n + 1}) = {bell_number(n + 1)})")
        self.report("term counts", sum(report.terms_by_order[n] == bell_number(n + 1) for n in range(order + 1)), order + 1)

    def run(self) -> int:
        print(f"check: seed={self.seed} points={self.points} max_order={self.order} trials={self.trials}")
        self.counts()
        self.round_trips()
        self.scalar_oracle()
        self.single_point()
        self.janossy_recovery()
        self.term_counts()
        print("all checks passed" if not self.failures else f"{self.failures} failure(s)")
        return EXIT_OK if not self.failures else EXIT_FLAGGED


def cmd_check(args) -> int:
    points = args.points
    order = 6 if args.max_order is None else args.max_order
    if not 1 <= points <= 4 or not 1 <= order <= 6:
        raise CliError("check supports 1 <= points <= 4 and 1 <= max-order <= 6", EXIT_PARSE)
    checker = _Checker(args.seed, points, order, args.trials, Path(args.dump_dir), args.corrupt)
    return checker.run()


def cmd_selftest(args) -> int:
    checker = _Checker(args.seed, 2, 4, 5, Path(args.dump_dir), args.corrupt)
    return checker.run()


# ---------------------------------------------------------------------- main


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--mode", choices=MODES, help="convert inputs to this numeric mode")
    common.add_argument("--max-order", type=int, help="truncate inputs to this order")
    common.add_argument("--out", help="output path (default: stdout)")

    parser = argparse.ArgumentParser(
        prog="ppdeconv", description="Superpose and deconvolve point processes given by Janossy densities."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("superpose", parents=[common], help="superpose two independent processes")
    p.add_argument("q_file")
    p.add_argument("r_file")
    p.set_defaults(func=cmd_superpose)

    p = sub.add_parser("deconvolve", parents=[common], help="recover R from P = Q (+) R and Q")
    p.add_argument("p_file")
    p.add_argument("q_file")
    p.add_argument("--report", help="report JSON path (default: OUT.report.json, or stderr)")
    p.set_defaults(func=cmd_deconvolve)

    p = sub.add_parser("eval", parents=[common], help="evaluate the p.g.fl. at a test function")
    p.add_argument("p_file")
    p.add_argument("--psi", required=True, help='per-label values, e.g. "a=0.5,b=1"')
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("scalar-quotient", help="n-th derivative of f/g at 0 by the quotient rule")
    p.add_argument("-f", required=True, help="Taylor coefficients of f, comma-separated")
    p.add_argument("-g", required=True, help="Taylor coefficients of g, comma-separated")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--mode", choices=MODES)
    p.set_defaults(func=cmd_scalar_quotient)

    for name, func, help_text in (
        ("check", cmd_check, "run the invariant suites on random instances"),
        ("selftest", cmd_selftest, "quick fixed-size check"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--seed", type=int, default=1)
        p.add_argument("--dump-dir", default="check-failures")
        p.add_argument("--corrupt", action="store_true", help="perturb a recovered density to exercise the failure path")
        if name == "check":
            p.add_argument("--points", type=int, default=4)
            p.add_argument("--max-order", type=int)
            p.add_argument("--trials", type=int, default=20)
        p.set_defaults(func=func)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
