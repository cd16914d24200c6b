"""Command-line front end: run protocols, verify tables, estimate efficiencies.

Subcommands: run | verify-tables | efficiency | sweep.  All output is
deterministic for a fixed seed; floats are serialised with 17 significant
digits so repeated invocations are byte-identical.

Exit codes: 0 success, 2 invalid arguments, 3 degenerate strategy,
4 verification failure.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import Sequence

import numpy as np

from .efficiency import analytic_rate, cpro_monte_carlo, haar_sample
from .protocols import (
    DegenerateChannelError,
    ProtocolRun,
    choose_m,
    run_nparty_bell,
    run_nparty_ghz,
    run_protocol1,
    run_protocol2,
    verify_table1,
    verify_table2,
)
from .states import InputQubit

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DEGENERATE = 3
EXIT_VERIFY_FAILED = 4

# fixed grid exercised by verify-tables
_VERIFY_WEIGHTS = (0.3, 0.7, 1.0)
_VERIFY_INPUTS = (
    InputQubit(0.6, 0.8j),
    InputQubit(1.0 / np.sqrt(3.0), np.sqrt(2.0 / 3.0) * np.exp(-1j * np.pi / 7.0)),
)


class CliError(ValueError):
    """Invalid command-line configuration."""


# ── deterministic serialisation ──────────────────────────────────────────

def _format_float(value: float) -> str:
    return format(float(value), ".17g")


def render_json(obj, indent: int = 0) -> str:
    """Minimal JSON writer with 17-significant-digit floats."""
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _format_float(obj)
    if isinstance(obj, str):
        escaped = obj.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{escaped}"'
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        parts = [f'{inner}"{key}": {render_json(val, indent + 1)}' for key, val in obj.items()]
        return "{\n" + ",\n".join(parts) + f"\n{pad}}}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        parts = [f"{inner}{render_json(val, indent + 1)}" for val in obj]
        return "[\n" + ",\n".join(parts) + f"\n{pad}]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _json_number(value: complex) -> object:
    # real weights serialise as plain floats, complex ones as re/im pairs
    value = complex(value)
    if value.imag == 0.0:
        return value.real
    return {"re": value.real, "im": value.imag}


def _emit(text: str, out_path: str | None) -> None:
    if out_path is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        try:
            with open(out_path, "w", encoding="utf-8") as fh:
                fh.write(text)
                if not text.endswith("\n"):
                    fh.write("\n")
        except OSError as exc:
            raise CliError(f"cannot write {out_path}: {exc}") from exc


# ── argument parsing helpers ─────────────────────────────────────────────

def _parse_complex(text: str, flag: str) -> complex:
    try:
        return complex(text)
    except ValueError:
        raise CliError(f"{flag} expects a number, got {text!r}") from None


def _parse_input(text: str, default_seed: int) -> InputQubit:
    if text == "haar" or text.startswith("haar:"):
        seed = default_seed if text == "haar" else int(text.split(":", 1)[1])
        return haar_sample(np.random.default_rng(seed))
    parts = text.split(",")
    if len(parts) != 4:
        raise CliError("--input expects 'haar[:seed]' or 'a_re,a_im,b_re,b_im'")
    try:
        a_re, a_im, b_re, b_im = (float(p) for p in parts)
    except ValueError:
        raise CliError(f"--input has a non-numeric component: {text!r}") from None
    try:
        return InputQubit(complex(a_re, a_im), complex(b_re, b_im))
    except ValueError as exc:
        raise CliError(str(exc)) from None


def _channel_params(args) -> dict:
    """Extract and validate the channel weights demanded by the protocol."""
    protocol = args.protocol
    if protocol == "p1":
        if args.n is None:
            raise CliError("p1 needs --n")
        return {"n": _parse_complex(args.n, "--n")}
    if protocol == "p2":
        if args.n1 is None or args.n2 is None:
            raise CliError("p2 needs --n1 and --n2")
        return {"n1": _parse_complex(args.n1, "--n1"), "n2": _parse_complex(args.n2, "--n2")}
    if protocol == "nparty-ghz":
        if args.n is None or args.parties is None:
            raise CliError("nparty-ghz needs --n and --parties")
        return {"n": _parse_complex(args.n, "--n"), "parties": int(args.parties)}
    if args.n_list is None:
        raise CliError("nparty-bell needs --n-list")
    ns = tuple(_parse_complex(p, "--n-list") for p in args.n_list.split(","))
    return {"ns": ns}


def _resolve_m(m_text: str, channel: dict) -> complex:
    if m_text.startswith("strategy:"):
        name = m_text.split(":", 1)[1]
        if "n" in channel and "parties" not in channel:
            return choose_m(name, n=channel["n"])
        if "parties" in channel:
            return choose_m(name, n=channel["n"])
        if "ns" in channel:
            return choose_m(name, ns=channel["ns"])
        return choose_m(name, n1=channel["n1"], n2=channel["n2"])
    return _parse_complex(m_text, "--m")


def _parse_receiver(args, protocol: str):
    text = args.receiver
    if protocol in ("p1", "p2"):
        if text is None:
            return "charlie"
        if text not in ("bob", "charlie"):
            raise CliError("--receiver must be bob or charlie for two-receiver protocols")
        return text
    if text is None:
        return None
    try:
        return int(text)
    except ValueError:
        raise CliError("--receiver must be a party index for many-party protocols") from None


def _execute(protocol: str, source: InputQubit, channel: dict, m: complex, receiver) -> ProtocolRun:
    if protocol == "p1":
        return run_protocol1(source, channel["n"], m, receiver)
    if protocol == "p2":
        return run_protocol2(source, channel["n1"], channel["n2"], m, receiver)
    if protocol == "nparty-ghz":
        return run_nparty_ghz(source, channel["parties"], channel["n"], m, receiver)
    return run_nparty_bell(source, channel["ns"], m, receiver)


# ── subcommands ──────────────────────────────────────────────────────────

def _cmd_run(args) -> int:
    channel = _channel_params(args)
    m = _resolve_m(args.m, channel)
    source = _parse_input(args.input, args.seed)
    receiver = _parse_receiver(args, args.protocol)
    run = _execute(args.protocol, source, channel, m, receiver)

    params: dict = {}
    for key, value in run.params.items():
        if key == "parties":
            params[key] = value
        elif key == "ns":
            params[key] = [_json_number(v) for v in value]
        else:
            params[key] = _json_number(value)
    branches = [
        {
            "alice": b.alice_label,
            "helpers": list(b.helper_labels),
            "probability": b.probability,
            "fidelity": b.fidelity,
            "correction": b.correction.name,
        }
        for b in run.branches
    ]
    if args.format == "json":
        doc = {
            "protocol": run.protocol,
            "params": params,
            "receiver": run.receiver,
            "input": {
                "alpha_re": source.alpha.real,
                "alpha_im": source.alpha.imag,
                "beta_re": source.beta.real,
                "beta_im": source.beta.imag,
            },
            "branches": branches,
            "success_probability": run.success_probability,
            "classical_bits": run.branches[0].classical_bits,
        }
        _emit(render_json(doc), args.out)
    else:
        lines = ["alice,helpers,probability,fidelity,correction"]
        for b in branches:
            lines.append(
                f"{b['alice']},{'+'.join(b['helpers'])},"
                f"{_format_float(b['probability'])},{_format_float(b['fidelity'])},"
                f"{b['correction']}"
            )
        _emit("\n".join(lines), args.out)
    return EXIT_OK


def _cmd_verify_tables(args) -> int:
    corrupt = None
    if args.corrupt:
        parts = args.corrupt.split(",")
        if len(parts) != 2:
            raise CliError("--corrupt expects 'AliceLabel,HelperLabel'")
        corrupt = (parts[0], parts[1])

    # worst fidelity gap per outcome row, aggregated over the fixed grid
    worst: dict[tuple[str, str, str], float] = {}
    for m in _VERIFY_WEIGHTS:
        for source in _VERIFY_INPUTS:
            for n in _VERIFY_WEIGHTS:
                for check in verify_table1(n, m, source, args.tolerance, corrupt):
                    key = ("table1", check.alice_label, check.helper_label)
                    if check.fidelity_to_expected is not None:
                        worst[key] = min(worst.get(key, 1.0), check.fidelity_to_expected)
            for n1 in _VERIFY_WEIGHTS:
                for n2 in _VERIFY_WEIGHTS:
                    for check in verify_table2(n1, n2, m, source, args.tolerance, corrupt):
                        key = ("table2", check.alice_label, check.helper_label)
                        if check.fidelity_to_expected is not None:
                            worst[key] = min(worst.get(key, 1.0), check.fidelity_to_expected)

    failures = 0
    for (table, alice, helper), fid in worst.items():
        ok = fid >= 1.0 - args.tolerance
        status = "PASS" if ok else "FAIL"
        print(f"{status} {table} {alice}/{helper} min_fidelity={_format_float(fid)}")
        failures += 0 if ok else 1
    total = len(worst)
    print(f"{total - failures}/{total} rows within tolerance {_format_float(args.tolerance)}")
    return EXIT_OK if failures == 0 else EXIT_VERIFY_FAILED


def _cmd_efficiency(args) -> int:
    channel = _channel_params(args)
    m = _resolve_m(args.m, channel)
    params = dict(channel)
    params["m"] = m
    if args.analytic_only:
        analytic = analytic_rate(args.protocol, params)
        if analytic is None:
            raise CliError("no closed form for this protocol/parameter combination")
        _emit(render_json({"analytic": analytic}), args.out)
        return EXIT_OK
    threads = args.threads
    if threads is None:
        threads = int(os.environ.get("QSTS_THREADS", "1"))
    if threads == 0:
        threads = os.cpu_count() or 1
    report = cpro_monte_carlo(args.protocol, params, args.samples, args.seed, threads)
    doc: dict = {}
    if report.analytic is not None:
        doc["analytic"] = report.analytic
    doc.update(
        estimate=report.estimate,
        samples=report.samples,
        std_error=report.std_error,
        seed=report.seed,
    )
    _emit(render_json(doc), args.out)
    return EXIT_OK


def _cmd_sweep(args) -> int:
    if args.steps < 1:
        raise CliError("--steps must be >= 1")
    if args.start > args.stop:
        raise CliError("--from must not exceed --to")
    swept = args.param
    allowed = {"p1": ("n", "m"), "p2": ("n1", "n2", "m")}[args.protocol]
    if swept not in allowed:
        raise CliError(f"--param must be one of {allowed} for {args.protocol}")
    if args.steps == 1:
        values = [args.start]
    else:
        step = (args.stop - args.start) / (args.steps - 1)
        values = [args.start + i * step for i in range(args.steps)]

    lines = ["param,value,analytic,estimate,std_error"]
    for i, value in enumerate(values):
        channel: dict = {}
        for name in allowed:
            if name == "m":
                continue
            if name == swept:
                channel[name] = value
            else:
                fixed = getattr(args, name)
                if fixed is None:
                    raise CliError(f"sweep over {swept!r} needs a fixed --{name}")
                channel[name] = _parse_complex(fixed, f"--{name}")
        if swept == "m":
            m = complex(value)
        elif args.m == swept:
            m = complex(value)  # basis weight tracks the swept channel weight
        else:
            m = _resolve_m(args.m, channel)
        params = dict(channel)
        params["m"] = m
        report = cpro_monte_carlo(args.protocol, params, args.samples, args.seed + i)
        analytic = "" if report.analytic is None else _format_float(report.analytic)
        lines.append(
            f"{swept},{_format_float(value)},{analytic},"
            f"{_format_float(report.estimate)},{_format_float(report.std_error)}"
        )
    _emit("\n".join(lines), args.out)
    return EXIT_OK


# ── parser ───────────────────────────────────────────────────────────────

def _add_channel_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--n", help="channel weight (p1, nparty-ghz)")
    parser.add_argument("--n1", help="first channel weight (p2)")
    parser.add_argument("--n2", help="second channel weight (p2)")
    parser.add_argument("--n-list", help="comma-separated channel weights (nparty-bell)")
    parser.add_argument("--parties", type=int, help="party count (nparty-ghz)")
    parser.add_argument("--m", required=True,
                        help="basis weight: a number or strategy:<name>")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qsts",
        description="Simulate and verify quantum state sharing over "
                    "partially entangled channels.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one protocol, reporting every branch")
    p_run.add_argument("--protocol", required=True,
                       choices=("p1", "p2", "nparty-ghz", "nparty-bell"))
    _add_channel_flags(p_run)
    p_run.add_argument("--input", default="haar",
                       help="'a_re,a_im,b_re,b_im' or 'haar[:seed]' (default haar)")
    p_run.add_argument("--receiver", help="bob|charlie or a party index")
    p_run.add_argument("--format", choices=("json", "csv"), default="json")
    p_run.add_argument("--out", help="output path (default stdout)")
    p_run.add_argument("--seed", type=int, default=0)
    p_run.set_defaults(func=_cmd_run)

    p_verify = sub.add_parser("verify-tables",
                              help="check every outcome row over a fixed grid")
    p_verify.add_argument("--tolerance", type=float, default=1e-10)
    p_verify.add_argument("--corrupt", help="negative control: 'AliceLabel,HelperLabel'")
    p_verify.set_defaults(func=_cmd_verify_tables)

    p_eff = sub.add_parser("efficiency", help="estimate the average transmission rate")
    p_eff.add_argument("--protocol", required=True,
                       choices=("p1", "p2", "nparty-ghz", "nparty-bell"))
    _add_channel_flags(p_eff)
    p_eff.add_argument("--samples", type=int, default=10000)
    p_eff.add_argument("--seed", type=int, default=0)
    p_eff.add_argument("--threads", type=int,
                       help="sampler threads (default QSTS_THREADS or 1; 0 = auto)")
    p_eff.add_argument("--analytic-only", action="store_true",
                       help="emit the closed form only, skip sampling")
    p_eff.add_argument("--out", help="output path (default stdout)")
    p_eff.set_defaults(func=_cmd_efficiency)

    p_sweep = sub.add_parser("sweep", help="sweep one parameter, writing CSV")
    p_sweep.add_argument("--protocol", required=True, choices=("p1", "p2"))
    p_sweep.add_argument("--param", required=True, help="swept parameter name")
    p_sweep.add_argument("--from", dest="start", type=float, required=True)
    p_sweep.add_argument("--to", dest="stop", type=float, required=True)
    p_sweep.add_argument("--steps", type=int, required=True)
    p_sweep.add_argument("--n", help="fixed channel weight (p1)")
    p_sweep.add_argument("--n1", help="fixed first channel weight (p2)")
    p_sweep.add_argument("--n2", help="fixed second channel weight (p2)")
    p_sweep.add_argument("--m", default="1",
                         help="basis weight: number, strategy:<name>, or the "
                              "swept parameter's name to track it")
    p_sweep.add_argument("--samples", type=int, default=10000)
    p_sweep.add_argument("--seed", type=int, default=0)
    p_sweep.add_argument("--out", help="output path (default stdout)")
    p_sweep.set_defaults(func=_cmd_sweep)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DegenerateChannelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (CliError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
