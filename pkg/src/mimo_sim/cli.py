"""Command line front end: mimo-sim.

Runs one sweep per invocation and writes CSV (default) or JSON to --out or
stdout.  A key = value config file can predefine any flag; explicit flags win.
Exit codes: 0 success, 2 invalid configuration, 3 numerical failure (the
failing trial's replay key is printed).
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from .errors import ConfigurationError, MimoSimError
from .simulate import (
    ALGORITHMS,
    SimConfig,
    TrialFailureError,
    render_csv,
    render_json,
    run_sweep,
)


def parse_ebn0_grid(text):
    """Parse 'start:step:stop' (or a single value) into a float grid."""
    parts = str(text).split(":")
    try:
        if len(parts) == 1:
            return (float(parts[0]),)
        if len(parts) != 3:
            raise ValueError
        start, step, stop = (float(p) for p in parts)
    except ValueError:
        raise ConfigurationError(
            f"cannot parse Eb/N0 grid {text!r}; expected start:step:stop or a single value"
        ) from None
    if step <= 0:
        raise ConfigurationError(f"Eb/N0 step must be positive, got {step}")
    if stop < start:
        raise ConfigurationError(f"Eb/N0 stop {stop} is below start {start}")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return tuple(start + i * step for i in range(count))


def _parse_bool(text):
    value = str(text).strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ConfigurationError(f"cannot parse boolean {text!r}")


# Converters for values read from a config file, keyed by flag name.
_FILE_CONVERTERS = {
    "users": int,
    "rx-antennas": int,
    "tx-antennas": int,
    "loading": float,
    "algorithm": str,
    "ebn0": str,
    "trials": int,
    "seed": int,
    "epsilon": float,
    "max-iter": int,
    "delta": float,
    "workers": int,
    "out": str,
    "format": str,
    "plot": _parse_bool,
}


def read_config_file(path):
    """Parse a key = value file mirroring the CLI flags."""
    values = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"{path}:{lineno}: expected key = value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip().lower().replace("_", "-")
        if key not in _FILE_CONVERTERS:
            raise ConfigurationError(f"{path}:{lineno}: unknown option {key!r}")
        try:
            values[key] = _FILE_CONVERTERS[key](value.strip())
        except (TypeError, ValueError) as exc:
            raise ConfigurationError(f"{path}:{lineno}: bad value for {key}: {exc}") from exc
    return values


def build_parser():
    parser = argparse.ArgumentParser(
        prog="mimo-sim",
        description="Monte-Carlo BER and sum-rate sweeps for coordinated "
        "beamforming over overloaded MU-MIMO downlinks.",
    )
    parser.add_argument("--users", type=int, help="number of users K")
    parser.add_argument("--rx-antennas", type=int, help="receive antennas per user M_k")
    parser.add_argument("--tx-antennas", type=int, help="transmit antennas M_T")
    parser.add_argument(
        "--loading", type=float, help="loading coefficient L_C = M_R / M_T (alternative to --tx-antennas)"
    )
    parser.add_argument("--algorithm", choices=ALGORITHMS, help="precoding scheme (default flexcobf)")
    parser.add_argument("--ebn0", help="Eb/N0 grid in dB as start:step:stop or a single value")
    parser.add_argument("--trials", type=int, help="channel realizations per grid point (default 1000)")
    parser.add_argument("--seed", type=int, help="root seed (default 0)")
    parser.add_argument("--epsilon", type=float, help="residual MUI convergence threshold (default 1e-5)")
    parser.add_argument("--max-iter", type=int, help="coordination iteration cap (default 20)")
    parser.add_argument("--delta", type=float, help="lattice reduction delta in (1/2, 1] (default 0.75)")
    parser.add_argument("--workers", type=int, help="worker processes (default 1)")
    parser.add_argument("--out", help="output path (default stdout)")
    parser.add_argument("--format", choices=("csv", "json"), dest="out_format", help="output format (default csv)")
    parser.add_argument("--config", help="key = value file predefining any flag; explicit flags win")
    parser.add_argument(
        "--plot",
        action="store_true",
        default=None,
        help="also render BER and sum-rate figures next to --out",
    )
    return parser


_DEFAULTS = {
    "algorithm": "flexcobf",
    "trials": 1000,
    "seed": 0,
    "epsilon": 1e-5,
    "max-iter": 20,
    "delta": 0.75,
    "workers": 1,
    "format": "csv",
    "plot": False,
}

# argparse destination names for each flag.
_DESTS = {
    "users": "users",
    "rx-antennas": "rx_antennas",
    "tx-antennas": "tx_antennas",
    "loading": "loading",
    "algorithm": "algorithm",
    "ebn0": "ebn0",
    "trials": "trials",
    "seed": "seed",
    "epsilon": "epsilon",
    "max-iter": "max_iter",
    "delta": "delta",
    "workers": "workers",
    "out": "out",
    "format": "out_format",
    "plot": "plot",
}


def _merged_options(args):
    """Resolve each option as CLI flag, then config file entry, then default."""
    from_file = read_config_file(args.config) if args.config else {}
    merged = {}
    for key, dest in _DESTS.items():
        cli_value = getattr(args, dest)
        if cli_value is not None:
            merged[key] = cli_value
        elif key in from_file:
            merged[key] = from_file[key]
        else:
            merged[key] = _DEFAULTS.get(key)
    return merged


def _build_config(options):
    for required in ("users", "rx-antennas", "ebn0"):
        if options[required] is None:
            raise ConfigurationError(f"missing required option --{required}")
    return SimConfig(
        users=options["users"],
        rx_per_user=options["rx-antennas"],
        ebn0_grid_db=parse_ebn0_grid(options["ebn0"]),
        tx_antennas=options["tx-antennas"],
        loading=options["loading"],
        algorithm=options["algorithm"],
        trials=options["trials"],
        seed=options["seed"],
        epsilon=options["epsilon"],
        max_iterations=options["max-iter"],
        delta=options["delta"],
        workers=options["workers"],
    )


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        options = _merged_options(args)
        config = _build_config(options)
        if options["plot"] and not options["out"]:
            raise ConfigurationError("--plot needs --out to know where to write figures")
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    try:
        result = run_sweep(config)
    except TrialFailureError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except MimoSimError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3

    text = render_json(result) if options["format"] == "json" else render_csv(result)
    if options["out"]:
        with open(options["out"], "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)

    if options["plot"]:
        from .report import render_figures

        prefix = str(Path(options["out"]).with_suffix(""))
        for path in render_figures(result, prefix):
            print(f"wrote {path}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
