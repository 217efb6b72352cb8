"""Command line driver for the BER engines.

    secphy --mode theoretical --mod 16 --ebn0 0:2:20 --out t.csv
    secphy --mode montecarlo --profile 0 --channel flat --stbc on \
           --ebn0 4:2:16 --seed 7 --out coded.csv
    secphy --list-profiles

Flags may also come from a config file (--config), one `key = value`
per line with `#` comments; command line flags override file values.
Keys use the flag names with `-` or `_` interchangeably.  CSV goes to
--out, or to stdout when --out is omitted.  Exit codes: 0 success,
1 configuration error (including unknown flags), 2 I/O error.

Key material (--enc-key / --mac-key) is consumed as hex and never
echoed back in logs or error messages.
"""
from __future__ import annotations

import argparse
import math
import sys

from secphy import fec, harness, modem

_USAGE_FLAGS = [
    ("--mode", "theoretical | semianalytic | montecarlo (default)"),
    ("--profile", "coded burst profile rate_id (see --list-profiles)"),
    ("--mod", "16 | 32 | 64: uncoded QAM bypass (default 16)"),
    ("--channel", "nonfading (default) | flat | dispersive"),
    ("--stbc", "on | off (default): 2x1 space-time coding"),
    ("--cp", "4 | 8 (default) | 16 | 32: cyclic prefix 1/G denominator"),
    ("--ebn0", "sweep, start:step:stop inclusive or comma list (dB)"),
    ("--seed", "positive integer master seed (default 1)"),
    ("--security", "on | off (default): encrypt + authenticate frames"),
    ("--enc-key", "16 hex digit DES encryption key"),
    ("--mac-key", "16 hex digit DES authentication key"),
    ("--mac-bits", "tag width, 16..64 (default 32)"),
    ("--max-bits", "per-point bit budget (default 10^7)"),
    ("--min-errors", "per-point stop threshold (default 100)"),
    ("--workers", "parallel workers per point (default 1)"),
    ("--out", "CSV path (stdout when omitted)"),
    ("--config", "key = value file supplying any of the above"),
    ("--list-profiles", "print the burst profile table and exit"),
    ("--dump-constellation", "print an M-ary constellation and exit"),
]


class CliError(Exception):
    """Bad flag, bad value, or inconsistent request (exit code 1)."""


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad flags; the contract here is exit 1 with
    # usage, so convert to an exception the driver can map
    def error(self, message):
        raise CliError(f"{message}\n{self.format_usage()}")


def _build_parser() -> _Parser:
    p = _Parser(prog="secphy", add_help=True,
                description="BER engines for the secured OFDM chain")
    for flag, help_text in _USAGE_FLAGS:
        if flag in ("--list-profiles",):
            p.add_argument(flag, action="store_true", help=help_text)
        else:
            p.add_argument(flag, type=str, default=None, help=help_text)
    return p


# every value arrives as a string (flag or file line) and is converted
# exactly once, so both sources produce identical diagnostics

def _conv_onoff(text: str, name: str) -> bool:
    if text not in ("on", "off"):
        raise CliError(f"{name} must be 'on' or 'off'")
    return text == "on"


def _conv_int(text: str, name: str) -> int:
    try:
        return int(text, 0)
    except ValueError:
        raise CliError(f"{name} must be an integer") from None


def _conv_key(text: str, name: str) -> bytes:
    # do not echo the offending value: it may be a mistyped real key
    try:
        key = bytes.fromhex(text)
    except ValueError:
        raise CliError(f"{name} must be 16 hex digits") from None
    if len(key) != 8:
        raise CliError(f"{name} must be 16 hex digits (got "
                       f"{len(text)} characters)")
    return key


def parse_sweep(text: str) -> tuple[float, ...]:
    """'start:step:stop' (inclusive) or 'a,b,c' in dB."""
    try:
        if ":" in text:
            start, step, stop = (float(x) for x in text.split(":"))
            if step <= 0:
                raise CliError("--ebn0 step must be positive")
            n = int(math.floor((stop - start) / step + 1e-9)) + 1
            if n < 1:
                raise CliError("--ebn0 range is empty")
            return tuple(start + i * step for i in range(n))
        return tuple(float(x) for x in text.split(","))
    except ValueError:
        raise CliError("--ebn0 expects start:step:stop or a comma list") \
            from None


def read_config_file(path: str) -> dict[str, str]:
    """One `key = value` per line; `#` starts a comment; keys normalize
    `-` to `_`."""
    values: dict[str, str] = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise CliError(f"{path}:{lineno}: expected key = value")
            key, _, value = line.partition("=")
            key = key.strip().replace("-", "_")
            value = value.strip()
            if not key or not value:
                raise CliError(f"{path}:{lineno}: expected key = value")
            values[key] = value
    return values


_KNOWN_KEYS = {"mode", "profile", "mod", "channel", "stbc", "cp", "ebn0",
               "seed", "security", "enc_key", "mac_key", "mac_bits",
               "max_bits", "min_errors", "workers", "out"}

_CP_CHOICES = (4, 8, 16, 32)


def build_config(values: dict[str, str]) -> tuple[harness.SimConfig,
                                                  str | None]:
    """Merged string values to a validated SimConfig plus output path."""
    unknown = set(values) - _KNOWN_KEYS
    if unknown:
        raise CliError(f"unknown config keys: {', '.join(sorted(unknown))}")
    if "ebn0" not in values:
        raise CliError("--ebn0 is required (or supply ebn0 in --config)")
    if "profile" in values and "mod" in values:
        raise CliError("--profile and --mod are mutually exclusive: a "
                       "profile fixes the constellation")
    kw: dict = {
        "mode": values.get("mode", "montecarlo"),
        "ebn0_sweep": parse_sweep(values["ebn0"]),
        "channel": values.get("channel", "nonfading"),
    }
    if "profile" in values:
        kw["profile"] = _conv_int(values["profile"], "--profile")
    if "mod" in values:
        kw["modulation"] = _conv_int(values["mod"], "--mod")
    if "seed" in values:
        kw["seed"] = _conv_int(values["seed"], "--seed")
    if "stbc" in values:
        kw["stbc"] = _conv_onoff(values["stbc"], "--stbc")
    if "security" in values:
        kw["security"] = _conv_onoff(values["security"], "--security")
    if "enc_key" in values:
        kw["enc_key"] = _conv_key(values["enc_key"], "--enc-key")
    if "mac_key" in values:
        kw["mac_key"] = _conv_key(values["mac_key"], "--mac-key")
    if "mac_bits" in values:
        kw["mac_bits"] = _conv_int(values["mac_bits"], "--mac-bits")
    if "max_bits" in values:
        kw["max_bits"] = _conv_int(values["max_bits"], "--max-bits")
    if "min_errors" in values:
        kw["min_bit_errors"] = _conv_int(values["min_errors"], "--min-errors")
    if "workers" in values:
        kw["workers"] = _conv_int(values["workers"], "--workers")
    if "cp" in values:
        denom = _conv_int(values["cp"], "--cp")
        if denom not in _CP_CHOICES:
            raise CliError(f"--cp must be one of {_CP_CHOICES}")
        kw["cp_ratio"] = 1.0 / denom
    try:
        config = harness.SimConfig(**kw)
    except harness.ConfigError as e:
        raise CliError(str(e)) from None
    return config, values.get("out")


def dump_constellation(m_text: str) -> str:
    m = _conv_int(m_text, "--dump-constellation")
    if m not in (16, 32, 64):
        raise CliError("--dump-constellation must be 16, 32 or 64")
    const = modem.make_constellation(m)
    lines = ["label,i,q"]
    for label, pt in enumerate(const.points):
        lines.append(f"{label},{float(pt.real)!r},{float(pt.imag)!r}")
    return "\n".join(lines) + "\n"


def main(argv=None) -> int:
    """Parse flags, run the requested engine, emit CSV; returns exit code."""
    parser = _build_parser()
    try:
        ns = parser.parse_args(argv)
        if ns.list_profiles:
            print(fec.list_profiles())
            return 0
        if ns.dump_constellation is not None:
            sys.stdout.write(dump_constellation(ns.dump_constellation))
            return 0
        values: dict[str, str] = {}
        if ns.config is not None:
            values.update(read_config_file(ns.config))
        for key in _KNOWN_KEYS:
            flag_value = getattr(ns, key)
            if flag_value is not None:
                values[key] = flag_value
        config, out_path = build_config(values)
        points = harness.run(config)
        text = harness.format_csv(points)
        if out_path:
            with open(out_path, "w", newline="") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return 0
    except (CliError, harness.ConfigError) as e:
        print(f"secphy: error: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        # unreadable --config or unwritable --out
        print(f"secphy: i/o error: {e.strerror or e}: "
              f"{getattr(e, 'filename', '')}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    raise SystemExit(main())
