"""One rendering script per figure kind.

Usage: figtools-<kind> INPUT [INPUT2 ...] OUTPUT [--style FILE] [--schema FILE]
Exit codes: 0 success, 1 schema mismatch / malformed input / render failure.
"""

from __future__ import annotations

import argparse
import sys

from .render import FigureSpec, render
from .schema import SchemaError, fail


def _parser(kind: str, n_inputs: str) -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog=f"figtools-{kind}",
        description=f"Render a {kind} figure from solver CSV tables",
    )
    ap.add_argument("inputs", nargs=n_inputs, help="input CSV table(s)")
    ap.add_argument("output", help="output image path (.png or .svg)")
    ap.add_argument("--style", default=None, help="JSON file of rcParams overrides")
    ap.add_argument("--schema", default=None,
                    help="schema JSON (default: the bundled copy)")
    return ap


def _run(kind_flag: str, argv, n_inputs: str = "+") -> int:
    args = _parser(kind_flag, n_inputs).parse_args(argv)
    inputs = args.inputs if isinstance(args.inputs, list) else [args.inputs]
    spec = FigureSpec(
        inputs=tuple(inputs), output=args.output,
        kind={
            "spectrum": "spectrum-scatter",
            "roots": "root-loci",
            "rates": "rate-curves",
            "flow": "flow-lines",
        }[kind_flag],
        style_file=args.style, schema_file=args.schema,
    )
    try:
        out = render(spec)
    except (SchemaError, OSError, ValueError) as exc:
        return fail(str(exc))
    print(out)
    return 0


def main_spectrum(argv=None) -> int:
    return _run("spectrum", argv)


def main_roots(argv=None) -> int:
    return _run("roots", argv)


def main_rates(argv=None) -> int:
    return _run("rates", argv)


def main_flow(argv=None) -> int:
    return _run("flow", argv)


if __name__ == "__main__":  # python -m figtools.cli <kind> ...
    sys.exit(_run(sys.argv[1], sys.argv[2:]))
