"""Channel-spec files, sweep CSV, and the static SVG plot.

The spec file is versioned JSON carrying either the three DMC matrices or a
Gaussian parameter block (exactly one of the two), decimals only. The sweep
CSV uses 12 significant digits and round-trips byte-identically; the SVG is
a pure function of the CSV table.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .channels import BroadcastSpec
from .errors import ValidationError
from .gaussian import SweepRow
from .probcore import Channel

SPEC_FORMAT_VERSION = 1

SWEEP_HEADER = "sigmaz_sq,regime,capacity_bits,alpha_star,binding_term"


@dataclass(frozen=True)
class SpecDocument:
    """Parsed channel-spec file: a DMC broadcast spec or Gaussian parameters."""

    kind: str  # "dmc" | "gaussian"
    broadcast: BroadcastSpec | None = None
    power: float | None = None
    sigma1_sq: float | None = None
    sigma2_sq: float | None = None
    sigmaz_sq: float | None = None


def load_spec_file(path: str | Path) -> SpecDocument:
    try:
        raw = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ValidationError(f"spec file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ValidationError(f"spec file is not valid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise ValidationError("spec file must contain a JSON object")
    version = raw.get("format_version")
    if version != SPEC_FORMAT_VERSION:
        raise ValidationError(
            f"unsupported format_version {version!r}, expected {SPEC_FORMAT_VERSION}"
        )

    has_dmc = any(k in raw for k in ("y1", "y2", "z"))
    has_gaussian = "gaussian" in raw
    if has_dmc == has_gaussian:
        raise ValidationError("spec file must contain exactly one of DMC matrices or a gaussian block")

    if has_gaussian:
        block = raw["gaussian"]
        if not isinstance(block, dict):
            raise ValidationError("gaussian block must be an object")
        required = ("power", "sigma1_sq", "sigma2_sq")
        for key in required:
            if key not in block:
                raise ValidationError(f"gaussian block is missing {key!r}")
        unknown = set(block) - {*required, "sigmaz_sq"}
        if unknown:
            raise ValidationError(f"gaussian block has unknown keys {sorted(unknown)}")

        def num(key):
            v = block.get(key)
            if v is None:
                return None
            if not isinstance(v, (int, float)) or isinstance(v, bool):
                raise ValidationError(f"gaussian {key} must be a number, got {v!r}")
            return float(v)

        return SpecDocument(
            kind="gaussian",
            power=num("power"),
            sigma1_sq=num("sigma1_sq"),
            sigma2_sq=num("sigma2_sq"),
            sigmaz_sq=num("sigmaz_sq"),
        )

    for key in ("y1", "y2", "z"):
        if key not in raw:
            raise ValidationError(f"DMC spec is missing the {key!r} matrix")
    channels = {}
    for key in ("y1", "y2", "z"):
        try:
            channels[key] = Channel(np.array(raw[key], dtype=float))
        except (ValidationError, ValueError) as exc:
            raise ValidationError(f"matrix {key!r} is not a valid channel: {exc}") from None

    def names(key):
        v = raw.get(key, ())
        if v and not (isinstance(v, list) and all(isinstance(s, str) for s in v)):
            raise ValidationError(f"{key} must be a list of strings")
        return tuple(v)

    return SpecDocument(
        kind="dmc",
        broadcast=BroadcastSpec(
            ch_y1=channels["y1"],
            ch_y2=channels["y2"],
            ch_z=channels["z"],
            x_names=names("x_alphabet"),
            y1_names=names("y1_alphabet"),
            y2_names=names("y2_alphabet"),
            z_names=names("z_alphabet"),
        ),
    )


def _fmt(value: float) -> str:
    return "%.12g" % value


def format_sweep_csv(rows: list[SweepRow]) -> str:
    lines = [SWEEP_HEADER]
    for row in rows:
        alpha = "" if row.alpha_star is None else _fmt(row.alpha_star)
        lines.append(
            f"{_fmt(row.sigmaz_sq)},{row.regime},{_fmt(row.capacity_bits)},{alpha},{row.binding_term}"
        )
    return "\n".join(lines) + "\n"


def parse_sweep_csv(text: str) -> list[SweepRow]:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != SWEEP_HEADER:
        raise ValidationError(f"sweep CSV must start with header {SWEEP_HEADER!r}")
    rows = []
    prev = -np.inf
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != 5:
            raise ValidationError(f"bad sweep CSV row: {ln!r}")
        sigmaz = float(parts[0])
        if sigmaz <= prev:
            raise ValidationError("sweep CSV rows must ascend in sigmaz_sq")
        prev = sigmaz
        rows.append(
            SweepRow(
                sigmaz_sq=sigmaz,
                regime=parts[1],
                capacity_bits=float(parts[2]),
                alpha_star=float(parts[3]) if parts[3] else None,
                binding_term=parts[4],
            )
        )
    return rows


def render_sweep_svg(rows: list[SweepRow]) -> str:
    """Minimal static SVG 1.1 line chart of the sweep table.

    A polyline over (sigmaz_sq, capacity_bits) with axes and regime labels;
    byte-identical for identical tables.
    """
    if not rows:
        raise ValidationError("cannot plot an empty sweep")
    width, height = 640, 400
    left, right, top, bottom = 60, 20, 20, 50
    xs = [row.sigmaz_sq for row in rows]
    ys = [row.capacity_bits for row in rows]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = 0.0, max(max(ys), 1e-9)
    span_x = (x_hi - x_lo) or 1.0

    def px(x: float) -> str:
        return _fmt(left + (x - x_lo) / span_x * (width - left - right))

    def py(y: float) -> str:
        return _fmt(height - bottom - (y - y_lo) / (y_hi - y_lo) * (height - top - bottom))

    points = " ".join(f"{px(x)},{py(y)}" for x, y in zip(xs, ys))
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{left}" y1="{height - bottom}" x2="{width - right}" y2="{height - bottom}" stroke="black"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{height - bottom}" stroke="black"/>',
        f'<text x="{left}" y="{height - bottom + 20}" font-size="12">{_fmt(x_lo)}</text>',
        f'<text x="{width - right - 30}" y="{height - bottom + 20}" font-size="12">{_fmt(x_hi)}</text>',
        f'<text x="5" y="{height - bottom}" font-size="12">{_fmt(y_lo)}</text>',
        f'<text x="5" y="{top + 12}" font-size="12">{_fmt(y_hi)}</text>',
        f'<text x="{(left + width - right) // 2 - 40}" y="{height - 12}" font-size="12">sigmaz_sq</text>',
        f'<text x="12" y="{top}" font-size="12">bits</text>',
        f'<polyline fill="none" stroke="steelblue" stroke-width="2" points="{points}"/>',
    ]
    seen = []
    for row in rows:
        if not seen or seen[-1][0] != row.regime:
            seen.append((row.regime, row.sigmaz_sq))
    for regime, start in seen:
        parts.append(
            f'<line x1="{px(start)}" y1="{top}" x2="{px(start)}" y2="{height - bottom}"'
            ' stroke="gray" stroke-dasharray="4 3"/>'
        )
        parts.append(f'<text x="{px(start)}" y="{top + 12}" font-size="11">{regime}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
