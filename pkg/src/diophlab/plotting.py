"""PNG figures drawn from a CSV report, never from live objects."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .errors import ConfigError  # noqa: E402
from .report import read_csv_header, read_csv_tables  # noqa: E402


def _num(text: str) -> float | None:
    if text in ("", None):
        return None
    if text == "inf":
        return float("inf")
    if "/" in text:
        a, b = text.split("/")
        return int(a) / int(b)
    return float(text)


def _save(fig, path: Path) -> Path:
    # a fixed Software key keeps the bytes independent of the installed version
    fig.savefig(path, dpi=100, metadata={"Software": "diophlab"})
    plt.close(fig)
    return path


def _plot_ladder(rows, path: Path) -> Path:
    pts = [(int(r["k"]), _num(r["slope"])) for r in rows if _num(r["slope"]) is not None]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot([k for k, _ in pts], [s for _, s in pts], marker="o")
    ax.set_xlabel("log2 Q")
    ax.set_ylabel("slope")
    ax.set_title("ladder slopes")
    return _save(fig, path)


def _plot_verify(rows, path: Path) -> Path:
    thetas = sorted({r["theta"] for r in rows})
    fig, ax = plt.subplots(figsize=(7, 4))
    for i, th in enumerate(thetas):
        ys = [_num(r["estimate"]) for r in rows if r["theta"] == th and r["estimate"]]
        ax.scatter([i] * len(ys), ys, s=10, alpha=0.6)
    lows = [_num(r["lower"]) for r in rows if r["lower"]]
    highs = [_num(r["upper"]) for r in rows if r["upper"]]
    if lows and highs:
        ax.axhspan(min(lows), max(highs), color="grey", alpha=0.2, label="bound interval")
        ax.legend(loc="upper right")
    ax.set_xticks(range(len(thetas)))
    ax.set_xticklabels([t[:14] for t in thetas], rotation=30, ha="right", fontsize=7)
    ax.set_ylabel("estimated exponent")
    fig.tight_layout()
    return _save(fig, path)


def _plot_psi(rows, path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(6, 4))
    for eta in sorted({r["eta"] for r in rows}, key=_num):
        pts = [(_num(r["cap"]), _num(r["partial_sum"])) for r in rows if r["eta"] == eta]
        ax.plot([c for c, _ in pts], [s for _, s in pts], marker="o", label=f"eta = {eta}")
    ax.set_xlabel("sigma cap")
    ax.set_ylabel("partial sum")
    ax.legend()
    return _save(fig, path)


def plot_report(csv_path: str | Path, out_dir: str | Path) -> list[Path]:
    """Render every table this module knows how to draw; returns the written paths."""
    text = Path(csv_path).read_text(encoding="utf-8")
    header = read_csv_header(text)
    if not header or not header[0].startswith("diophlab-report"):
        raise ConfigError(f"{csv_path} is not a CSV report")
    tables = read_csv_tables(text)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    stem = Path(csv_path).stem
    written = []
    if "ladder" in tables:
        written.append(_plot_ladder(tables["ladder"], out / f"{stem}_ladder.png"))
    if "rows" in tables:
        written.append(_plot_verify(tables["rows"], out / f"{stem}_verify.png"))
    if "psi" in tables:
        written.append(_plot_psi(tables["psi"], out / f"{stem}_psi.png"))
    if not written:
        raise ConfigError(f"{csv_path} has no table that can be plotted")
    return written
