"""Matplotlib rendering of the report tables, saved next to the CSV/JSON."""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

__all__ = [
    "render_estimates",
    "render_regression",
    "render_paths",
]


def _new_axes(title: str):
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    return fig, ax


def _save(fig, path: str) -> None:
    fig.savefig(path, dpi=150, bbox_inches="tight", metadata={})
    plt.close(fig)


def render_estimates(rows: list[dict], path: str, title: str = "Pickands constant estimates") -> None:
    """Estimate-vs-alpha figure: point estimates, 95% CI band, any bound
    columns present, and the 1/Gamma(1/alpha) comparison curve."""
    rows = [r for r in rows if r.get("alpha") is not None]
    if not rows:
        fig, ax = _new_axes(title)
        ax.set_xlabel(r"$\alpha$")
        _save(fig, path)
        return
    alphas = [r["alpha"] for r in rows]
    fig, ax = _new_axes(title)
    est = [r.get("estimate") for r in rows]
    if any(v is not None for v in est):
        ax.plot(alphas, est, "b-", label="estimate")
    los = [r.get("ci95_lo") for r in rows]
    his = [r.get("ci95_hi") for r in rows]
    if all(v is not None and not math.isnan(v) for v in los + his):
        ax.fill_between(alphas, los, his, color="g", alpha=0.25, label="95% CI")
    for key, style, label in (
        ("lower_bound", "r-.", "lower bound"),
        ("upper_bound", "r:", "upper bound"),
    ):
        pts = [(a, r[key]) for a, r in zip(alphas, rows) if r.get(key) is not None]
        if pts:
            ax.plot(*zip(*pts), style, label=label)
    gamma_curve = [1.0 / math.gamma(1.0 / a) for a in alphas]
    ax.plot(alphas, gamma_curve, "m--", label=r"$1/\Gamma(1/\alpha)$")
    ax.set_xlabel(r"$\alpha$")
    ax.set_ylabel("estimate")
    ax.legend()
    _save(fig, path)


def render_regression(fits: list[dict], columns: dict[float, list[dict]], path: str) -> None:
    """Mesh-sweep figure: one estimate curve per eta plus the
    extrapolated intercept curve."""
    fig, ax = _new_axes("Mesh sweep and extrapolation")
    for eta, rows in sorted(columns.items(), reverse=True):
        alphas = [r["alpha"] for r in rows]
        ax.plot(alphas, [r["estimate"] for r in rows], "--", lw=1,
                label=f"eta={eta:g}")
    if fits:
        alphas = [f["alpha"] for f in fits]
        ax.plot(alphas, [f["h_T_hat"] for f in fits], "g-", lw=2,
                label="extrapolated")
    ax.set_xlabel(r"$\alpha$")
    ax.set_ylabel("estimate")
    ax.legend()
    _save(fig, path)


def render_paths(paths: list[tuple], path: str) -> None:
    """Sample-path figure for the debug dump: (times, B, Z) per path."""
    fig, ax = _new_axes("Sampled paths")
    for times, b_vals, z_vals in paths:
        ax.plot(times, b_vals, lw=0.8)
        ax.plot(times, z_vals, lw=0.8, alpha=0.5)
    ax.set_xlabel("t")
    ax.set_ylabel(r"$B_t$ (solid), $Z_t$ (faint)")
    _save(fig, path)


def render_identity(curves: dict[float, tuple], path: str) -> None:
    """Integrand curves of the lattice-sum identity, one per eta."""
    fig, ax = _new_axes("Lattice-sum identity integrand")
    for eta, (ys, values) in sorted(curves.items()):
        ax.plot(ys, values, lw=1, label=f"eta={eta:g}")
    ax.set_xlabel("y")
    ax.set_ylabel("integrand")
    ax.legend()
    _save(fig, path)
