"""Figure rendering for sweep reports.

Sweeps write their delimited output first; these helpers render the
companion figures (mean system delay per model, or per-device resource
shares) next to the CSV. Rendering never touches the CSV content.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

_MODEL_STYLE = {
    "local": dict(color="tab:blue", marker="o"),
    "edge": dict(color="tab:orange", marker="s"),
    "partial": dict(color="tab:green", marker="^"),
    "partial-special": dict(color="tab:red", marker="d", linestyle="--"),
}

_X_LABEL = {
    "K": "number of devices",
    "Vd": "mean device compression capacity (Mbps)",
    "L1": "device 1 payload (Mbits)",
    "Vd1": "device 1 compression capacity (Mbps)",
}


def render_delay_figure(rows, kind: str, out_path) -> str:
    """Mean system delay versus the sweep point, one curve per model."""
    models = sorted({r["model"] for r in rows})
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for model in models:
        pts = sorted((r["point_value"], r["mean_delay_s"])
                     for r in rows if r["model"] == model)
        ax.plot([p for p, _ in pts], [d for _, d in pts],
                label=model, **_MODEL_STYLE.get(model, {}))
    ax.set_xlabel(_X_LABEL.get(kind, kind))
    ax.set_ylabel("mean system delay (s)")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return str(out_path)


def render_allocation_figure(alloc_rows, kind: str, out_path) -> str:
    """Per-device time shares and cloud capacities versus the sweep point."""
    devices = sorted({r["device"] for r in alloc_rows})
    fig, (ax_t, ax_v) = plt.subplots(1, 2, figsize=(9.5, 4.0))
    for dev in devices:
        pts = sorted((r["point_value"], r["t"], r["v_c_bps"])
                     for r in alloc_rows if r["device"] == dev)
        xs = [p for p, _, _ in pts]
        ax_t.plot(xs, [t for _, t, _ in pts], marker="o", label=f"device {dev + 1}")
        ax_v.plot(xs, [v / 1e6 for _, _, v in pts], marker="o",
                  label=f"device {dev + 1}")
    for ax, ylabel in ((ax_t, "time share $t_k$"),
                       (ax_v, "cloud capacity (Mbps)")):
        ax.set_xlabel(_X_LABEL.get(kind, kind))
        ax.set_ylabel(ylabel)
        ax.grid(True, alpha=0.3)
    ax_t.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return str(out_path)
