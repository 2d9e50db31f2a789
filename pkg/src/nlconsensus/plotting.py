"""Static SVG plots of agent trajectories."""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

_SVG_META = {"Date": None, "Creator": None}


def _save(fig, path):
    with matplotlib.rc_context({"svg.hashsalt": "nlconsensus"}):
        fig.savefig(path, format="svg", metadata=_SVG_META)
    plt.close(fig)


def plot_trajectory(traj, path, title=None):
    """Agent states against time, with the conserved weighted average dashed."""
    fig, ax = plt.subplots(figsize=(7, 4))
    for i in range(traj.n):
        ax.plot(traj.t, traj.x[:, i], lw=1.2, label=f"$x_{{{i + 1}}}$")
    if traj.xi is not None:
        ax.plot(traj.t, traj.x_xi, "k--", lw=0.8, label=r"$\xi^T x$")
    ax.set_xlabel("t")
    ax.set_ylabel("state")
    if title:
        ax.set_title(title)
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    _save(fig, path)


def plot_comparison(traj_a, traj_b, path, labels=("A", "B")):
    """Both runs on one axis; run A drawn with star markers."""
    fig, ax = plt.subplots(figsize=(7, 4))
    every = max(1, len(traj_a) // 25)
    for i in range(traj_a.n):
        color = f"C{i}"
        ax.plot(traj_a.t, traj_a.x[:, i], color=color, marker="*", markevery=every, lw=1.0,
                label=f"{labels[0]} $x_{{{i + 1}}}$")
        ax.plot(traj_b.t, traj_b.x[:, i], color=color, lw=1.0, alpha=0.7,
                label=f"{labels[1]} $x_{{{i + 1}}}$")
    ax.set_xlabel("t")
    ax.set_ylabel("state")
    ax.legend(loc="best", fontsize=7, ncol=2)
    fig.tight_layout()
    _save(fig, path)
