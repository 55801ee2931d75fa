"""Figures for survey reports."""
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def plot_survey(result, path):
    """nu and mu against p (left) and group order against p (right)."""
    rows = [r for r in result.rows if r["status"] == "ok"]
    ps = [r["p"] for r in rows]
    fig, (ax, ax2) = plt.subplots(1, 2, figsize=(9, 3.6))
    ax.plot(ps, [r["nu"] for r in rows], "o-", label="nu")
    ax.plot(ps, [r["mu"] for r in rows], "s--", label="mu")
    ax.set_xlabel("p")
    ax.set_ylabel("multiplicity")
    ax.set_xticks(ps)
    top = max([r["mu"] for r in rows] + [1])
    ax.set_ylim(0, top + 1)
    ax.legend(frameon=False)
    ax.set_title(f"{result.template} ({result.policy})")
    ax2.semilogy(ps, [r["order"] for r in rows], "o-", color="gray")
    ax2.set_xlabel("p")
    ax2.set_ylabel("|G|")
    ax2.set_xticks(ps)
    skipped = [r["p"] for r in result.rows if r["status"] != "ok"]
    if skipped:
        ax2.set_title("skipped p: " + ", ".join(map(str, skipped)), fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
