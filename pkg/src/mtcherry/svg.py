"""Minimal SVG bar chart for confidence distributions.

Hand-rolled rectangles and text in a fixed 800x500 viewport: no plotting
dependency, and byte-identical output for identical input.  One bar per
count, with the cumulative percentage printed above each bar.
"""

from __future__ import annotations

from .profile import ConfidenceProfile

WIDTH = 800
HEIGHT = 500
MARGIN_LEFT = 64
MARGIN_RIGHT = 24
MARGIN_TOP = 48
MARGIN_BOTTOM = 56

# past this many bars the per-bar labels thin out to stay legible
LABEL_BUDGET = 60


def _esc(text: str) -> str:
    return (
        text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
    )


def pmf_bar_chart(
    profile: ConfidenceProfile,
    title: str = "Confidence distribution of the true-hypothesis count",
) -> str:
    """Render the profile's masses as an SVG bar chart.

    The vertical scale runs to the largest mass; cumulative percentages sit
    above the bars, mirroring the usual presentation of these plots.
    """
    masses = profile.masses()
    cum = profile.cumulative()
    count = masses.size
    plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM
    baseline = MARGIN_TOP + plot_h
    top = float(masses.max()) or 1.0
    slot = plot_w / count
    bar_w = slot * 0.7
    stride = max(1, -(-count // LABEL_BUDGET))

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" '
        f'height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.2f}" y="24" text-anchor="middle" '
        f'font-family="sans-serif" font-size="16">{_esc(title)}</text>',
        f'<line x1="{MARGIN_LEFT}" y1="{baseline}" x2="{WIDTH - MARGIN_RIGHT}" '
        f'y2="{baseline}" stroke="black" stroke-width="1"/>',
    ]
    for v in range(count):
        h = plot_h * float(masses[v]) / top
        x = MARGIN_LEFT + v * slot + (slot - bar_w) / 2
        y = baseline - h
        parts.append(
            f'<rect class="bar" x="{x:.2f}" y="{y:.2f}" width="{bar_w:.2f}" '
            f'height="{h:.2f}" fill="#4878a8"/>'
        )
        if v % stride == 0 or v == count - 1:
            cx = x + bar_w / 2
            label_y = max(y - 6.0, MARGIN_TOP - 8.0)
            parts.append(
                f'<text x="{cx:.2f}" y="{label_y:.2f}" text-anchor="middle" '
                f'font-family="sans-serif" font-size="11">'
                f"{100.0 * float(cum[v]):.0f}%</text>"
            )
            parts.append(
                f'<text x="{cx:.2f}" y="{baseline + 16:.2f}" '
                f'text-anchor="middle" font-family="sans-serif" '
                f'font-size="11">{v}</text>'
            )
    parts.append(
        f'<text x="{WIDTH / 2:.2f}" y="{HEIGHT - 12}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="13">number of true hypotheses'
        f"</text>"
    )
    parts.append(
        f'<text x="18" y="{MARGIN_TOP + plot_h / 2:.2f}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="13" '
        f'transform="rotate(-90 18 {MARGIN_TOP + plot_h / 2:.2f})">'
        f"confidence mass</text>"
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
