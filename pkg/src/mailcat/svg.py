"""Dependency-free SVG charts: sweep line plots, score bars, confusion heatmaps."""

from __future__ import annotations

from typing import Sequence


def _escape(text: str) -> str:
    return (
        text.replace("&", "&amp;")
        .replace("<", "&lt;")
        .replace(">", "&gt;")
        .replace('"', "&quot;")
    )


def line_chart(
    x_values: Sequence[float],
    y_values: Sequence[float],
    x_label: str,
    y_label: str,
    title: str = "",
    width: int = 800,
    height: int = 500,
) -> str:
    """Single-series line chart; y axis spans [0, 1] (accuracy scale).

    X positions are evenly spaced in value order so sparse grids like
    1/10/100/1000 stay readable; every value gets its own tick label.
    """
    if not x_values or len(x_values) != len(y_values):
        raise ValueError("x and y must be equal-length and nonempty")
    left, right, top, bottom = 70, width - 30, 50, height - 70
    span_x = right - left
    span_y = bottom - top

    def px(i: int) -> float:
        if len(x_values) == 1:
            return left + span_x / 2
        return left + i * span_x / (len(x_values) - 1)

    def py(y: float) -> float:
        return bottom - y * span_y

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        '<rect x="0" y="0" width="100%" height="100%" fill="#ffffff"/>',
    ]
    if title:
        parts.append(
            f'<text x="{width / 2:.1f}" y="28" text-anchor="middle" font-size="18" '
            f'font-family="sans-serif">{_escape(title)}</text>'
        )
    for i in range(6):
        y = i / 5
        parts.append(
            f'<line x1="{left}" y1="{py(y):.2f}" x2="{right}" y2="{py(y):.2f}" '
            'stroke="#dddddd" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{left - 8}" y="{py(y) + 4:.2f}" text-anchor="end" font-size="12" '
            f'font-family="sans-serif">{y:.1f}</text>'
        )
    parts.append(
        f'<line x1="{left}" y1="{bottom}" x2="{right}" y2="{bottom}" stroke="#000" stroke-width="2"/>'
    )
    parts.append(
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{bottom}" stroke="#000" stroke-width="2"/>'
    )
    for i, x in enumerate(x_values):
        parts.append(
            f'<text x="{px(i):.2f}" y="{bottom + 20}" text-anchor="middle" font-size="12" '
            f'font-family="sans-serif">{_escape(str(x))}</text>'
        )
    points = " ".join(f"{px(i):.2f},{py(y):.2f}" for i, y in enumerate(y_values))
    parts.append(f'<polyline fill="none" stroke="#1f77b4" stroke-width="2.5" points="{points}"/>')
    for i, y in enumerate(y_values):
        parts.append(f'<circle cx="{px(i):.2f}" cy="{py(y):.2f}" r="4" fill="#1f77b4"/>')
    parts.append(
        f'<text x="{(left + right) / 2:.1f}" y="{height - 24}" text-anchor="middle" font-size="14" '
        f'font-family="sans-serif">{_escape(x_label)}</text>'
    )
    parts.append(
        f'<text x="20" y="{(top + bottom) / 2:.1f}" text-anchor="middle" font-size="14" '
        f'font-family="sans-serif" transform="rotate(-90 20 {(top + bottom) / 2:.1f})">'
        f"{_escape(y_label)}</text>"
    )
    parts.append("</svg>")
    return "\n".join(parts)


def bar_chart(
    labels: Sequence[str],
    values: Sequence[float],
    x_label: str,
    y_label: str,
    title: str = "",
    width: int = 800,
    height: int = 500,
) -> str:
    """Vertical bar chart on a fixed 800x500 viewport."""
    if len(labels) != len(values):
        raise ValueError("labels and values must be equal length")
    left, right, top, bottom = 70, width - 30, 50, height - 90
    span_x = right - left
    span_y = bottom - top
    v_max = max(values, default=0.0)
    if v_max <= 0:
        v_max = 1.0

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        '<rect x="0" y="0" width="100%" height="100%" fill="#ffffff"/>',
    ]
    if title:
        parts.append(
            f'<text x="{width / 2:.1f}" y="28" text-anchor="middle" font-size="18" '
            f'font-family="sans-serif">{_escape(title)}</text>'
        )
    n = max(len(values), 1)
    slot = span_x / n
    bar_w = slot * 0.8
    for i, (label, value) in enumerate(zip(labels, values)):
        x = left + i * slot + slot * 0.1
        h = (value / v_max) * span_y
        parts.append(
            f'<rect x="{x:.2f}" y="{bottom - h:.2f}" width="{bar_w:.2f}" height="{h:.2f}" '
            'fill="#1f77b4"/>'
        )
        cx = x + bar_w / 2
        parts.append(
            f'<text x="{cx:.2f}" y="{bottom + 14}" text-anchor="end" font-size="10" '
            f'font-family="sans-serif" transform="rotate(-60 {cx:.2f} {bottom + 14})">'
            f"{_escape(label)}</text>"
        )
    for i in range(6):
        v = v_max * i / 5
        parts.append(
            f'<text x="{left - 8}" y="{bottom - span_y * i / 5 + 4:.2f}" text-anchor="end" '
            f'font-size="12" font-family="sans-serif">{v:.2f}</text>'
        )
    parts.append(
        f'<line x1="{left}" y1="{bottom}" x2="{right}" y2="{bottom}" stroke="#000" stroke-width="2"/>'
    )
    parts.append(
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{bottom}" stroke="#000" stroke-width="2"/>'
    )
    parts.append(
        f'<text x="{(left + right) / 2:.1f}" y="{height - 12}" text-anchor="middle" font-size="14" '
        f'font-family="sans-serif">{_escape(x_label)}</text>'
    )
    parts.append(
        f'<text x="20" y="{(top + bottom) / 2:.1f}" text-anchor="middle" font-size="14" '
        f'font-family="sans-serif" transform="rotate(-90 20 {(top + bottom) / 2:.1f})">'
        f"{_escape(y_label)}</text>"
    )
    parts.append("</svg>")
    return "\n".join(parts)


def heatmap(
    counts: Sequence[Sequence[int]],
    class_names: Sequence[str],
    title: str = "",
    size: int = 700,
) -> str:
    """Grayscale grid on a fixed 700x700 viewport; darker = larger.

    Cells are shaded by count / row-max so small classes stay visible;
    every cell carries its count as text and the class "cell".
    """
    n = len(class_names)
    left, top = 120, 90
    grid = size - left - 40
    cell = grid / max(n, 1)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        '<rect x="0" y="0" width="100%" height="100%" fill="#ffffff"/>',
    ]
    if title:
        parts.append(
            f'<text x="{size / 2:.1f}" y="30" text-anchor="middle" font-size="18" '
            f'font-family="sans-serif">{_escape(title)}</text>'
        )
    parts.append(
        f'<text x="{left + grid / 2:.1f}" y="58" text-anchor="middle" font-size="14" '
        'font-family="sans-serif">predicted</text>'
    )
    parts.append(
        f'<text x="24" y="{top + grid / 2:.1f}" text-anchor="middle" font-size="14" '
        f'font-family="sans-serif" transform="rotate(-90 24 {top + grid / 2:.1f})">true</text>'
    )
    for t in range(n):
        row = counts[t]
        row_max = max(row, default=0)
        for p in range(n):
            share = (row[p] / row_max) if row_max > 0 else 0.0
            level = 255 - int(round(share * 200))
            x = left + p * cell
            y = top + t * cell
            parts.append(
                f'<rect class="cell" x="{x:.2f}" y="{y:.2f}" width="{cell:.2f}" height="{cell:.2f}" '
                f'fill="rgb({level},{level},{level})" stroke="#999999" stroke-width="0.5"/>'
            )
            text_fill = "#000000" if level > 127 else "#ffffff"
            parts.append(
                f'<text x="{x + cell / 2:.2f}" y="{y + cell / 2 + 4:.2f}" text-anchor="middle" '
                f'font-size="12" font-family="sans-serif" fill="{text_fill}">{row[p]}</text>'
            )
    for i, name in enumerate(class_names):
        cx = left + i * cell + cell / 2
        parts.append(
            f'<text x="{cx:.2f}" y="{top - 8:.2f}" text-anchor="start" font-size="11" '
            f'font-family="sans-serif" transform="rotate(-45 {cx:.2f} {top - 8:.2f})">'
            f"{_escape(name)}</text>"
        )
        cy = top + i * cell + cell / 2
        parts.append(
            f'<text x="{left - 8}" y="{cy + 4:.2f}" text-anchor="end" font-size="11" '
            f'font-family="sans-serif">{_escape(name)}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts)
