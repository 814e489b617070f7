#!/usr/bin/env python3
"""Regenerate crates/core/assets/css3_colors.csv.

The CSS3 extended color keywords are the CSS Color Module Level 4 named
colors minus `rebeccapurple`, which Level 4 added. matplotlib ships the
Level 4 table, so it is used as the source.

    python3 scripts/gen_css3_palette.py > crates/core/assets/css3_colors.csv
"""
import sys

from matplotlib.colors import CSS4_COLORS


def main() -> None:
    out = sys.stdout
    out.write("name,hex\n")
    for name in sorted(CSS4_COLORS):
        if name == "rebeccapurple":
            continue
        out.write(f"{name},{CSS4_COLORS[name].upper()}\n")


if __name__ == "__main__":
    main()
