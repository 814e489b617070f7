"""Writes the example chart bundles under fixtures/."""
import json
import os

ROOT = os.path.join(os.path.dirname(__file__), "..", "fixtures")


def svg(body):
    return "\n".join(
        ['<svg xmlns="http://www.w3.org/2000/svg" width="600" height="400">',
         '  <rect x="0" y="0" width="600" height="400" fill="none"/>',
         '  <text x="10" y="20">title</text>']
        + ["  " + line for line in body]
        + ["</svg>", ""])


def bars(rows, colors, style=True):
    """One rect per row and series; series colors in legend order first."""
    out = []
    for j, c in enumerate(colors):
        for i, v in enumerate(rows):
            if v[j] is None:
                continue
            paint = f'style="fill:{c}"' if style else f'fill="{c}"'
            out.append(f'<rect x="{40 + i * 60 + j * 15}" y="50" width="14" height="{v[j]}" {paint}/>')
    return out


def write(name, meta, header, rows, svg_text=None):
    d = os.path.join(ROOT, name)
    os.makedirs(d, exist_ok=True)
    with open(os.path.join(d, "metadata.json"), "w") as f:
        json.dump(meta, f, indent=2)
        f.write("\n")
    with open(os.path.join(d, "data.csv"), "w") as f:
        f.write(",".join(header) + "\n")
        for r in rows:
            f.write(",".join("" if c is None else str(c) for c in r) + "\n")
    if svg_text:
        with open(os.path.join(d, "chart.svg"), "w") as f:
            f.write(svg_text)


gdp = [1.2, 1.5, 1.1, 1.8, 2.3, 2.0, 2.6, 2.4, 3.1, 2.9]
points = [f'<circle cx="{40 + i * 50}" cy="{300 - v * 80:.0f}" r="3" fill="#1d81a2"/>' for i, v in enumerate(gdp)]
write("line-gdp",
      {"id": "line-gdp", "title": "GDP growth, 2011 to 2020", "type": "d3-lines",
       "subtitle": "Annual real GDP growth in percent",
       "axis_labels": {"independent": "Year", "dependent": "Growth (%)"},
       "source_note": "National statistics office", "created_at": "2024-03-10T09:00:00Z"},
      ["Year", "GDP growth"], [[2011 + i, v] for i, v in enumerate(gdp)],
      svg(['<path d="M40 204 L490 68" fill="none" stroke="currentColor"/>'] + points))

write("line-steps",
      {"id": "line-steps", "title": "Step counter", "type": "line", "created_at": "2024-01-05T12:00:00Z"},
      ["Day", "Steps"], [[1, 1], [2, 3], [3, 2], [4, 2], [5, 5]])

population = [("Germany", 84.4), ("France", 68.2), ("Italy", 58.9), ("Spain", 48.1),
              ("Poland", 36.8), ("Romania", 19.1), ("Netherlands", 17.8), ("Malta", 0.5)]
write("bar-population",
      {"id": "bar-population", "title": "Largest EU countries by population", "type": "d3-bars",
       "sorted": "desc", "axis_labels": {"independent": "Country", "dependent": "Population (millions)"},
       "footnote": "Figures for 1 January 2023.", "source_note": "Eurostat",
       "created_at": "2024-02-20T15:30:00Z"},
      ["Country", "Population"], population,
      svg(bars([[v] for _, v in population], ["#c71e1d"], style=False)))

trade = [["Q1", 120, 110, 10], ["Q2", 135, 128, 7], ["Q3", 128, 140, -12], ["Q4", 150, 131, 19]]
write("grouped-column-trade",
      {"id": "grouped-column-trade", "title": "Quarterly trade", "type": "grouped-column",
       "axis_labels": {"independent": "Quarter", "dependent": "Billion EUR"},
       "created_at": "2024-04-01T08:15:00Z"},
      ["Quarter", "Exports", "Imports", "Balance"], trade,
      svg(bars([r[1:] for r in trade], ["#4682b4", "#ffa500", "#808080"])))

energy = [["Poland", 61, 10, 27], ["Germany", 26, 14, 52], ["Spain", 2, 25, 50],
          ["France", None, 7, 27], ["Italy", 5, 50, 40]]
write("stacked-bar-energy",
      {"id": "stacked-bar-energy", "title": "Electricity mix", "type": "stacked-bars",
       "subtitle": "Share of generation by source, percent", "created_at": "2023-11-12T10:00:00Z"},
      ["Country", "Coal", "Gas", "Renewables"], energy,
      svg(bars([r[1:] for r in energy], ["rgb(85, 85, 85)", "#87ceeb", "#2e8b57"])))

budget = [("Rent", 1200), ("Food", 600), ("Transport", 300), ("Savings", 300), ("Leisure", 600)]
slice_colors = ["#e41a1c", "#377eb8", "#4daf4a", "#984ea3", "#ff7f00"]
write("pie-budget",
      {"id": "pie-budget", "title": "Monthly household budget", "type": "d3-pies",
       "created_at": "2024-05-18T18:45:00Z"},
      ["Item", "Amount"], budget,
      svg([f'<path d="M300 200 L{400 + i} 200 A100 100 0 0 1 300 {100 + i} Z" fill="{c}" stroke="#ffffff" stroke-opacity="0"/>'
           for i, c in enumerate(slice_colors)]))

temps = [0.5, 1.8, 5.6, 9.9, 14.3, 17.6, 19.8, 19.4, 15.1, 10.2, 5.1, 1.7]
write("area-temperature",
      {"id": "area-temperature", "title": "Average monthly temperature", "type": "area",
       "axis_labels": {"dependent": "Degrees Celsius"}, "created_at": "2023-12-31T23:00:00Z"},
      ["Month", "Temperature"], [[f"2023-{m + 1:02d}-01", t] for m, t in enumerate(temps)])
