#!/usr/bin/env python3
"""Download the public bike-share daily file into data/day.csv.

Needs outbound network access.  The file is the day-aggregated daily
rental CSV (UCI ML repository id 275, "Bike Sharing Dataset"); its
``dteday`` date column is accepted directly by the ingest alias map.

    python scripts/fetch_uci_day.py [dest_dir]
"""

import io
import sys
import urllib.request
import zipfile
from pathlib import Path

URL = "https://archive.ics.uci.edu/static/public/275/bike+sharing+dataset.zip"


def main(dest_dir: str = "data") -> None:
    dest = Path(dest_dir)
    dest.mkdir(parents=True, exist_ok=True)
    out = dest / "day.csv"
    print(f"fetching {URL} ...")
    with urllib.request.urlopen(URL, timeout=60) as response:
        payload = response.read()
    with zipfile.ZipFile(io.BytesIO(payload)) as archive:
        out.write_bytes(archive.read("day.csv"))
    print(f"wrote {out}")
    print("run the gated tests with: HORIZONBENCH_UCI_DAY="
          f"{out} pytest tests -q")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data")
