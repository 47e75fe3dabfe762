#!/usr/bin/env python3
# Copyright 2026 The subfed Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Converts a LINQS citation dataset (cora.content + cora.cites) to the
subfed graph format.

  python3 tools/convert_linqs.py path/to/cora cora.graph

Node ids follow the order of the .content file; class ids follow the sorted
label names. Citations that name unknown papers are dropped and counted.
"""

import argparse
import pathlib
import sys


def load(directory, name):
    content = directory / f"{name}.content"
    cites = directory / f"{name}.cites"
    ids, labels, rows = {}, [], []
    with content.open() as f:
        for line in f:
            parts = line.split()
            if not parts:
                continue
            if parts[0] in ids:
                raise SystemExit(f"{content}: duplicate paper {parts[0]}")
            ids[parts[0]] = len(ids)
            rows.append(parts[1:-1])
            labels.append(parts[-1])
    dims = {len(r) for r in rows}
    if len(dims) != 1:
        raise SystemExit(f"{content}: ragged feature rows {sorted(dims)}")
    classes = {c: i for i, c in enumerate(sorted(set(labels)))}
    edges, unknown = set(), 0
    with cites.open() as f:
        for line in f:
            parts = line.split()
            if len(parts) != 2:
                continue
            if parts[0] not in ids or parts[1] not in ids:
                unknown += 1
                continue
            u, v = ids[parts[0]], ids[parts[1]]
            if u != v:
                edges.add((min(u, v), max(u, v)))
    return rows, [classes[c] for c in labels], classes, sorted(edges), unknown


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("directory", type=pathlib.Path)
    ap.add_argument("output", type=pathlib.Path)
    ap.add_argument("--name", help="file stem (default: directory name)")
    args = ap.parse_args()
    name = args.name or args.directory.name
    rows, labels, classes, edges, unknown = load(args.directory, name)
    with args.output.open("w") as out:
        out.write(f"# {name}: {len(rows)} nodes, {len(edges)} undirected edges\n")
        out.write("# classes: " + " ".join(f"{i}={c}" for c, i in classes.items()) + "\n")
        out.write(f"nodes={len(rows)} features={len(rows[0])} classes={len(classes)}\n")
        for i, (row, label) in enumerate(zip(rows, labels)):
            out.write(f"node {i} {label} {' '.join(row)}\n")
        for u, v in edges:
            out.write(f"edge {u} {v}\n")
    print(f"{len(rows)} nodes, {len(edges)} edges, {len(classes)} classes, "
          f"{unknown} citations to unknown papers dropped", file=sys.stderr)


if __name__ == "__main__":
    main()
