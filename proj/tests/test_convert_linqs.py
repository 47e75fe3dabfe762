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
# Usage: test_convert_linqs.py <converter> <subfed binary> <toy dir>
import pathlib
import subprocess
import sys
import tempfile

converter, subfed, toy = sys.argv[1], sys.argv[2], pathlib.Path(sys.argv[3])

with tempfile.TemporaryDirectory() as tmp:
    out = pathlib.Path(tmp) / "toy.graph"
    subprocess.run([sys.executable, converter, str(toy), str(out)], check=True)
    lines = [l for l in out.read_text().splitlines() if not l.startswith("#")]
    assert lines[0] == "nodes=3 features=3 classes=2", lines[0]
    assert lines[1:4] == ["node 0 0 1 0 1", "node 1 1 0 1 0", "node 2 0 1 1 0"], lines
    # Reversed duplicate, self-citation and unknown paper are all dropped.
    assert lines[4:] == ["edge 0 1", "edge 0 2"], lines[4:]
    # The binary accepts the result.
    res = subprocess.run([subfed, "--out", str(pathlib.Path(tmp) / "p"), "partition",
                          "--graph", str(out), "--clients", "1"],
                         check=True, capture_output=True, text=True)
    assert "global |V| = 3, |E| = 2" in res.stdout, res.stdout
print("ok")
