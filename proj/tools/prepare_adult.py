#!/usr/bin/env python3
# Copyright 2026 The dpsynth Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Builds data/adult.csv from the UCI Adult files.

Usage:
  prepare_adult.py SOURCE [-o data/adult.csv]

SOURCE is a directory holding adult.data and adult.test, or a zip/wheel
archive containing them anywhere inside. Both files are concatenated, the
`education` column is dropped (`education-num` carries the same
information), whitespace is stripped and the trailing period on test-file
labels is removed. Missing cells stay as "?".
"""

import argparse
import csv
import pathlib
import sys
import zipfile

COLUMNS = [
    "age", "workclass", "fnlwgt", "education", "education-num", "marital-status",
    "occupation", "relationship", "race", "sex", "capital-gain", "capital-loss",
    "hours-per-week", "native-country", "income",
]
DROPPED = "education"


def read_sources(source):
  path = pathlib.Path(source)
  names = ["adult.data", "adult.test"]
  if path.is_dir():
    return [(path / n).read_text() for n in names]
  with zipfile.ZipFile(path) as z:
    texts = []
    for n in names:
      match = [i for i in z.namelist() if i.endswith("/" + n) or i == n]
      if not match:
        sys.exit(f"{n} not found in {source}")
      texts.append(z.read(match[0]).decode())
    return texts


def rows(text):
  for line in text.splitlines():
    line = line.strip()
    if not line or line.startswith("|"):
      continue
    fields = [f.strip() for f in line.split(",")]
    if len(fields) != len(COLUMNS):
      sys.exit(f"malformed line: {line!r}")
    fields[-1] = fields[-1].rstrip(".")
    yield fields


def main():
  parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
  parser.add_argument("source")
  parser.add_argument("-o", "--output", default="data/adult.csv")
  args = parser.parse_args()
  keep = [i for i, c in enumerate(COLUMNS) if c != DROPPED]
  count = 0
  with open(args.output, "w", newline="") as out:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow([COLUMNS[i] for i in keep])
    for text in read_sources(args.source):
      for fields in rows(text):
        writer.writerow([fields[i] for i in keep])
        count += 1
  print(f"wrote {count} rows to {args.output}")


if __name__ == "__main__":
  main()
