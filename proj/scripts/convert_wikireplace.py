#!/usr/bin/env python3
# Copyright 2026 The genlevel Authors.
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
"""Convert a WikiReplace-style export into genlevel JSONL.

Output lines have the fields
    id, text, span_start, span_end, span_text, semantic_type,
    candidates, majority_level, all_levels
with span offsets counted in Unicode code points (end exclusive) and levels
1-based.

Source records are read from a JSON array, a JSON object holding an array
under --records-key, or JSON Lines. Field names are configurable since
exports differ. Annotator selections come either as a list of per-annotator
levels (--votes-field; the majority is the most common level, ties to the
lowest) or as precomputed --majority-field / --levels-field.

Offsets: --offset-unit says how the source counts them (codepoint, utf8 byte
or utf16 unit). Without offset fields the span is located as the first
occurrence of the span text, and a record whose span text is absent fails.

Examples:
    convert_wikireplace.py raw_train.json --records-key data \\
        --text-field sentence --span-field pii --type-field type \\
        --candidates-field generalizations --votes-field selections \\
        --level-base 0 -o train.jsonl
"""

import argparse
import collections
import json
import sys

PAD = "[PAD]"


class ConversionError(Exception):
    pass


def read_records(path, records_key):
    with open(path, encoding="utf-8") as f:
        raw = f.read()
    stripped = raw.lstrip()
    if stripped.startswith("[") or (stripped.startswith("{") and records_key):
        data = json.loads(raw)
        if records_key:
            data = data[records_key]
        if not isinstance(data, list):
            raise ConversionError("expected a list of records")
        return [(i + 1, r) for i, r in enumerate(data)]
    out = []
    for n, line in enumerate(raw.splitlines(), 1):
        if line.strip():
            try:
                out.append((n, json.loads(line)))
            except json.JSONDecodeError as e:
                raise ConversionError(f"line {n}: {e.msg}") from None
    return out


def to_codepoints(text, offset, unit):
    """Converts an offset in `unit` to a code-point index into `text`."""
    if unit == "codepoint":
        return offset
    if unit == "utf8":
        prefix = text.encode("utf-8")[:offset]
        try:
            return len(prefix.decode("utf-8"))
        except UnicodeDecodeError:
            raise ConversionError(f"byte offset {offset} splits a character") from None
    units = 0
    for i, ch in enumerate(text):
        if units == offset:
            return i
        units += 2 if ord(ch) > 0xFFFF else 1
        if units > offset:
            raise ConversionError(f"UTF-16 offset {offset} splits a surrogate pair")
    if units == offset:
        return len(text)
    raise ConversionError(f"UTF-16 offset {offset} is past the end of the text")


def majority(votes):
    counts = collections.Counter(votes)
    best = max(counts.values())
    return min(level for level, c in counts.items() if c == best)


def convert(rec, args, fallback_id):
    def field(name, required=True):
        if name in rec:
            return rec[name]
        if required:
            raise ConversionError(f"missing field {name!r}")
        return None

    text = field(args.text_field)
    span_text = field(args.span_field)
    candidates = [str(c) for c in field(args.candidates_field)]
    if not candidates:
        raise ConversionError("no candidates")
    if PAD in candidates:
        raise ConversionError(f"candidate list contains {PAD}")

    start = field(args.start_field, required=False) if args.start_field else None
    end = field(args.end_field, required=False) if args.end_field else None
    if start is None or end is None:
        start = text.find(span_text)
        if start < 0:
            raise ConversionError(f"span text {span_text!r} not found in text")
        end = start + len(span_text)
    else:
        start = to_codepoints(text, int(start), args.offset_unit)
        end = to_codepoints(text, int(end), args.offset_unit)
    if text[start:end] != span_text:
        raise ConversionError(f"text[{start}:{end}] is {text[start:end]!r}, not {span_text!r}")

    shift = 1 - args.level_base
    if args.votes_field:
        votes = [int(v) + shift for v in field(args.votes_field)]
        if not votes:
            raise ConversionError("no annotator selections")
        level = majority(votes)
        levels = sorted(set(votes))
    else:
        level = int(field(args.majority_field)) + shift
        levels = sorted({int(v) + shift for v in field(args.levels_field)} | {level})
    for lv in levels:
        if not 1 <= lv <= len(candidates):
            raise ConversionError(f"level {lv} outside 1..{len(candidates)}")

    rid = rec.get(args.id_field, fallback_id) if args.id_field else fallback_id
    return {
        "id": str(rid),
        "text": text,
        "span_start": start,
        "span_end": end,
        "span_text": span_text,
        "semantic_type": str(field(args.type_field)),
        "candidates": candidates,
        "majority_level": level,
        "all_levels": levels,
    }


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    p.add_argument("input", help="source file (JSON array, wrapped array or JSONL)")
    p.add_argument("-o", "--output", help="output JSONL (default stdout)")
    p.add_argument("--records-key", help="key holding the record array in a JSON object")
    p.add_argument("--id-prefix", default="rec", help="prefix for generated ids")
    p.add_argument("--id-field", default="id")
    p.add_argument("--text-field", default="text")
    p.add_argument("--span-field", default="span_text")
    p.add_argument("--start-field", default="span_start")
    p.add_argument("--end-field", default="span_end")
    p.add_argument("--offset-unit", choices=["codepoint", "utf8", "utf16"], default="codepoint")
    p.add_argument("--type-field", default="semantic_type")
    p.add_argument("--candidates-field", default="candidates")
    p.add_argument("--votes-field", help="per-annotator selected levels")
    p.add_argument("--majority-field", default="majority_level")
    p.add_argument("--levels-field", default="all_levels")
    p.add_argument("--level-base", type=int, choices=[0, 1], default=1,
                   help="whether source levels count from 0 or 1")
    p.add_argument("--skip-invalid", action="store_true",
                   help="drop records that fail conversion instead of stopping")
    args = p.parse_args(argv)

    try:
        records = read_records(args.input, args.records_key)
    except (OSError, ConversionError, json.JSONDecodeError, KeyError) as e:
        print(f"error: {args.input}: {e}", file=sys.stderr)
        return 1

    out_lines, skipped, seen = [], 0, set()
    for n, rec in records:
        try:
            row = convert(rec, args, f"{args.id_prefix}-{n - 1}")
            if row["id"] in seen:
                raise ConversionError(f"duplicate id {row['id']!r}")
            seen.add(row["id"])
        except (ConversionError, TypeError, ValueError) as e:
            if not args.skip_invalid:
                print(f"error: record {n}: {e}", file=sys.stderr)
                return 1
            skipped += 1
            continue
        out_lines.append(json.dumps(row, ensure_ascii=False))

    text = "".join(line + "\n" for line in out_lines)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    print(f"converted {len(out_lines)} records, skipped {skipped}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
