"""Writes toy_corpus.jsonl: 32 small Java methods with one-line comments.

The output is fully determined by this script; rerun it after edits.
"""
import json
import pathlib

FIELDS = ["name", "size", "count", "price", "title", "label", "width", "height"]


def getter(f):
    cap = f.capitalize()
    return (f"public String get{cap}() {{\n  return this.{f};\n}}\n",
            f"Returns the {f} of this item.")


def setter(f):
    cap = f.capitalize()
    return (f"public void set{cap}(String {f}) {{\n  this.{f} = {f};\n  changed = true;\n}}\n",
            f"Sets the {f} and marks the item as changed.")


def has(f):
    cap = f.capitalize()
    return (f"public boolean has{cap}() {{\n  if (this.{f} == null) {{\n    return false;\n  }}\n"
            f"  return !this.{f}.isEmpty();\n}}\n",
            f"Checks whether the {f} is present.")


def clear(f):
    cap = f.capitalize()
    return (f"public void clear{cap}() {{\n  log.debug(\"clear\");\n  this.{f} = null;\n}}\n",
            f"Clears the {f} field.")


def main():
    makers = [getter, setter, has, clear]
    rows = []
    for i in range(32):
        f = FIELDS[i % len(FIELDS)]
        code, comment = makers[i // len(FIELDS)](f)
        rows.append({"id": f"toy-{i:02d}", "code": code, "comment": comment})
    out = pathlib.Path(__file__).with_name("toy_corpus.jsonl")
    out.write_text("".join(json.dumps(r) + "\n" for r in rows))


if __name__ == "__main__":
    main()
