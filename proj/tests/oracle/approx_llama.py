"""Reference token counter for the approx-llama scheme, written independently of the C++ code."""
import math
import re
import sys

WORD = re.compile(rb"[A-Za-z0-9_\x80-\xff]+|[^\sA-Za-z0-9_\x80-\xff]")


def count(data: bytes) -> int:
    total = 0
    for m in WORD.finditer(data):
        piece = m.group(0)
        if len(piece) == 1 and not re.match(rb"[A-Za-z0-9_\x80-\xff]", piece):
            total += 1
        elif len(piece) <= 8:
            total += 1
        else:
            total += math.ceil(len(piece) / 4)
    return total


if __name__ == "__main__":
    for path in sys.argv[1:]:
        with open(path, "rb") as f:
            print(count(f.read()), path)
