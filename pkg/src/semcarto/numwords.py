"""Fixed English long-form rendering of cardinal and ordinal numbers.

Convention pinned for reproducibility: no "and", no hyphens, every word
a separate token ("2020" -> "two thousand twenty", "21st" -> "twenty first").
"""

from __future__ import annotations

_ONES = (
    "zero one two three four five six seven eight nine ten eleven twelve "
    "thirteen fourteen fifteen sixteen seventeen eighteen nineteen"
).split()
_TENS = "twenty thirty forty fifty sixty seventy eighty ninety".split()
_SCALES = ("thousand", "million", "billion", "trillion", "quadrillion", "quintillion")

_ORDINAL_IRREGULAR = {
    "one": "first",
    "two": "second",
    "three": "third",
    "five": "fifth",
    "eight": "eighth",
    "nine": "ninth",
    "twelve": "twelfth",
}


def _under_thousand(n: int) -> list[str]:
    words: list[str] = []
    if n >= 100:
        words += [_ONES[n // 100], "hundred"]
        n %= 100
    if n >= 20:
        words.append(_TENS[n // 10 - 2])
        n %= 10
    if n > 0:
        words.append(_ONES[n])
    return words


def cardinal_words(n: int) -> list[str]:
    """Render a nonnegative integer as a list of lowercase word tokens."""
    if n < 0:
        raise ValueError("negative numbers are not rendered")
    if n == 0:
        return ["zero"]
    groups: list[int] = []
    while n > 0:
        groups.append(n % 1000)
        n //= 1000
    if len(groups) > len(_SCALES) + 1:
        # Past named scales: spell digit by digit.
        return [_ONES[int(d)] for d in str(sum(g * 1000**i for i, g in enumerate(groups)))]
    words: list[str] = []
    for i in range(len(groups) - 1, -1, -1):
        if groups[i] == 0:
            continue
        words += _under_thousand(groups[i])
        if i > 0:
            words.append(_SCALES[i - 1])
    return words


def ordinal_words(n: int) -> list[str]:
    """Render a nonnegative integer as ordinal word tokens ("21" -> twenty first)."""
    words = cardinal_words(n)
    last = words[-1]
    if last in _ORDINAL_IRREGULAR:
        words[-1] = _ORDINAL_IRREGULAR[last]
    elif last.endswith("y"):
        words[-1] = last[:-1] + "ieth"
    else:
        words[-1] = last + "th"
    return words
