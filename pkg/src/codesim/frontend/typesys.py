"""Canonical type spellings and the small typing rules of the subset."""

from __future__ import annotations

QUALIFIERS = {"const", "volatile", "static", "extern", "inline", "register"}

_NUMERIC_RANK = {
    "char": 1, "signed char": 1, "unsigned char": 2,
    "short": 3, "unsigned short": 4,
    "int": 5, "unsigned int": 6,
    "long": 7, "unsigned long": 8,
    "long long": 9, "unsigned long long": 10,
    "float": 11, "double": 12, "long double": 13,
}


def canonical_base(words: list[str]) -> str:
    """Normalize a base-type keyword sequence ('unsigned long int' -> 'unsigned long')."""
    words = [w for w in words if w not in QUALIFIERS]
    unsigned = "unsigned" in words
    signed = "signed" in words
    core = [w for w in words if w not in ("unsigned", "signed")]
    longs = core.count("long")
    if "void" in core:
        return "void"
    if "char" in core:
        if unsigned:
            return "unsigned char"
        if signed:
            return "signed char"
        return "char"
    if "double" in core:
        return "long double" if longs else "double"
    if "float" in core:
        return "float"
    if longs >= 2:
        base = "long long"
    elif longs == 1:
        base = "long"
    elif "short" in core:
        base = "short"
    else:
        base = "int"
    return f"unsigned {base}" if unsigned else base


def is_pointer(t: str | None) -> bool:
    return t is not None and (t.endswith("*") or t.endswith("]"))


def decay(t: str) -> str:
    """Array-to-pointer decay: 'int[10]' -> 'int*'; pointers unchanged."""
    if t.endswith("]"):
        open_idx = t.index("[")
        close_idx = t.index("]", open_idx)
        return t[:open_idx] + t[close_idx + 1:] + "*"
    return t


def deref(t: str | None) -> str | None:
    """Type of *p or p[i]; None when t is not a pointer/array."""
    if t is None:
        return None
    if t.endswith("*"):
        return t[:-1]
    if t.endswith("]"):
        open_idx = t.index("[")
        close_idx = t.index("]", open_idx)
        return t[:open_idx] + t[close_idx + 1:]
    return None


def common_type(a: str | None, b: str | None) -> str | None:
    """Common operand type for binary operations; pointers dominate numerics."""
    if a is None:
        return b
    if b is None:
        return a
    if a == b:
        return a
    a_ptr, b_ptr = is_pointer(a), is_pointer(b)
    if a_ptr and not b_ptr:
        return decay(a)
    if b_ptr and not a_ptr:
        return decay(b)
    if a_ptr and b_ptr:
        return decay(a)
    ra, rb = _NUMERIC_RANK.get(a), _NUMERIC_RANK.get(b)
    if ra is not None and rb is not None:
        return a if ra >= rb else b
    return a
