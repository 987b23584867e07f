"""Complex numbers on the command line and in reports, written as "a+bi"."""
from typing import Iterable

from affine_compact.errors import ParameterError


def parse_complex(text: str) -> complex:
    """
    Accepts "0.7i", "1-2i", "-0.5", "3.1e-2+1e-3i" and the Python "j" suffix.
    Locale independent: only "." is a decimal separator.
    """
    if isinstance(text, (int, float, complex)) and not isinstance(text, bool):
        return complex(text)
    s = str(text).strip().replace(" ", "").replace("I", "i").replace("J", "j")
    if not s:
        raise ParameterError("Empty complex number")
    try:
        return complex(s.replace("i", "j"))
    except ValueError:
        pass
    if s.endswith(("i", "j")) and s[:-1] in ("", "+", "-"):
        return complex(0, -1 if s.startswith("-") else 1)
    raise ParameterError(f"Cannot parse {text!r} as a complex number a+bi")


def parse_complex_list(text: str | Iterable) -> list[complex]:
    if isinstance(text, str):
        parts = [p for p in text.split(",") if p.strip()]
    else:
        parts = list(text)
    if not parts:
        raise ParameterError("Expected at least one complex number")
    return [parse_complex(p) for p in parts]


def format_complex(z: complex, digits: int = 12) -> str:
    z = complex(z)
    sign = "-" if z.imag < 0 else "+"
    return f"{z.real:.{digits}g}{sign}{abs(z.imag):.{digits}g}i"


def complex_to_json(z: complex) -> dict:
    z = complex(z)
    return {"re": z.real, "im": z.imag}
