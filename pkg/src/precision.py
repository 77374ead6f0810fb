"""
Extended-precision contexts.

mpmath keeps its working precision on the context object, so sharing the global
`mpmath.mp` between threads is unsafe. Each thread gets its own MPContext per
requested precision. Literal constants in expression trees are held at
LITERAL_BITS in a dedicated context and converted on use.
"""
import math
import threading
from typing import Any, Dict, Union

import mpmath
from mpmath.libmp import to_str, repr_dps

DEFAULT_BITS = 256
LITERAL_BITS = 320
# double path: escalate a sum once it cancels more than this many nats
ESCALATION_NATS = 10.0
# extended path: cancellation beyond this many nats raises PrecisionLoss
LOSS_BUDGET_NATS = 45.0

_local = threading.local()
_literal_lock = threading.Lock()
_literal = mpmath.MPContext()
_literal.prec = LITERAL_BITS

Number = Union[int, float, complex, str, Any]


def mp_context(bits: int = DEFAULT_BITS) -> mpmath.MPContext:
    cache: Dict[int, mpmath.MPContext] = getattr(_local, "contexts", None) or {}
    if not cache:
        _local.contexts = cache
    ctx = cache.get(bits)
    if ctx is None:
        ctx = mpmath.MPContext()
        ctx.prec = bits
        cache[bits] = ctx
    return ctx


def num(x: Number):
    """Coerce x to a literal-precision mpc."""
    if hasattr(x, "_mpc_"):
        return _literal.make_mpc(x._mpc_)
    with _literal_lock:
        if isinstance(x, str):
            return parse_complex(x)
        if hasattr(x, "_mpf_"):
            return _literal.mpc(_literal.make_mpf(x._mpf_))
        return _literal.mpc(x)


def parse_complex(text: str):
    """Parse a decimal complex literal: '2', '-1.5e3', '0.5j', '1+2j', '-3.25e-4-7j'."""
    s = text.strip().replace(" ", "")
    if not s:
        raise ValueError("empty literal")
    if not s.endswith("j"):
        return _literal.mpc(_literal.mpf(s))
    body = s[:-1]
    # split at the last sign that is not an exponent sign
    cut = -1
    for i in range(len(body) - 1, 0, -1):
        if body[i] in "+-" and body[i - 1] not in "eE":
            cut = i
            break
    if cut < 0:
        imag = body if body not in ("", "+", "-") else body + "1"
        return _literal.mpc(0, _literal.mpf(imag))
    re_part, im_part = body[:cut], body[cut:]
    if im_part in ("+", "-"):
        im_part += "1"
    return _literal.mpc(_literal.mpf(re_part), _literal.mpf(im_part))


def format_complex(x: Number) -> str:
    """Shortest decimal form that parses back to the same literal."""
    v = num(x)
    dps = repr_dps(LITERAL_BITS)
    re = to_str(v.real._mpf_, dps)
    im = to_str(v.imag._mpf_, dps)
    if v.imag == 0:
        return re
    sign = "" if im.startswith("-") else "+"
    if v.real == 0:
        return f"{im}j"
    return f"{re}{sign}{im}j"


def to_double(x: Number) -> complex:
    return complex(num(x)) if not isinstance(x, (int, float, complex)) else complex(x)


def log_abs(x: Number) -> float:
    """Natural log of |x| without leaving the literal context (no double overflow)."""
    v = num(x)
    if v == 0:
        return -math.inf
    with _literal_lock:
        return float(_literal.log(abs(v)))


def lost_budget(bits: int) -> float:
    """Nats a sum may cancel in the extended path while keeping a double's worth of digits."""
    return min(LOSS_BUDGET_NATS, (bits - 53) * math.log(2))
