"""Expression language and finite-difference differentiation."""

from .expr import (
    BinOp, Call, Expr, ImagUnit, Neg, Num, Pi, Var, compile_expr, parse_expr, to_text, tokenize,
)
from .fields import (
    Box, FDConfig, Field, derivative, directional, eval_field, gradient, jacobian,
)

__all__ = [
    "BinOp", "Box", "Call", "Expr", "FDConfig", "Field", "ImagUnit", "Neg", "Num", "Pi", "Var",
    "compile_expr", "derivative", "directional", "eval_field", "gradient", "jacobian",
    "parse_expr", "to_text", "tokenize",
]
