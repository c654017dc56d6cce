"""Per-link rate vectors: parsing and canonical ordering."""

from __future__ import annotations

from fractions import Fraction


def rate_vector(links, rates) -> tuple[Fraction, ...]:
    """Canonicalize rates over ``links`` from a dict (by label or LinkId) or
    a sequence in link order. Values become exact Fractions and must be
    nonnegative."""
    if isinstance(rates, dict):
        vals = []
        for link in links:
            if link.label in rates:
                vals.append(Fraction(rates[link.label]))
            elif link in rates:
                vals.append(Fraction(rates[link]))
            else:
                raise KeyError(f"no rate given for link {link.label}")
    else:
        rates = list(rates)
        if len(rates) != len(links):
            raise ValueError(f"expected {len(links)} rates, got {len(rates)}")
        vals = [Fraction(v) for v in rates]
    if any(v < 0 for v in vals):
        raise ValueError("rates must be nonnegative")
    return tuple(vals)
