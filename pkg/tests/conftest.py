from fractions import Fraction

from hypothesis import settings

from hodgepoly.exterior_poly import PolyForm

settings.register_profile("exact", max_examples=40, deadline=None, derandomize=True)
settings.load_profile("exact")


def form(m, *terms):
    """Build a form from (coeff, exps, blade) triples; k is read off the first term."""
    k = sum(terms[0][1]) if terms else 0
    return PolyForm(m, k, [((tuple(e), tuple(b)), Fraction(c)) for c, e, b in terms])
