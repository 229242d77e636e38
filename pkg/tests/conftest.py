from fractions import Fraction

from hypothesis import settings, strategies as st

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


def rationals(num=9, den=4):
    return st.builds(Fraction, st.integers(-num, num), st.integers(1, den))
