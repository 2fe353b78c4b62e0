from fractions import Fraction

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from bhcert.polycore import from_terms

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

small_fractions = st.fractions(min_value=-5, max_value=5, max_denominator=6)


@st.composite
def polynomials(draw, n_vars=2, max_deg=3, max_terms=5, homogeneous=None):
    """Small random polynomials with rational coefficients."""
    count = draw(st.integers(0, max_terms))
    terms = []
    for _ in range(count):
        if homogeneous is None:
            alpha = tuple(draw(st.integers(0, max_deg)) for _ in range(n_vars))
        else:
            cuts = sorted(draw(st.integers(0, homogeneous)) for _ in range(n_vars - 1))
            bounds = [0, *cuts, homogeneous]
            alpha = tuple(bounds[i + 1] - bounds[i] for i in range(n_vars))
        terms.append((alpha, draw(small_fractions)))
    return from_terms(n_vars, terms)


rational_points = st.lists(
    st.fractions(min_value=-1, max_value=1, max_denominator=8), min_size=2, max_size=2
).map(lambda xs: [Fraction(x) for x in xs])


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
