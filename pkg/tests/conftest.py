import random

from hypothesis import HealthCheck, settings, strategies as st

from ratkon import randgen
from ratkon.freegroup import GroupRingElement

settings.register_profile(
    "default",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


def letters(g=3, max_len=6):
    nonzero = st.integers(1, g).flatmap(lambda i: st.sampled_from([i, -i]))
    return st.lists(nonzero, max_size=max_len)


def ring_elements(g=2, max_terms=3, max_len=3):
    term = st.tuples(letters(g, max_len), st.integers(-3, 3))
    return st.lists(term, max_size=max_terms).map(
        lambda ts: GroupRingElement(g, {tuple(w): c for w, c in ts})
    )


seeds = st.integers(0, 2**32 - 1)


def rng_of(seed):
    return random.Random(seed)


def presentations(g=2, max_core=3):
    return seeds.map(lambda s: randgen.presentation(random.Random(s), g, max_core))
