from hypothesis import strategies as st

from dichomatch.generate import agent_ids, institution_ids
from dichomatch.instance import Instance


@st.composite
def instances(draw, max_n=5, max_m=5, min_n=0, min_m=0):
    n = draw(st.integers(min_n, max_n))
    m = draw(st.integers(min_m, max_m))
    agents, insts = agent_ids(n), institution_ids(m)
    accept = {a: draw(st.sets(st.sampled_from(insts))) if insts else set() for a in agents}
    prefs = {d: draw(st.permutations(agents)) for d in insts}
    baseline = draw(st.permutations(insts))
    return Instance(agents, insts, accept, prefs, baseline)
