"""Hypothesis strategies shared across test modules."""

from hypothesis import strategies as st

from pereach import Atom, Concat, Epsilon, Graph, Star, Union, Wildcard


@st.composite
def graphs(draw, max_n: int = 12):
    n = draw(st.integers(min_value=1, max_value=max_n))
    labels = {f"v{i}": draw(st.sampled_from("ab")) for i in range(n)}
    nodes = sorted(labels)
    m = draw(st.integers(min_value=0, max_value=min(30, n * n)))
    edges = [
        (draw(st.sampled_from(nodes)), draw(st.sampled_from(nodes))) for _ in range(m)
    ]
    return Graph.build(labels, edges)


def asts(alphabet: str = "abc", max_leaves: int = 4):
    leaves = st.one_of(
        st.just(Epsilon()),
        st.just(Wildcard()),
        st.sampled_from([Atom(ch) for ch in alphabet]),
    )
    return st.recursive(
        leaves,
        lambda inner: st.one_of(
            st.builds(Star, inner),
            st.builds(Concat, inner, inner),
            st.builds(Union, inner, inner),
        ),
        max_leaves=max_leaves,
    )
