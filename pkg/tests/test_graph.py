import pytest
from hypothesis import given, settings, strategies as st

from meetlab.errors import InvalidParams, ParseError, ValidationError
from meetlab.graph import FAMILIES, Graph, generate, parse_graph, serialize, validate


def test_parse_smallest():
    g = parse_graph("2 1\n0 1")
    assert g.n == 2 and g.m == 1 and g.edges == ((0, 1),)


def test_parse_k3_with_comments():
    g = parse_graph("# triangle\n3 3\n0 1\n\n1 2\n# mid\n0 2\n")
    assert g.adjacency == ((1, 2), (0, 2), (0, 1))


@pytest.mark.parametrize("text, exc, needle", [
    ("3 2\n0 1\n0 1", ValidationError, "duplicate"),
    ("3 2\n0 1\n0 5", ValidationError, "out of range"),
    ("4 2\n0 1\n2 3", ValidationError, "disconnected"),
    ("3 2\n0 1\n1 a", ParseError, "line 3"),
    ("3 2\n0 1", ParseError, "m=2"),
    ("3 2\n1 0\n1 2", ParseError, "u < v"),
    ("3 2\n1 1\n1 2", ParseError, "u < v"),
    ("", ParseError, "header"),
    ("3\n0 1", ParseError, "line 1"),
    ("a b\n0 1", ParseError, "non-integer"),
])
def test_parse_errors(text, exc, needle):
    with pytest.raises(exc, match=needle):
        parse_graph(text)


def test_parse_error_names_line():
    with pytest.raises(ValidationError, match="line 4"):
        parse_graph("# c\n3 2\n0 1\n0 1\n")


def test_generate_path_complete_lollipop():
    assert generate("path", 3).edges == ((0, 1), (1, 2))
    assert generate("complete", 4).m == 6
    lol = generate("lollipop", 5, k=3)
    assert lol.edges == ((0, 1), (0, 2), (1, 2), (2, 3), (3, 4))
    assert generate("star", 4).edges == ((0, 1), (0, 2), (0, 3))
    assert generate("cycle", 4).edges == ((0, 1), (0, 3), (1, 2), (2, 3))


@pytest.mark.parametrize("kwargs", [
    dict(family="lollipop", n=5, k=2),
    dict(family="lollipop", n=5, k=6),
    dict(family="lollipop", n=5),
    dict(family="random_connected", n=5),
    dict(family="cycle", n=2),
    dict(family="path", n=1),
    dict(family="hypercube", n=4),
])
def test_generate_invalid(kwargs):
    with pytest.raises(InvalidParams):
        generate(**kwargs)


def test_validate_rejects_asymmetric():
    with pytest.raises(ValidationError, match="asymmetric"):
        validate(Graph(3, ((1,), (0, 2), ())))


def test_random_connected_deterministic():
    a = generate("random_connected", 12, seed=42)
    b = generate("random_connected", 12, seed=42)
    assert a == b and serialize(a) == serialize(b)
    assert generate("random_connected", 12, seed=43) != a


def test_random_connected_edge_probability_extremes():
    assert generate("random_connected", 7, seed=1, p=0.0).m == 6
    assert generate("random_connected", 7, seed=1, p=1.0).m == 21


family_args = st.one_of(
    st.tuples(st.sampled_from(["path", "complete", "star"]), st.integers(2, 15), st.none(), st.none()),
    st.tuples(st.just("cycle"), st.integers(3, 15), st.none(), st.none()),
    st.integers(3, 15).flatmap(
        lambda n: st.tuples(st.just("lollipop"), st.just(n), st.integers(3, n), st.none())),
    st.tuples(st.just("random_connected"), st.integers(2, 15), st.none(), st.integers(0, 10**6)),
)


@given(family_args)
@settings(max_examples=200, deadline=None)
def test_generated_graphs_round_trip_and_validate(args):
    family, n, k, seed = args
    g = generate(family, n, k=k, seed=seed)
    validate(g)
    assert g.n == n
    assert parse_graph(serialize(g)) == g
    assert set(FAMILIES) >= {family}


def test_serialize_is_canonical():
    g = parse_graph("3 2\n1 2\n0 1\n")
    assert serialize(g) == "3 2\n0 1\n1 2\n"
