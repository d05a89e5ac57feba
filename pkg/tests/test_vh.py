import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import FIXTURES, node, tree, vh
from touchstone.errors import (
    BadAttributeError,
    BadBoundsError,
    BadXPathSyntaxError,
    EmptyHierarchyError,
    NodeNotFoundError,
    NodeNotInTreeError,
    XmlSyntaxError,
)
from touchstone.vh import (
    find_equal_node,
    format_bounds,
    is_functional,
    load_vh,
    node_at_pixel,
    node_at_point,
    parse_bounds,
    parse_vh,
    resolve_xpath,
    serialize_vh,
    simplify_to_html,
    xpath_of,
)

VH = FIXTURES / "vh"


# -- parsing -------------------------------------------------------------------------------------

def test_node_counts_match_oracle(oracles):
    assert len(load_vh(VH / "fifty_nodes.xml").nodes) == oracles["node_count_fifty"] == 50
    assert len(load_vh(VH / "twenty_nodes.xml").nodes) == oracles["node_count_twenty"] == 20


def test_screen_size_from_top_level_bounds():
    t = tree(w=720, h=1280)
    assert (t.screen_w, t.screen_h) == (720, 1280)
    t2 = parse_vh(vh(w=720, h=1280), screen_size=(1080, 2400))
    assert (t2.screen_w, t2.screen_h) == (1080, 2400)


@pytest.mark.parametrize("xml, err", [
    ("<hierarchy><node bounds='[0,0][1,1]'>", XmlSyntaxError),
    ("<root><node bounds='[0,0][1,1]'/></root>", XmlSyntaxError),
    ("<hierarchy><node bounds='[0,0][1,1]'><item/></node></hierarchy>", XmlSyntaxError),
    ("<hierarchy></hierarchy>", EmptyHierarchyError),
    ("<hierarchy><node /></hierarchy>", BadBoundsError),
    ("<hierarchy><node bounds='[0,0][1]'/></hierarchy>", BadBoundsError),
    ("<hierarchy><node bounds='[5,0][1,1]'/></hierarchy>", BadBoundsError),
    ("<hierarchy><node bounds='[0,0][1,1]' clickable='yes'/></hierarchy>", BadAttributeError),
])
def test_parse_errors(xml, err):
    with pytest.raises(err):
        parse_vh(xml)


def test_bounds_round_trip():
    assert parse_bounds("[-3,0][10,20]") == (-3, 0, 10, 20)
    assert format_bounds((-3, 0, 10, 20)) == "[-3,0][10,20]"


@pytest.mark.parametrize("name", sorted(p.name for p in VH.glob("*.xml")))
def test_serialize_round_trip_fixture_files(name):
    t = load_vh(VH / name)
    back = parse_vh(serialize_vh(t))
    assert back == t
    assert [n.attrs for n in back.nodes] == [n.attrs for n in t.nodes]


# -- components ------------------------------------------------------------------------------------

def test_functional_predicate_cases():
    t = tree(
        node(text="label", bounds=(0, 0, 10, 10)),                       # text
        node(cls="android.view.View", bounds=(0, 10, 10, 20)),           # nothing
        node(cls="android.view.View", desc="d", bounds=(0, 20, 10, 30)),  # content-desc
        node(cls="android.widget.EditText", bounds=(0, 30, 10, 40)),     # edit field
        node(cls="android.view.View", clickable=True, bounds=(5, 5, 5, 50)),      # zero area
        node(cls="android.view.View", clickable=True, bounds=(2000, 0, 2100, 10)),  # off screen
        node(cls="android.view.View", scrollable=True, bounds=(0, 40, 10, 50)),
    )
    got = [is_functional(n, t.screen_w, t.screen_h) for n in t.nodes]
    assert got == [False, True, False, True, True, False, False, True]
    assert [i for i, _ in t.components] == [0, 1, 2, 3]


def test_cart_component_index_matches_oracle(oracles):
    t = load_vh(VH / "bestbuy_cart_empty.xml")
    idx = [i for i, n in t.components if n.text == "Your cart is empty"]
    assert idx == [oracles["cart_empty_index"]] == [3]
    assert len(t.components) == oracles["cart_empty_components"]


def test_component_index_bounds():
    comps = load_vh(VH / "one_button.xml").components
    assert 0 in comps and 1 not in comps and -1 not in comps
    with pytest.raises(IndexError):
        comps.node(5)


# -- xpath -----------------------------------------------------------------------------------------

@pytest.mark.parametrize("name", sorted(p.name for p in VH.glob("*.xml")))
def test_xpath_round_trip_every_node(name):
    t = load_vh(VH / name)
    for n in t.nodes:
        assert resolve_xpath(t, xpath_of(t, n)) is n


def test_xpath_errors():
    t = load_vh(VH / "one_button.xml")
    other = load_vh(VH / "one_button.xml")
    with pytest.raises(NodeNotInTreeError):
        xpath_of(t, other.nodes[0])
    for bad in ["", "/hierarchy/node[0]", "//node[1]", "/hierarchy/node[1]/", "/hierarchy/node"]:
        with pytest.raises(BadXPathSyntaxError):
            resolve_xpath(t, bad)
    with pytest.raises(NodeNotFoundError):
        resolve_xpath(t, "/hierarchy/node[1]/node[9]")
    assert resolve_xpath(t, "/hierarchy") is t.root


def test_find_equal_node_returns_first_in_preorder(oracles):
    t = load_vh(VH / "twenty_nodes.xml")
    adds = [xpath_of(t, n) for n in t.nodes if n.text == "Add" and "Button" in n.cls]
    assert adds == oracles["twenty_equal_candidates"]
    target = resolve_xpath(t, adds[-1])
    assert xpath_of(t, find_equal_node(target, t)) == oracles["twenty_first_candidate"]


def test_find_equal_node_none_when_absent():
    a = tree(node(text="x"))
    b = tree(node(text="y"))
    assert find_equal_node(a.nodes[1], b) is None


def test_node_at_point_picks_deepest(oracles):
    t = load_vh(VH / "nested_clickable.xml")
    x, y = oracles["nested_point"]
    hit = node_at_point(t, x, y)
    assert xpath_of(t, hit) == oracles["nested_target"]
    containing = [xpath_of(t, n) for _, n in t.components if n.contains_point(x * t.screen_w, y * t.screen_h)]
    assert sorted(containing) == sorted(oracles["nested_containing"])


def test_node_at_point_validation_and_miss():
    t = tree(node(text="a", bounds=(0, 0, 100, 100)))
    with pytest.raises(ValueError):
        node_at_point(t, 1.5, 0.5)
    assert node_at_pixel(t, 500, 500) is None
    assert node_at_point(t, 0.01, 0.01).text == "a"


# -- simplification --------------------------------------------------------------------------------

def test_one_button_simplifies():
    assert simplify_to_html(load_vh(VH / "one_button.xml")) == "<button id=0>OK</button>"


def test_cart_golden_html():
    want = (VH / "bestbuy_cart_empty.html").read_text()
    assert simplify_to_html(load_vh(VH / "bestbuy_cart_empty.xml")) + "\n" == want


def test_simplify_mapping():
    t = tree(
        node(cls="android.widget.ImageButton", desc="Share", bounds=(0, 0, 10, 10)),
        node(cls="android.widget.EditText", text="say &quot;hi&quot;", bounds=(0, 10, 10, 20)),
        node(cls="android.widget.Switch", checkable=True, checked=True, bounds=(0, 20, 10, 30)),
        node(cls="android.widget.ImageView", desc="logo", bounds=(0, 30, 10, 40)),
        node(text="a&lt;b&#10;c", bounds=(0, 40, 10, 50)),
    )
    assert simplify_to_html(t).splitlines() == [
        "<button id=0>Share</button>",
        '<input id=1 value="say &quot;hi&quot;">',
        "<checkbox id=2 checked=true>",
        '<img id=3 alt="logo">',
        "<p id=4>a&lt;b&#10;c</p>",
    ]


# -- properties --------------------------------------------------------------------------------------

@st.composite
def random_vh(draw, depth=0):
    n = draw(st.integers(0, 2)) if depth < 3 else 0
    kids = tuple(draw(random_vh(depth + 1)) for _ in range(n))
    left = draw(st.integers(-50, 1000))
    top = draw(st.integers(-50, 2000))
    return node(
        cls=draw(st.sampled_from(["android.widget.TextView", "android.widget.Button", "android.view.View"])),
        text=draw(st.sampled_from(["", "a", "Go", "x&amp;y"])),
        bounds=(left, top, left + draw(st.integers(0, 400)), top + draw(st.integers(0, 400))),
        children=kids,
        clickable=draw(st.booleans()),
    )


@settings(max_examples=100, deadline=None)
@given(st.lists(random_vh(), min_size=1, max_size=3))
def test_round_trips_property(kids):
    t = tree(*kids)
    assert parse_vh(serialize_vh(t)) == t
    for n in t.nodes:
        assert resolve_xpath(t, xpath_of(t, n)) is n
    html = simplify_to_html(t)
    assert len(html.splitlines()) == len(t.components) or (html == "" and len(t.components) == 0)


@settings(max_examples=100, deadline=None)
@given(st.lists(random_vh(), min_size=1, max_size=3), st.floats(0, 1), st.floats(0, 1))
def test_node_at_point_is_deepest_container(kids, x, y):
    t = tree(*kids)
    hit = node_at_point(t, x, y)
    px, py = x * t.screen_w, y * t.screen_h
    containing = [n for _, n in t.components if n.contains_point(px, py)]
    if not containing:
        assert hit is None
    else:
        assert hit in containing
        assert hit.depth == max(n.depth for n in containing)
